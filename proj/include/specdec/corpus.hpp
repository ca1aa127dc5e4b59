/* Copyright 2026 The specdec Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "specdec/common.hpp"

namespace specdec {

// Prompts as integer token streams: one prompt per line, space-separated
// decimal ids. Blank lines are ignored.
struct Corpus {
  std::vector<TokenSeq> sequences;
  std::string source_path;
};

inline Corpus parse_corpus(std::string_view text) {
  Corpus corpus;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    TokenSeq seq;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      if (i == line.size()) break;
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + line.size(), v);
      if (ec != std::errc{} || v < 0 || v > INT32_MAX ||
          (ptr != line.data() + line.size() && *ptr != ' ' && *ptr != '\t' && *ptr != '\r')) {
        throw ParseError("corpus line " + std::to_string(line_no) + ": bad token id");
      }
      seq.push_back(static_cast<TokenId>(v));
      i = static_cast<std::size_t>(ptr - line.data());
    }
    if (!seq.empty()) corpus.sequences.push_back(std::move(seq));
  }
  return corpus;
}

inline std::string format_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& seq : corpus.sequences) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(seq[i]);
    }
    out += '\n';
  }
  return out;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Corpus load_corpus(const std::string& path) {
  Corpus c = parse_corpus(read_text_file(path));
  c.source_path = path;
  return c;
}

struct CorpusSpec {
  std::uint64_t seed = 0;
  VocabSpec vocab{64, 0};
  std::size_t count = 40;
  std::size_t length = 64;
  double repetitiveness = 0.5;
};

/**
 * Synthetic prompts. Each prompt owns one random phrase; the prompt is
 * filled chunk by chunk, copying the phrase with probability
 * `repetitiveness` and drawing fresh random tokens otherwise. At 0 the
 * prompt is i.i.d. uniform noise; at 1 it is the phrase repeated. Eos never
 * appears in a prompt.
 */
inline Corpus gen_corpus(const CorpusSpec& spec) {
  spec.vocab.validate();
  if (!(spec.repetitiveness >= 0.0 && spec.repetitiveness <= 1.0)) {
    throw UsageError("repetitiveness must be in [0, 1]");
  }
  if (spec.length < 1) throw UsageError("prompt length must be >= 1");
  Rng rng(mix_seed(spec.seed, 0x636f72707573ULL));
  auto draw = [&] {
    auto t = static_cast<TokenId>(rng.below(static_cast<std::uint64_t>(spec.vocab.size - 1)));
    return t >= spec.vocab.eos ? t + 1 : t;
  };
  constexpr std::size_t kPhraseLen = 6;
  Corpus corpus;
  for (std::size_t n = 0; n < spec.count; ++n) {
    TokenSeq phrase(std::min(kPhraseLen, spec.length));
    for (auto& t : phrase) t = draw();
    TokenSeq prompt;
    while (prompt.size() < spec.length) {
      if (spec.repetitiveness >= 1.0 || rng.uniform() < spec.repetitiveness) {
        prompt.insert(prompt.end(), phrase.begin(), phrase.end());
      } else {
        for (std::size_t i = 0; i < phrase.size(); ++i) prompt.push_back(draw());
      }
    }
    prompt.resize(spec.length);
    corpus.sequences.push_back(std::move(prompt));
  }
  return corpus;
}

// Optional text layer: a vocabulary file with one word per line (id = line
// index) and whitespace tokenization.
class WordVocabulary {
 public:
  static WordVocabulary parse(std::string_view text) {
    WordVocabulary v;
    std::istringstream in{std::string(text)};
    std::string word;
    while (std::getline(in, word)) {
      if (!word.empty() && word.back() == '\r') word.pop_back();
      if (word.empty()) continue;
      if (v.ids_.count(word)) throw ParseError("duplicate vocabulary word '" + word + "'");
      v.ids_.emplace(word, static_cast<TokenId>(v.words_.size()));
      v.words_.push_back(word);
    }
    return v;
  }

  std::size_t size() const { return words_.size(); }

  TokenSeq encode(std::string_view text) const {
    TokenSeq out;
    std::istringstream in{std::string(text)};
    std::string word;
    while (in >> word) {
      auto it = ids_.find(word);
      if (it == ids_.end()) throw ParseError("word '" + word + "' not in vocabulary");
      out.push_back(it->second);
    }
    return out;
  }

  std::string decode(std::span<const TokenId> ids) const {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= words_.size()) {
        throw RangeError("token id outside vocabulary");
      }
      if (i) out += ' ';
      out += words_[static_cast<std::size_t>(ids[i])];
    }
    return out;
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, TokenId> ids_;
};

}  // namespace specdec
