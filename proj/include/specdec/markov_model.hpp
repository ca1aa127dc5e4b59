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
#include <array>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "specdec/common.hpp"
#include "specdec/distribution.hpp"
#include "specdec/model.hpp"

namespace specdec {

struct MarkovParams {
  VocabSpec vocab{64, 0};
  std::size_t order = 2;
  double alpha = 0.1;
  std::uint64_t seed = 0;

  void validate() const {
    vocab.validate();
    if (order < 1) throw UsageError("markov order must be >= 1");
    if (order > kMaxOrder) throw UsageError("markov order must be <= 8");
    if (!(alpha > 0.0)) throw UsageError("markov alpha must be > 0");
  }

  static constexpr std::size_t kMaxOrder = 8;
};

/**
 * Order-o add-alpha Markov model with back-off.
 *
 * For a context, the longest suffix (at most o tokens) that was seen in
 * training picks the count row c, and
 *
 *   P(t | ctx) = (c[t] + alpha) / (sum(c) + alpha * V).
 *
 * The empty context holds unigram counts; with no counts at all the result
 * is uniform.
 */
class MarkovTableModel final : public TargetModel {
 public:
  struct CountRow {
    std::vector<std::pair<TokenId, std::uint64_t>> entries;  // sorted by token
    std::uint64_t total = 0;
  };

  struct SeqLess {
    using is_transparent = void;
    template <class A, class B>
    bool operator()(const A& a, const B& b) const {
      return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
  };

  using CountTable = std::map<TokenSeq, CountRow, SeqLess>;

  MarkovTableModel(MarkovParams params, CountTable counts)
      : params_(params), counts_(std::move(counts)) {
    params_.validate();
    for (auto& [ctx, row] : counts_) {
      if (ctx.size() > params_.order) {
        throw UsageError("count context longer than the model order");
      }
      params_.vocab.check_tokens(ctx);
      std::sort(row.entries.begin(), row.entries.end());
      row.total = 0;
      for (const auto& [tok, n] : row.entries) {
        if (!params_.vocab.contains(tok)) throw RangeError("count token outside vocab");
        row.total += n;
      }
    }
  }

  static MarkovTableModel train(MarkovParams params, std::span<const TokenSeq> corpus) {
    params.validate();
    std::map<TokenSeq, std::map<TokenId, std::uint64_t>> raw;
    for (const auto& seq : corpus) {
      params.vocab.check_tokens(seq);
      for (std::size_t i = 0; i < seq.size(); ++i) {
        for (std::size_t len = 0; len <= params.order && len <= i; ++len) {
          TokenSeq ctx(seq.begin() + static_cast<std::ptrdiff_t>(i - len),
                       seq.begin() + static_cast<std::ptrdiff_t>(i));
          ++raw[ctx][seq[i]];
        }
      }
    }
    CountTable counts;
    for (auto& [ctx, row] : raw) {
      CountRow& out = counts[ctx];
      out.entries.assign(row.begin(), row.end());
    }
    return MarkovTableModel(params, std::move(counts));
  }

  /**
   * Seeded training text: documents stitched from a small pool of phrases
   * with random filler between them, each ending in eos. Greedy decoding on
   * a model trained from this revisits phrases, which gives the n-gram
   * retriever something to find.
   */
  static std::vector<TokenSeq> synthetic_corpus(const VocabSpec& vocab, std::uint64_t seed) {
    vocab.validate();
    Rng rng(mix_seed(seed, 0x6d61726b6f76ULL));
    auto draw = [&] {
      auto t = static_cast<TokenId>(rng.below(static_cast<std::uint64_t>(vocab.size - 1)));
      return t >= vocab.eos ? t + 1 : t;
    };
    constexpr std::size_t kPhrases = 32;
    constexpr std::size_t kDocs = 24;
    constexpr std::size_t kSegments = 48;
    std::vector<TokenSeq> phrases(kPhrases);
    for (auto& p : phrases) {
      p.resize(3 + rng.below(6));
      for (auto& t : p) t = draw();
    }
    std::vector<TokenSeq> docs(kDocs);
    for (auto& doc : docs) {
      for (std::size_t s = 0; s < kSegments; ++s) {
        if (rng.uniform() < 0.75) {
          const auto& p = phrases[rng.below(kPhrases)];
          doc.insert(doc.end(), p.begin(), p.end());
        } else {
          for (std::size_t n = 1 + rng.below(3); n > 0; --n) doc.push_back(draw());
        }
      }
      doc.push_back(vocab.eos);
    }
    return docs;
  }

  static MarkovTableModel from_seed(MarkovParams params) {
    const auto corpus = synthetic_corpus(params.vocab, params.seed);
    return train(params, corpus);
  }

  const VocabSpec& vocab() const override { return params_.vocab; }
  const MarkovParams& params() const { return params_; }
  const CountTable& counts() const { return counts_; }

  Distribution next_distribution(ContextView context) const override {
    const auto v = static_cast<std::size_t>(params_.vocab.size);
    std::array<TokenId, MarkovParams::kMaxOrder> buf{};
    const std::size_t max_len = std::min(params_.order, context.size());
    for (std::size_t i = 0; i < max_len; ++i) {
      buf[i] = context[context.size() - max_len + i];
    }
    for (std::size_t len = max_len + 1; len-- > 0;) {
      std::span<const TokenId> key(buf.data() + (max_len - len), len);
      auto it = counts_.find(key);
      if (it == counts_.end() || it->second.total == 0) continue;
      const CountRow& row = it->second;
      const double denom = static_cast<double>(row.total) + params_.alpha * static_cast<double>(v);
      std::vector<double> probs(v, params_.alpha / denom);
      for (const auto& [tok, n] : row.entries) {
        probs[static_cast<std::size_t>(tok)] = (static_cast<double>(n) + params_.alpha) / denom;
      }
      return Distribution(std::move(probs));
    }
    return Distribution::uniform(v);
  }

  // One line per context: "c1 c2 -> tok:count,tok:count".
  std::string format_counts() const {
    std::ostringstream os;
    for (const auto& [ctx, row] : counts_) {
      for (std::size_t i = 0; i < ctx.size(); ++i) os << ctx[i] << ' ';
      os << "->";
      for (std::size_t i = 0; i < row.entries.size(); ++i) {
        os << (i ? "," : " ") << row.entries[i].first << ':' << row.entries[i].second;
      }
      os << '\n';
    }
    return os.str();
  }

  static CountTable parse_counts(std::string_view text) {
    CountTable table;
    std::size_t line_no = 0;
    while (!text.empty()) {
      const std::size_t nl = text.find('\n');
      std::string_view line = text.substr(0, nl);
      text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
      const std::size_t arrow = line.find("->");
      if (arrow == std::string_view::npos) {
        throw ParseError("counts line " + std::to_string(line_no) + ": missing '->'");
      }
      TokenSeq ctx = parse_ints(line.substr(0, arrow), ' ', line_no);
      CountRow row;
      std::string_view rest = line.substr(arrow + 2);
      for (std::string_view item : split(rest, ',')) {
        const std::size_t colon = item.find(':');
        if (colon == std::string_view::npos) {
          throw ParseError("counts line " + std::to_string(line_no) + ": expected tok:count");
        }
        auto tok = parse_ints(item.substr(0, colon), ' ', line_no);
        auto cnt = parse_ints(item.substr(colon + 1), ' ', line_no);
        if (tok.size() != 1 || cnt.size() != 1 || cnt[0] < 0) {
          throw ParseError("counts line " + std::to_string(line_no) + ": bad entry");
        }
        row.entries.emplace_back(tok[0], static_cast<std::uint64_t>(cnt[0]));
      }
      table[std::move(ctx)] = std::move(row);
    }
    return table;
  }

 private:
  static std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    while (true) {
      const std::size_t p = s.find(sep);
      std::string_view item = s.substr(0, p);
      if (item.find_first_not_of(" \t\r") != std::string_view::npos) out.push_back(item);
      if (p == std::string_view::npos) break;
      s = s.substr(p + 1);
    }
    return out;
  }

  static TokenSeq parse_ints(std::string_view s, char sep, std::size_t line_no) {
    TokenSeq out;
    for (std::string_view item : split(s, sep)) {
      const auto b = item.find_first_not_of(" \t\r");
      const auto e = item.find_last_not_of(" \t\r");
      item = item.substr(b, e - b + 1);
      TokenId v = 0;
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc{} || ptr != item.data() + item.size()) {
        throw ParseError("counts line " + std::to_string(line_no) + ": bad integer '" +
                         std::string(item) + "'");
      }
      out.push_back(v);
    }
    return out;
  }

  MarkovParams params_;
  CountTable counts_;
};

}  // namespace specdec
