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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "specdec/common.hpp"
#include "specdec/corpus.hpp"
#include "specdec/markov_model.hpp"

namespace specdec {

/**
 * Model file: a JSON object
 *
 *   {"vocab_size": 64, "eos": 0, "order": 2, "alpha": 0.1, "seed": 7,
 *    "train_corpus_path": "train.txt"}            // or
 *    "explicit_counts": ["1 2 -> 3:4,5:1", "-> 3:9", ...]
 *
 * With neither source the model trains on the seeded synthetic corpus.
 * A relative train_corpus_path resolves against the model file's folder.
 */
inline MarkovTableModel parse_model(std::string_view text,
                                    const std::filesystem::path& base_dir = {}) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("model file must hold a JSON object");
  MarkovParams params;
  try {
    params.vocab.size = doc.at("vocab_size").get<std::int32_t>();
    params.vocab.eos = doc.value("eos", 0);
    params.order = doc.value("order", std::size_t{2});
    params.alpha = doc.value("alpha", 0.1);
    params.seed = doc.value("seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model file field: ") + e.what());
  }
  try {
    params.validate();
  } catch (const UsageError& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }

  const bool has_path = doc.contains("train_corpus_path");
  const bool has_counts = doc.contains("explicit_counts");
  if (has_path && has_counts) {
    throw ParseError("model file sets both train_corpus_path and explicit_counts");
  }
  if (has_counts) {
    const auto& c = doc["explicit_counts"];
    std::string lines;
    if (c.is_string()) {
      lines = c.get<std::string>();
    } else if (c.is_array()) {
      for (const auto& l : c) {
        if (!l.is_string()) throw ParseError("explicit_counts entries must be strings");
        lines += l.get<std::string>();
        lines += '\n';
      }
    } else {
      throw ParseError("explicit_counts must be a string or a list of strings");
    }
    try {
      return MarkovTableModel(params, MarkovTableModel::parse_counts(lines));
    } catch (const std::logic_error& e) {
      throw ParseError(std::string("explicit_counts: ") + e.what());
    }
  }
  if (has_path) {
    std::filesystem::path p = doc["train_corpus_path"].get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    Corpus train = load_corpus(p.string());
    try {
      return MarkovTableModel::train(params, train.sequences);
    } catch (const std::logic_error& e) {
      throw ParseError(std::string("training corpus: ") + e.what());
    }
  }
  return MarkovTableModel::from_seed(params);
}

inline MarkovTableModel load_model(const std::string& path) {
  return parse_model(read_text_file(path), std::filesystem::path(path).parent_path());
}

inline std::string format_model(const MarkovParams& params,
                                const std::optional<std::string>& train_corpus_path = {},
                                const MarkovTableModel* explicit_counts = nullptr) {
  nlohmann::ordered_json doc;
  doc["vocab_size"] = params.vocab.size;
  doc["eos"] = params.vocab.eos;
  doc["order"] = params.order;
  doc["alpha"] = params.alpha;
  doc["seed"] = params.seed;
  if (train_corpus_path) doc["train_corpus_path"] = *train_corpus_path;
  if (explicit_counts) {
    auto lines = nlohmann::ordered_json::array();
    std::string text = explicit_counts->format_counts();
    std::size_t pos = 0;
    while (pos < text.size()) {
      const std::size_t nl = text.find('\n', pos);
      lines.push_back(text.substr(pos, nl - pos));
      pos = nl + 1;
    }
    doc["explicit_counts"] = std::move(lines);
  }
  return doc.dump(2) + "\n";
}

}  // namespace specdec
