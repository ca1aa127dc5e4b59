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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "specdec/common.hpp"

namespace specdec {

struct IndexOptions {
  std::size_t m_max = 3;        // longest key gram
  std::size_t value_len = 8;    // longest continuation handed back
  std::size_t max_matches = 2;  // distinct continuations per query
};

struct MatchResult {
  // Most recent source occurrence first, distinct by content.
  std::vector<TokenSeq> continuations;
  // Hash-table lookups spent producing this result.
  std::size_t probes = 0;

  bool empty() const { return continuations.empty(); }
};

struct FallbackMatch {
  MatchResult result;
  std::size_t used_m = 0;  // 0 when every query length missed
};

/**
 * Hash-table n-gram index over a growing token stream.
 *
 * Every gram of length 1..m_max ending at source position e is a key whose
 * value list holds e, the offset of the token right after the occurrence.
 * Offsets are appended in source order, so build() and any sequence of
 * extend() calls over the same tokens produce identical tables. Lookup is a
 * single probe per query length; the continuation is read straight out of
 * the source, so nothing but offsets is stored.
 */
class NGramIndex {
 public:
  static constexpr std::size_t kMaxKeyLen = 8;

  explicit NGramIndex(IndexOptions opts = {}) : opts_(opts) {
    if (opts_.m_max < 1 || opts_.m_max > kMaxKeyLen) {
      throw UsageError("m_max must be in [1, " + std::to_string(kMaxKeyLen) + "]");
    }
    if (opts_.value_len < 1) throw UsageError("value_len must be >= 1");
    if (opts_.max_matches < 1) throw UsageError("max_matches must be >= 1");
  }

  static NGramIndex build(std::span<const TokenId> source, IndexOptions opts = {}) {
    NGramIndex index(opts);
    index.extend(source);
    return index;
  }

  void extend(std::span<const TokenId> new_tokens) {
    for (TokenId t : new_tokens) {
      source_.push_back(t);
      const std::size_t end = source_.size();
      for (std::size_t len = 1; len <= opts_.m_max && len <= end; ++len) {
        table_[make_key(std::span(source_).subspan(end - len, len))].push_back(
            static_cast<std::uint32_t>(end));
      }
    }
  }

  MatchResult match(std::span<const TokenId> query,
                    std::optional<std::size_t> limit = std::nullopt) const {
    if (query.empty() || query.size() > opts_.m_max) {
      throw UsageError("query length " + std::to_string(query.size()) +
                       " outside [1, " + std::to_string(opts_.m_max) + "]");
    }
    const std::size_t cap = limit.value_or(opts_.max_matches);
    MatchResult out;
    out.probes = 1;
    auto it = table_.find(make_key(query));
    if (it == table_.end()) return out;
    const auto& offsets = it->second;
    for (auto off = offsets.rbegin(); off != offsets.rend(); ++off) {
      if (out.continuations.size() >= cap) break;
      const std::size_t begin = *off;
      if (begin >= source_.size()) continue;  // occurrence at the very end
      const std::size_t end = std::min(begin + opts_.value_len, source_.size());
      TokenSeq cont(source_.begin() + static_cast<std::ptrdiff_t>(begin),
                    source_.begin() + static_cast<std::ptrdiff_t>(end));
      if (std::find(out.continuations.begin(), out.continuations.end(), cont) ==
          out.continuations.end()) {
        out.continuations.push_back(std::move(cont));
      }
    }
    return out;
  }

  // Queries the last m tokens of `suffix` for m = m_start, m_start-1, ...,
  // m_floor and returns the first non-empty result.
  FallbackMatch match_with_fallback(std::span<const TokenId> suffix,
                                    std::size_t m_start, std::size_t m_floor = 1,
                                    std::optional<std::size_t> limit = std::nullopt) const {
    FallbackMatch out;
    std::size_t m = std::min({m_start, suffix.size(), opts_.m_max});
    m_floor = std::max<std::size_t>(m_floor, 1);
    for (; m >= m_floor; --m) {
      MatchResult r = match(suffix.subspan(suffix.size() - m), limit);
      out.result.probes += r.probes;
      if (!r.empty()) {
        out.result.continuations = std::move(r.continuations);
        out.used_m = m;
        return out;
      }
    }
    return out;
  }

  // Stored offsets for `key`, most recent first.
  std::vector<std::size_t> offsets(std::span<const TokenId> key) const {
    std::vector<std::size_t> out;
    if (key.empty() || key.size() > opts_.m_max) return out;
    auto it = table_.find(make_key(key));
    if (it == table_.end()) return out;
    out.assign(it->second.rbegin(), it->second.rend());
    return out;
  }

  const TokenSeq& source() const { return source_; }
  const IndexOptions& options() const { return opts_; }
  std::size_t key_count() const { return table_.size(); }

  // One line per key, "k1 k2 .. km | off1,off2,...", keys ordered by length
  // then lexicographically, offsets most recent first.
  std::string dump() const {
    std::vector<const std::pair<const GramKey, std::vector<std::uint32_t>>*> rows;
    rows.reserve(table_.size());
    for (const auto& kv : table_) rows.push_back(&kv);
    std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) {
      if (a->first.len != b->first.len) return a->first.len < b->first.len;
      return std::lexicographical_compare(
          a->first.ids.begin(), a->first.ids.begin() + a->first.len,
          b->first.ids.begin(), b->first.ids.begin() + b->first.len);
    });
    std::ostringstream os;
    for (auto* row : rows) {
      for (std::size_t i = 0; i < row->first.len; ++i) {
        os << (i ? " " : "") << row->first.ids[i];
      }
      os << " |";
      const auto& offs = row->second;
      for (auto it = offs.rbegin(); it != offs.rend(); ++it) {
        os << (it == offs.rbegin() ? " " : ",") << *it;
      }
      os << '\n';
    }
    return os.str();
  }

 private:
  struct GramKey {
    std::array<TokenId, kMaxKeyLen> ids{};
    std::uint8_t len = 0;
    bool operator==(const GramKey&) const = default;
  };

  struct GramKeyHash {
    std::size_t operator()(const GramKey& k) const noexcept {
      std::uint64_t h = 0xcbf29ce484222325ULL ^ k.len;
      for (std::size_t i = 0; i < k.len; ++i) {
        h = mix_seed(h, static_cast<std::uint32_t>(k.ids[i]));
      }
      return static_cast<std::size_t>(h);
    }
  };

  static GramKey make_key(std::span<const TokenId> gram) {
    GramKey key;
    key.len = static_cast<std::uint8_t>(gram.size());
    std::copy(gram.begin(), gram.end(), key.ids.begin());
    return key;
  }

  IndexOptions opts_;
  TokenSeq source_;
  std::unordered_map<GramKey, std::vector<std::uint32_t>, GramKeyHash> table_;
};

}  // namespace specdec
