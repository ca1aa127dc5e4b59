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
#include <cstddef>
#include <string>
#include <vector>

#include "specdec/common.hpp"
#include "specdec/distribution.hpp"
#include "specdec/ngram_index.hpp"

namespace specdec {

struct DraftConfig {
  std::size_t top_k = 16;      // next-next candidates taken from the last logit
  std::size_t capacity = 60;   // draft-tree token budget
  std::size_t m_start = 3;     // longest query gram
  std::size_t next_token_value_len = 8;

  void validate() const {
    if (top_k < 1) throw UsageError("top_k must be >= 1");
    if (capacity < 1) throw UsageError("capacity must be >= 1");
    if (m_start < 1) throw UsageError("m_start must be >= 1");
    if (next_token_value_len < 1) throw UsageError("next_token_value_len must be >= 1");
  }
};

struct Candidate {
  TokenId token = 0;
  std::size_t rank = 0;  // 0-based, counted after dropping the next token
  bool operator==(const Candidate&) const = default;
};

using CandidateSet = std::vector<Candidate>;

struct DraftOrigin {
  enum class Kind { kNextToken, kCandidate, kLastLogit };
  Kind kind = Kind::kNextToken;
  std::size_t rank = 0;  // meaningful for kCandidate / kLastLogit
  bool operator==(const DraftOrigin&) const = default;
};

struct DraftSet {
  std::vector<TokenSeq> sequences;
  std::vector<DraftOrigin> origins;

  std::size_t token_count() const {
    std::size_t n = 0;
    for (const auto& s : sequences) n += s.size();
    return n;
  }
  bool empty() const { return sequences.empty(); }
};

// Bookkeeping returned next to the drafts, for per-step records.
struct DraftStats {
  bool retrieval_hit = false;
  std::size_t used_m = 0;   // gram length that matched for the next token
  std::size_t probes = 0;   // hash lookups across all queries
};

// Top-k of the last logit, minus the already sampled next token. The window
// is k wide before the removal, so at most k entries come back.
inline CandidateSet speculate_next_next(const Distribution& last_dist,
                                        TokenId next_token, std::size_t k) {
  CandidateSet out;
  std::size_t rank = 0;
  for (TokenId t : last_dist.top_k(k)) {
    if (t == next_token) continue;
    out.push_back({t, rank++});
  }
  return out;
}

// Tokens kept for a candidate sequence, candidate included.
constexpr std::size_t prune_budget(std::size_t rank) {
  if (rank < 8) return 4;
  if (rank < 32) return 3;
  return 1;
}

namespace detail {

// Appends `seq`, clipped to the remaining budget. Returns false once the
// budget is exhausted.
inline bool accumulate(DraftSet& set, TokenSeq seq, DraftOrigin origin,
                       std::size_t capacity) {
  const std::size_t used = set.token_count();
  if (used >= capacity) return false;
  if (seq.size() > capacity - used) seq.resize(capacity - used);
  if (seq.empty()) return true;
  if (std::find(set.sequences.begin(), set.sequences.end(), seq) ==
      set.sequences.end()) {
    set.sequences.push_back(std::move(seq));
    set.origins.push_back(origin);
  }
  return set.token_count() < capacity;
}

// Last m tokens of context ++ extra.
inline TokenSeq query_tail(std::span<const TokenId> context,
                           std::span<const TokenId> extra, std::size_t m) {
  ContextView view{context, extra};
  return view.suffix(std::min(m, view.size()));
}

}  // namespace detail

// Next-token retrieval only: one sequence per matched continuation.
inline DraftSet build_next_token_drafts(const NGramIndex& index,
                                        std::span<const TokenId> context,
                                        TokenId next_token, const DraftConfig& cfg,
                                        DraftStats* stats = nullptr) {
  DraftSet set;
  const TokenId extra[] = {next_token};
  TokenSeq query = detail::query_tail(context, extra, cfg.m_start);
  FallbackMatch fm = index.match_with_fallback(query, cfg.m_start, 1);
  if (stats) {
    stats->probes += fm.result.probes;
    stats->used_m = fm.used_m;
    stats->retrieval_hit = stats->retrieval_hit || fm.used_m > 0;
  }
  for (auto& cont : fm.result.continuations) {
    if (cont.size() > cfg.next_token_value_len) cont.resize(cfg.next_token_value_len);
    if (!detail::accumulate(set, std::move(cont), {DraftOrigin::Kind::kNextToken, 0},
                            cfg.capacity)) {
      break;
    }
  }
  return set;
}

/**
 * Full drafting: continuations for the next token first, then one sequence
 * per next-next candidate in rank order.
 *
 * A candidate query is the last m tokens of context ++ next ++ candidate and
 * never falls back below m = 2, so the candidate itself is always part of
 * the key. A candidate sequence is the candidate plus its most recent
 * continuation, cut to prune_budget(rank), or the bare candidate when
 * nothing matched. Accumulation clips the sequence that crosses the capacity
 * and stops there; exact duplicates are skipped.
 */
inline DraftSet build_draft(const NGramIndex& index, std::span<const TokenId> context,
                            TokenId next_token, const Distribution& last_dist,
                            const DraftConfig& cfg, DraftStats* stats = nullptr) {
  DraftSet set = build_next_token_drafts(index, context, next_token, cfg, stats);
  if (set.token_count() >= cfg.capacity) return set;

  for (const Candidate& c : speculate_next_next(last_dist, next_token, cfg.top_k)) {
    const TokenId extra[] = {next_token, c.token};
    TokenSeq query = detail::query_tail(context, extra, cfg.m_start);
    FallbackMatch fm = index.match_with_fallback(query, cfg.m_start,
                                                std::min<std::size_t>(2, cfg.m_start), 1);
    if (stats) {
      stats->probes += fm.result.probes;
      stats->retrieval_hit = stats->retrieval_hit || fm.used_m > 0;
    }
    TokenSeq seq{c.token};
    if (!fm.result.empty()) {
      const auto& cont = fm.result.continuations.front();
      seq.insert(seq.end(), cont.begin(), cont.end());
    }
    if (seq.size() > prune_budget(c.rank)) seq.resize(prune_budget(c.rank));
    if (!detail::accumulate(set, std::move(seq), {DraftOrigin::Kind::kCandidate, c.rank},
                            cfg.capacity)) {
      break;
    }
  }
  return set;
}

// Last-logit decoding: the top-k entries themselves, each a one-token guess
// at the next-next position.
inline DraftSet build_last_logit_drafts(const Distribution& last_dist, std::size_t k) {
  DraftSet set;
  std::size_t rank = 0;
  for (TokenId t : last_dist.top_k(k)) {
    set.sequences.push_back({t});
    set.origins.push_back({DraftOrigin::Kind::kLastLogit, rank++});
  }
  return set;
}

}  // namespace specdec
