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

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "specdec/common.hpp"
#include "specdec/distribution.hpp"
#include "specdec/tree_layout.hpp"

namespace specdec {

struct AcceptDecision {
  double alpha = 0.0;
  bool accepted = false;
};

struct VerifyOutcome {
  TokenSeq accepted;  // draft tokens kept, possibly none
  TokenId bonus = 0;  // always emitted after the accepted run
  std::optional<std::size_t> accepted_seq_index;
  std::size_t bonus_row = 0;  // tree row whose distribution produced bonus
  Distribution next_dist;     // target distribution at bonus_row
  std::size_t comparisons = 0;
};

// min(1, p[x] / q[x]). The draft must have been drawable from q.
inline double acceptance_prob(const Distribution& p, const Distribution& q, TokenId x) {
  if (p.size() != q.size()) throw UsageError("p and q differ in vocab size");
  if (!(q[x] > 0.0)) throw UsageError("draft token has zero draft probability");
  if (p[x] >= q[x]) return 1.0;
  return p[x] / q[x];
}

// norm(max(0, p - q)); nullopt when p <= q everywhere, in which case the
// caller resamples from p.
inline std::optional<Distribution> residual(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size()) throw UsageError("p and q differ in vocab size");
  std::vector<double> r(p.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = std::max(0.0, p.probs()[i] - q.probs()[i]);
    sum += r[i];
  }
  if (!(sum > 0.0)) return std::nullopt;
  return Distribution::normalized(std::move(r));
}

inline AcceptDecision accept_draft(const Distribution& p, const Distribution& q, TokenId x,
                                   Rng& rng) {
  AcceptDecision d;
  d.alpha = acceptance_prob(p, q, x);
  d.accepted = rng.uniform() < d.alpha;
  return d;
}

namespace detail {

inline void check_verify_inputs(const DraftTree& tree, std::span<const Distribution> dists) {
  if (dists.size() != tree.seq_len()) {
    throw UsageError("need one distribution per tree row");
  }
}

}  // namespace detail

/**
 * Greedy tree verification. g0 = argmax after the next token; every
 * sequence starting with g0 is walked while the argmax chain agrees, and the
 * longest run wins (lowest sequence index on ties). The bonus is the argmax
 * after the last accepted row, or g0 itself when nothing matched.
 */
inline VerifyOutcome verify_greedy(const DraftTree& tree, std::span<const Distribution> dists) {
  detail::check_verify_inputs(tree, dists);
  std::vector<TokenId> argmax(dists.size());
  for (std::size_t r = 0; r < dists.size(); ++r) argmax[r] = dists[r].argmax();

  VerifyOutcome out;
  std::size_t best_len = 0;
  std::size_t best_start = 0;
  std::size_t start = 1;
  for (std::size_t j = 0; j < tree.seq_lens.size(); ++j) {
    const std::size_t m = tree.seq_lens[j];
    std::size_t len = 0;
    while (len < m) {
      ++out.comparisons;
      const std::size_t parent = len == 0 ? 0 : start + len - 1;
      if (tree.draft_ids[start + len] != argmax[parent]) break;
      ++len;
    }
    if (len > best_len) {
      best_len = len;
      best_start = start;
      out.accepted_seq_index = j;
    }
    start += m;
  }
  const std::size_t last_row = best_len == 0 ? 0 : best_start + best_len - 1;
  out.accepted.assign(tree.draft_ids.begin() + static_cast<std::ptrdiff_t>(best_start),
                      tree.draft_ids.begin() + static_cast<std::ptrdiff_t>(best_start + best_len));
  out.bonus = argmax[last_row];
  out.bonus_row = last_row;
  out.next_dist = dists[last_row];
  return out;
}

/**
 * Stochastic tree verification for one-hot (deterministic) drafts.
 *
 * Sibling stage: first tokens are tried in sequence order against a working
 * distribution p', starting from the row-0 distribution. With q one-hot the
 * acceptance probability is p'[x]; a rejection replaces p' by
 * norm(max(0, p' - onehot(x))). After an acceptance the chosen sequence is
 * walked the same way, one position at a time. The bonus comes from the
 * residual at the first rejection, or from the target at the last accepted
 * row, or from the final p' when every sibling was rejected. Each emitted
 * token is therefore distributed exactly as the target.
 */
inline VerifyOutcome verify_stochastic(const DraftTree& tree, std::span<const Distribution> dists,
                                       Rng& rng) {
  detail::check_verify_inputs(tree, dists);
  const std::size_t v = dists[0].size();
  VerifyOutcome out;
  Distribution working = dists[0];
  std::size_t start = 1;
  for (std::size_t j = 0; j < tree.seq_lens.size(); ++j) {
    const std::size_t m = tree.seq_lens[j];
    const TokenId first = tree.draft_ids[start];
    const Distribution q = Distribution::one_hot(v, first);
    ++out.comparisons;
    if (!accept_draft(working, q, first, rng).accepted) {
      if (auto r = residual(working, q)) working = std::move(*r);
      start += m;
      continue;
    }
    out.accepted_seq_index = j;
    out.accepted.push_back(first);
    std::size_t row = start;
    for (std::size_t k = 1; k < m; ++k) {
      const TokenId y = tree.draft_ids[start + k];
      const Distribution qy = Distribution::one_hot(v, y);
      ++out.comparisons;
      if (!accept_draft(dists[row], qy, y, rng).accepted) {
        auto r = residual(dists[row], qy);
        out.bonus = sample_categorical(r ? *r : dists[row], rng);
        out.bonus_row = row;
        out.next_dist = dists[row];
        return out;
      }
      out.accepted.push_back(y);
      row = start + k;
    }
    out.bonus = sample_categorical(dists[row], rng);
    out.bonus_row = row;
    out.next_dist = dists[row];
    return out;
  }
  out.bonus = sample_categorical(working, rng);
  out.bonus_row = 0;
  out.next_dist = dists[0];
  return out;
}

}  // namespace specdec
