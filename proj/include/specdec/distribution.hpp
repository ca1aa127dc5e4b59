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
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "specdec/common.hpp"

namespace specdec {

/**
 * Normalized next-token probabilities over the whole vocabulary.
 *
 * Entries are non-negative and sum to 1 within kSumTolerance. Models in this
 * library hand out post-softmax probabilities, never raw scores; acceptance
 * and candidate ranking only need probabilities and their order.
 */
class Distribution {
 public:
  static constexpr double kSumTolerance = 1e-9;

  Distribution() = default;

  // Validates an already-normalized vector.
  explicit Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw UsageError("distribution over an empty vocab");
    double sum = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw UsageError("distribution entry is negative or not finite");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
      throw UsageError("distribution sums to " + std::to_string(sum));
    }
  }

  // Divides non-negative weights by their sum.
  static Distribution normalized(std::vector<double> weights) {
    double sum = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw UsageError("weight is negative or not finite");
      }
      sum += w;
    }
    if (!(sum > 0.0)) throw UsageError("weights sum to zero");
    for (double& w : weights) w /= sum;
    return Distribution(std::move(weights));
  }

  static Distribution uniform(std::size_t n) {
    return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  static Distribution one_hot(std::size_t n, TokenId t) {
    if (t < 0 || static_cast<std::size_t>(t) >= n) {
      throw RangeError("one-hot token outside vocab");
    }
    std::vector<double> v(n, 0.0);
    v[static_cast<std::size_t>(t)] = 1.0;
    return Distribution(std::move(v));
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](TokenId t) const { return probs_[static_cast<std::size_t>(t)]; }
  const std::vector<double>& probs() const { return probs_; }

  bool operator==(const Distribution&) const = default;

  // Lowest id wins ties.
  TokenId argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < probs_.size(); ++i) {
      if (probs_[i] > probs_[best]) best = i;
    }
    return static_cast<TokenId>(best);
  }

  // Token ids by descending probability, ties broken by lower id.
  std::vector<TokenId> top_k(std::size_t k) const {
    std::vector<TokenId> ids(probs_.size());
    std::iota(ids.begin(), ids.end(), 0);
    k = std::min(k, ids.size());
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(k),
                      ids.end(), [this](TokenId a, TokenId b) {
                        return ranks_before(a, b);
                      });
    ids.resize(k);
    return ids;
  }

  // 0-based position of `t` in the descending order used by top_k().
  std::size_t rank_of(TokenId t) const {
    std::size_t r = 0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      if (ranks_before(static_cast<TokenId>(i), t)) ++r;
    }
    return r;
  }

 private:
  bool ranks_before(TokenId a, TokenId b) const {
    double pa = (*this)[a];
    double pb = (*this)[b];
    return pa > pb || (pa == pb && a < b);
  }

  std::vector<double> probs_;
};

// p^(1/T) renormalized. T == 1 returns the input unchanged; T == 0 is greedy
// and is handled by the callers, not here.
inline Distribution apply_temperature(const Distribution& dist, double temperature) {
  if (!(temperature > 0.0)) throw UsageError("temperature must be > 0 here");
  if (temperature == 1.0) return dist;
  std::vector<double> w(dist.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::pow(dist.probs()[i], 1.0 / temperature);
  }
  return Distribution::normalized(std::move(w));
}

// Exact categorical draw by inverse CDF.
inline TokenId sample_categorical(const Distribution& dist, Rng& rng) {
  double u = rng.uniform();
  double acc = 0.0;
  TokenId last_nonzero = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    double p = dist.probs()[i];
    if (p <= 0.0) continue;
    last_nonzero = static_cast<TokenId>(i);
    acc += p;
    if (u < acc) return last_nonzero;
  }
  return last_nonzero;
}

// Temperature 0 is argmax with the lowest-id tie-break.
inline TokenId sample(const Distribution& dist, double temperature, Rng& rng) {
  if (temperature < 0.0) throw UsageError("temperature must be >= 0");
  if (temperature == 0.0) return dist.argmax();
  return sample_categorical(apply_temperature(dist, temperature), rng);
}

}  // namespace specdec
