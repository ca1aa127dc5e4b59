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

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "specdec/common.hpp"
#include "specdec/engine.hpp"

namespace specdec {

// Mean accepted tokens per verification forward; the prefill is not counted.
inline double mat(const DecodeResult& result) {
  if (result.metrics.steps == 0) throw UsageError("mat() of a run with no steps");
  return static_cast<double>(result.metrics.tokens) / static_cast<double>(result.metrics.steps);
}

// Fraction of steps where at least one retrieval query matched.
inline double retrieval_success_rate(const DecodeResult& result) {
  if (!uses_retrieval(result.mode)) {
    throw UsageError("retrieval_success_rate() of a mode without retrieval");
  }
  if (result.metrics.steps == 0) throw UsageError("retrieval_success_rate() of an empty run");
  return static_cast<double>(result.metrics.retrieval_hits) /
         static_cast<double>(result.metrics.steps);
}

/**
 * Cumulative counts of next-next ranks. cumulative[i] counts steps whose
 * 1-based rank is <= kBucketLimits[i]; the trailing "rest" bucket is total.
 */
struct RankHistogram {
  static constexpr std::array<std::size_t, 7> kBucketLimits{1, 2, 4, 8, 16, 32, 60};

  std::array<std::size_t, kBucketLimits.size()> cumulative{};
  std::size_t total = 0;

  void add(std::size_t rank0) {
    ++total;
    for (std::size_t i = 0; i < kBucketLimits.size(); ++i) {
      if (rank0 + 1 <= kBucketLimits[i]) ++cumulative[i];
    }
  }

  std::vector<double> fractions() const {
    std::vector<double> out;
    for (std::size_t c : cumulative) {
      out.push_back(total == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(total));
    }
    out.push_back(total == 0 ? 0.0 : 1.0);
    return out;
  }

  bool operator==(const RankHistogram&) const = default;
};

inline RankHistogram rank_histogram(std::span<const DecodeResult> results) {
  RankHistogram h;
  for (const auto& r : results) {
    for (const auto& s : r.steps) {
      if (s.next_next_rank) h.add(*s.next_next_rank);
    }
  }
  return h;
}

}  // namespace specdec
