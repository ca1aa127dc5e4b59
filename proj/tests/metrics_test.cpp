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

#include <vector>

#include <gtest/gtest.h>

#include "specdec/metrics.hpp"

namespace specdec {
namespace {

DecodeResult fake(DecodeMode mode, std::vector<std::size_t> accepted, std::vector<bool> hits) {
  DecodeResult r;
  r.mode = mode;
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    StepRecord s;
    s.accepted_len = accepted[i];
    s.retrieval_hit = hits[i];
    s.next_next_rank = i * 10;
    r.steps.push_back(s);
    r.metrics.steps += 1;
    r.metrics.tokens += accepted[i] + 1;
    r.metrics.retrieval_hits += hits[i];
  }
  return r;
}

TEST(Metrics, MatIsTokensPerStep) {
  auto r = fake(DecodeMode::kLogitSpec, {0, 3, 1, 0}, {false, true, true, false});
  EXPECT_DOUBLE_EQ(mat(r), 8.0 / 4.0);
  EXPECT_DOUBLE_EQ(retrieval_success_rate(r), 0.5);
  EXPECT_THROW(mat(DecodeResult{}), UsageError);
  auto ar = fake(DecodeMode::kAutoregressive, {0, 0}, {false, false});
  EXPECT_DOUBLE_EQ(mat(ar), 1.0);
  EXPECT_THROW(retrieval_success_rate(ar), UsageError);
}

TEST(Metrics, RankBucketsAreCumulative) {
  RankHistogram h;
  h.add(0);   // rank 1
  h.add(1);   // rank 2
  h.add(7);   // rank 8
  h.add(59);  // rank 60
  h.add(60);  // rest
  EXPECT_EQ(h.total, 5u);
  EXPECT_EQ(h.cumulative, (std::array<std::size_t, 7>{1, 2, 2, 3, 3, 3, 4}));
  auto f = h.fractions();
  ASSERT_EQ(f.size(), 8u);
  EXPECT_DOUBLE_EQ(f[0], 0.2);
  EXPECT_DOUBLE_EQ(f[6], 0.8);
  EXPECT_DOUBLE_EQ(f[7], 1.0);
  for (std::size_t i = 1; i < f.size(); ++i) EXPECT_GE(f[i], f[i - 1]);
}

TEST(Metrics, HistogramOverResults) {
  std::vector<DecodeResult> rs{fake(DecodeMode::kLogitSpec, {0, 0, 0}, {0, 0, 0}),
                               fake(DecodeMode::kLogitSpec, {0}, {0})};
  auto h = rank_histogram(rs);
  EXPECT_EQ(h.total, 4u);
  EXPECT_EQ(h.cumulative[0], 2u);   // two rank-0 steps
  EXPECT_EQ(h.cumulative[4], 3u);   // ranks 0, 0, 10 are within 16
  EXPECT_EQ(h.cumulative[5], 4u);
}

}  // namespace
}  // namespace specdec
