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

#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "specdec/markov_model.hpp"
#include "specdec/model.hpp"
#include "specdec/scripted_model.hpp"
#include "specdec/tree_layout.hpp"
#include "test_support.hpp"

namespace specdec {
namespace {

TEST(MarkovModel, AddAlphaWithBackoff) {
  MarkovParams p;
  p.vocab = VocabSpec{4, 0};
  p.order = 2;
  p.alpha = 0.5;
  // Training on one sequence 1 2 3 1 2.
  auto m = MarkovTableModel::train(p, std::vector<TokenSeq>{{1, 2, 3, 1, 2}});
  // Context (1,2) was seen once followed by 3.
  auto d = m.next_distribution({TokenSeq{1, 2}, {}});
  EXPECT_NEAR(d[3], (1 + 0.5) / (1 + 0.5 * 4), 1e-12);
  EXPECT_NEAR(d[0], 0.5 / 3.0, 1e-12);
  // Context (0,2) unseen: backs off to (2), seen once followed by 3.
  auto b = m.next_distribution({TokenSeq{0, 2}, {}});
  EXPECT_EQ(b, d);
  // Context (0) unseen at both orders: unigram row, counts 1:2 2:2 3:1
  // (targets of every context position).
  auto u = m.next_distribution({TokenSeq{0}, {}});
  EXPECT_NEAR(u[1], (2 + 0.5) / (5 + 2.0), 1e-12);
  EXPECT_NEAR(u[3], (1 + 0.5) / (5 + 2.0), 1e-12);
}

TEST(MarkovModel, ExplicitCountsRoundTrip) {
  auto m = testing::seeded_markov(4, 16, 2);
  const std::string text = m.format_counts();
  MarkovTableModel back(m.params(), MarkovTableModel::parse_counts(text));
  EXPECT_EQ(back.format_counts(), text);
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    auto ctx = testing::random_seq(rng, rng.below(5), 16);
    EXPECT_EQ(back.next_distribution({ctx, {}}), m.next_distribution({ctx, {}}));
  }
  EXPECT_THROW(MarkovTableModel::parse_counts("1 2 -> x:3\n"), ParseError);
}

TEST(MarkovModel, SeededConstructionIsDeterministic) {
  EXPECT_EQ(testing::seeded_markov(3).format_counts(), testing::seeded_markov(3).format_counts());
  EXPECT_NE(testing::seeded_markov(3).format_counts(), testing::seeded_markov(4).format_counts());
  MarkovParams bad;
  bad.alpha = 0.0;
  EXPECT_THROW(bad.validate(), UsageError);
}

TEST(ScriptedModel, LongestSuffixWins) {
  ScriptedModel::Table t;
  t.emplace(TokenSeq{1}, Distribution({0, 1, 0}));
  t.emplace(TokenSeq{2, 1}, Distribution({0, 0, 1}));
  ScriptedModel m(VocabSpec{3, 0}, t, Distribution({1, 0, 0}));
  EXPECT_EQ(m.next_distribution({TokenSeq{0, 1}, {}}).argmax(), 1);
  EXPECT_EQ(m.next_distribution({TokenSeq{2}, TokenSeq{1}}).argmax(), 2);
  EXPECT_EQ(m.next_distribution({TokenSeq{2}, {}}).argmax(), 0);
}

TEST(ModelState, ForwardAndChecks) {
  auto m = testing::seeded_markov(1, 16);
  ModelState s(m);
  EXPECT_THROW(s.forward(TokenSeq{}), UsageError);
  EXPECT_THROW(s.forward(TokenSeq{16}), RangeError);
  auto d = s.forward(TokenSeq{3, 4, 5});
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[1], m.next_distribution({TokenSeq{3, 4}, {}}));
  EXPECT_EQ(s.size(), 3u);
  EXPECT_THROW(s.rollback(4), RangeError);
}

TEST(ModelState, TreeRowsMatchPathConditioning) {
  auto m = testing::random_scripted_model(8, 6);
  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    ModelState s(m);
    s.forward(testing::random_seq(rng, 1 + rng.below(6), 6));
    DraftSet set;
    for (std::size_t j = rng.below(9); j > 0; --j) {
      set.sequences.push_back(testing::random_seq(rng, 1 + rng.below(4), 6));
      set.origins.emplace_back();
    }
    const TokenId root = static_cast<TokenId>(rng.below(6));
    auto tree = prepare_attention_inputs(s.size(), root, set);
    auto rows = s.forward_tree(tree);
    auto brute = testing::brute_tree(s.size(), root, set.sequences);
    ASSERT_EQ(rows.size(), brute.paths.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      TokenSeq full = s.committed();
      full.insert(full.end(), brute.paths[r].begin(), brute.paths[r].end());
      EXPECT_EQ(rows[r], m.next_distribution({full, {}}));
    }
    const auto before = s.committed();
    EXPECT_EQ(s.committed(), before);  // forward_tree leaves the state alone
  }
}

TEST(ModelState, ForwardTreeRejectsStaleTree) {
  auto m = testing::seeded_markov(1, 16);
  ModelState s(m);
  s.forward(TokenSeq{1, 2});
  auto tree = prepare_attention_inputs(1, 3, DraftSet{});
  EXPECT_THROW(s.forward_tree(tree), StructureError);
}

// Random interleavings of forward / commit / rollback against a replay of
// the committed tokens from scratch.
TEST(ModelState, RollbackReplay) {
  auto m = testing::seeded_markov(2, 16);
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    ModelState s(m);
    TokenSeq shadow;
    s.forward(TokenSeq{1});
    shadow.push_back(1);
    for (int op = 0; op < 30; ++op) {
      const auto kind = rng.below(3);
      if (kind == 0) {
        auto t = testing::random_seq(rng, 1 + rng.below(4), 16);
        auto d = s.forward(t);
        shadow.insert(shadow.end(), t.begin(), t.end());
        EXPECT_EQ(d.back(), m.next_distribution({shadow, {}}));
      } else if (kind == 1) {
        auto t = testing::random_seq(rng, rng.below(4), 16);
        s.commit(t);
        shadow.insert(shadow.end(), t.begin(), t.end());
      } else {
        const std::size_t keep = rng.below(shadow.size() + 1);
        s.rollback(keep);
        shadow.resize(keep);
      }
      ASSERT_EQ(s.committed(), shadow);
    }
    ModelState replay(m);
    if (!shadow.empty()) {
      auto d = replay.forward(shadow);
      auto tree = prepare_attention_inputs(s.size(), 0, DraftSet{});
      EXPECT_EQ(s.forward_tree(tree)[0], replay.forward_tree(tree)[0]);
    }
  }
}

}  // namespace
}  // namespace specdec
