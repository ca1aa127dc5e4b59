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

#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "specdec/tree_layout.hpp"
#include "test_support.hpp"

namespace specdec {
namespace {

DraftSet make_set(std::vector<TokenSeq> seqs) {
  DraftSet s;
  s.sequences = std::move(seqs);
  s.origins.resize(s.sequences.size());
  return s;
}

std::vector<TokenSeq> random_sequences(Rng& rng, std::size_t max_seqs, std::size_t max_len) {
  std::vector<TokenSeq> seqs(rng.below(max_seqs + 1));
  for (auto& s : seqs) s = testing::random_seq(rng, 1 + rng.below(max_len), 12);
  return seqs;
}

TEST(TreeLayout, TwoSequenceTrace) {
  auto tree = prepare_attention_inputs(3, 100, make_set({{101, 102}, {103}}));
  ASSERT_EQ(tree.seq_len(), 4u);
  EXPECT_EQ(tree.mask.row_string(0), "1111000");
  EXPECT_EQ(tree.mask.row_string(1), "1111100");
  EXPECT_EQ(tree.mask.row_string(2), "1111110");
  EXPECT_EQ(tree.mask.row_string(3), "1111001");
  EXPECT_EQ(tree.position_ids, (PositionIds{3, 4, 5, 4}));
  EXPECT_EQ(tree.draft_ids, (TokenSeq{100, 101, 102, 103}));
  EXPECT_EQ(format_tree(tree), "3 4\n100 101 102 103\n3 4 5 4\n1111000\n1111100\n1111110\n1111001\n");
}

TEST(TreeLayout, EmptyDraftIsJustTheRoot) {
  auto tree = prepare_attention_inputs(5, 7, DraftSet{});
  EXPECT_EQ(tree.seq_len(), 1u);
  EXPECT_EQ(tree.draft_count(), 0u);
  EXPECT_EQ(tree.mask.row_string(0), "111111");
  EXPECT_EQ(tree.position_ids, (PositionIds{5}));
}

TEST(TreeLayout, MatchesBruteForceBuilder) {
  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t past = rng.below(6);
    auto seqs = random_sequences(rng, 6, 5);
    auto tree = prepare_attention_inputs(past, 1, make_set(seqs));
    auto brute = testing::brute_tree(past, 1, seqs);
    ASSERT_EQ(tree.seq_len(), brute.rows.size());
    for (std::size_t r = 0; r < tree.seq_len(); ++r) {
      EXPECT_EQ(tree.mask.row_string(r), brute.rows[r]);
    }
    EXPECT_EQ(tree.position_ids, brute.positions);
    EXPECT_EQ(tree.seq_lens.size(), seqs.size());
  }
}

TEST(TreeLayout, PathsRoundTrip) {
  Rng rng(6);
  for (int trial = 0; trial < 1000; ++trial) {
    auto seqs = random_sequences(rng, 8, 6);
    auto tree = prepare_attention_inputs(rng.below(4), 0, make_set(seqs));
    std::vector<TokenSeq> want;
    for (const auto& s : seqs) {
      TokenSeq p{0};
      p.insert(p.end(), s.begin(), s.end());
      want.push_back(p);
    }
    if (want.empty()) want.push_back({0});
    EXPECT_EQ(paths_from_mask(tree), want);
    auto anc = ancestor_table(tree.mask);
    EXPECT_NO_THROW(check_positions(tree, anc));
  }
}

TEST(TreeLayout, AncestorTableRejectsNonTrees) {
  auto tree = prepare_attention_inputs(2, 0, make_set({{1, 2}, {3}}));
  {
    auto bad = tree;
    bad.mask.set(3, 2);  // sees row 2 but skips its parent row 1
    EXPECT_THROW(ancestor_table(bad.mask), StructureError);
  }
  {
    // Row 3 hung under row 1 is still a tree, just not block-diagonal.
    auto other = tree;
    other.mask.set(3, 1);
    other.position_ids[3] = 4;
    EXPECT_EQ(ancestor_table(other.mask)[3], (std::vector<std::size_t>{0, 1, 3}));
    EXPECT_THROW(paths_from_mask(other), StructureError);
  }
  {
    auto bad = tree;
    bad.mask.set(2, 0, false);  // lost the root
    EXPECT_THROW(ancestor_table(bad.mask), StructureError);
  }
  {
    auto bad = tree;
    bad.mask.set(2, 2, false);  // cannot see itself
    EXPECT_THROW(ancestor_table(bad.mask), StructureError);
  }
  {
    auto bad = tree;
    bad.mask.set(0, 1);  // root sees a later row
    EXPECT_THROW(ancestor_table(bad.mask), StructureError);
  }
  {
    auto bad = tree;
    bad.position_ids[2] = 9;
    EXPECT_THROW(check_positions(bad, ancestor_table(bad.mask)), StructureError);
  }
}

}  // namespace
}  // namespace specdec
