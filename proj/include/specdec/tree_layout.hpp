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
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "specdec/common.hpp"
#include "specdec/drafter.hpp"

namespace specdec {

/**
 * Visibility matrix of shape seq_len x (past_len + seq_len).
 *
 * Only the seq_len x seq_len draft block is stored. Columns below past_len
 * (the committed context) are visible to every row by construction.
 */
class AttentionMask {
 public:
  AttentionMask() = default;
  AttentionMask(std::size_t past_len, std::size_t seq_len)
      : past_len_(past_len), seq_len_(seq_len), block_(seq_len * seq_len, 0) {}

  std::size_t rows() const { return seq_len_; }
  std::size_t cols() const { return past_len_ + seq_len_; }
  std::size_t past_len() const { return past_len_; }

  bool at(std::size_t row, std::size_t col) const {
    if (col < past_len_) return true;
    return block_[row * seq_len_ + (col - past_len_)] != 0;
  }

  // Row `row` attends to draft row `draft_col`.
  bool sees(std::size_t row, std::size_t draft_col) const {
    return block_[row * seq_len_ + draft_col] != 0;
  }
  void set(std::size_t row, std::size_t draft_col, bool v = true) {
    block_[row * seq_len_ + draft_col] = v ? 1 : 0;
  }

  std::string row_string(std::size_t row) const {
    std::string s(cols(), '0');
    for (std::size_t c = 0; c < cols(); ++c) s[c] = at(row, c) ? '1' : '0';
    return s;
  }

  bool operator==(const AttentionMask&) const = default;

 private:
  std::size_t past_len_ = 0;
  std::size_t seq_len_ = 0;
  std::vector<std::uint8_t> block_;
};

using PositionIds = std::vector<std::int64_t>;

struct DraftTree {
  std::size_t past_len = 0;
  TokenSeq draft_ids;                 // next token, then every sequence
  std::vector<std::size_t> seq_lens;  // m_j per sequence
  AttentionMask mask;
  PositionIds position_ids;
  std::vector<DraftOrigin> origins;

  std::size_t seq_len() const { return draft_ids.size(); }
  std::size_t draft_count() const { return draft_ids.size() - 1; }  // gamma

  // First row of sequence j.
  std::size_t seq_start(std::size_t j) const {
    std::size_t start = 1;
    for (std::size_t i = 0; i < j; ++i) start += seq_lens[i];
    return start;
  }
};

// Flattens the draft set behind the next token. Every row sees the past and
// the next token; each sequence sees its own causal prefix only.
inline DraftTree prepare_attention_inputs(std::size_t past_len, TokenId next_token,
                                          const DraftSet& draft_set) {
  DraftTree tree;
  tree.past_len = past_len;
  tree.origins = draft_set.origins;
  tree.draft_ids.push_back(next_token);
  for (const auto& sub : draft_set.sequences) {
    tree.draft_ids.insert(tree.draft_ids.end(), sub.begin(), sub.end());
    tree.seq_lens.push_back(sub.size());
  }
  const std::size_t seq_len = tree.draft_ids.size();
  tree.mask = AttentionMask(past_len, seq_len);
  tree.position_ids.assign(seq_len, 0);
  for (std::size_t r = 0; r < seq_len; ++r) tree.mask.set(r, 0);

  std::size_t idx = 1;
  for (std::size_t l : tree.seq_lens) {
    for (std::size_t i = 0; i < l; ++i) {
      for (std::size_t j = 0; j <= i; ++j) tree.mask.set(idx + i, idx + j);
      tree.position_ids[idx + i] = static_cast<std::int64_t>(i + 1);
    }
    idx += l;
  }
  for (auto& p : tree.position_ids) p += static_cast<std::int64_t>(past_len);
  return tree;
}

/**
 * For every row, the draft rows it sees in ascending order, checked to be
 * exactly its ancestor chain: row 0 sees only itself, and every other row
 * sees its parent's set plus itself, where the parent is the nearest
 * visible row above it. Throws StructureError otherwise.
 */
inline std::vector<std::vector<std::size_t>> ancestor_table(const AttentionMask& mask) {
  const std::size_t n = mask.rows();
  std::vector<std::vector<std::size_t>> table(n);
  for (std::size_t r = 0; r < n; ++r) {
    auto& vis = table[r];
    for (std::size_t c = 0; c < n; ++c) {
      if (mask.sees(r, c)) vis.push_back(c);
    }
    auto fail = [r](const std::string& why) {
      throw StructureError("mask row " + std::to_string(r) + ": " + why);
    };
    if (vis.empty() || vis.front() != 0) fail("does not see the next token");
    if (vis.back() != r) fail("does not see itself or sees a later row");
    if (r == 0) continue;
    if (vis.size() < 2) fail("draft row sees only itself");
    const auto& parent = table[vis[vis.size() - 2]];
    if (parent.size() + 1 != vis.size() ||
        !std::equal(parent.begin(), parent.end(), vis.begin())) {
      fail("sees a row that is not an ancestor");
    }
  }
  return table;
}

// Depth-consistent position ids, checked against the mask.
inline void check_positions(const DraftTree& tree,
                            const std::vector<std::vector<std::size_t>>& ancestors) {
  if (tree.position_ids.size() != tree.seq_len() || tree.mask.rows() != tree.seq_len() ||
      tree.mask.past_len() != tree.past_len) {
    throw StructureError("tree payload sizes disagree");
  }
  for (std::size_t r = 0; r < tree.seq_len(); ++r) {
    const auto depth = ancestors[r].size() - 1;
    if (tree.position_ids[r] != static_cast<std::int64_t>(tree.past_len + depth)) {
      throw StructureError("position id of row " + std::to_string(r) +
                           " does not match its depth");
    }
  }
}

// Root-to-leaf token paths recovered from the mask alone. Requires the
// block-diagonal layout: each row's parent is the row right above it or the
// next token.
inline std::vector<TokenSeq> paths_from_mask(const DraftTree& tree) {
  const std::size_t n = tree.seq_len();
  if (tree.mask.rows() != n) throw StructureError("mask height differs from draft ids");
  const auto anc = ancestor_table(tree.mask);
  std::vector<bool> is_parent(n, false);
  for (std::size_t r = 1; r < n; ++r) {
    const std::size_t parent = anc[r][anc[r].size() - 2];
    if (parent != 0 && parent != r - 1) {
      throw StructureError("row " + std::to_string(r) + " is not block-diagonal");
    }
    is_parent[parent] = true;
  }
  std::vector<TokenSeq> paths;
  for (std::size_t r = 0; r < n; ++r) {
    if (is_parent[r]) continue;
    TokenSeq path;
    for (std::size_t a : anc[r]) path.push_back(tree.draft_ids[a]);
    paths.push_back(std::move(path));
  }
  return paths;
}

// "past_len seq_len", draft ids, position ids, then one 0/1 row per token.
inline std::string format_tree(const DraftTree& tree) {
  std::ostringstream os;
  os << tree.past_len << ' ' << tree.seq_len() << '\n';
  for (std::size_t i = 0; i < tree.draft_ids.size(); ++i) {
    os << (i ? " " : "") << tree.draft_ids[i];
  }
  os << '\n';
  for (std::size_t i = 0; i < tree.position_ids.size(); ++i) {
    os << (i ? " " : "") << tree.position_ids[i];
  }
  os << '\n';
  for (std::size_t r = 0; r < tree.seq_len(); ++r) os << tree.mask.row_string(r) << '\n';
  return os.str();
}

}  // namespace specdec
