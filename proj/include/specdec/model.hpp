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
#include <span>
#include <string>
#include <vector>

#include "specdec/common.hpp"
#include "specdec/distribution.hpp"
#include "specdec/tree_layout.hpp"

namespace specdec {

/**
 * Target model contract: a deterministic next-token distribution for any
 * context. Implementations are immutable after construction and may be
 * shared read-only by any number of decode sessions.
 */
class TargetModel {
 public:
  virtual ~TargetModel() = default;
  virtual const VocabSpec& vocab() const = 0;
  virtual Distribution next_distribution(ContextView context) const = 0;
};

/**
 * Per-session model state: the tokens the model has consumed so far.
 *
 * Stands in for a KV cache. forward() consumes tokens, forward_tree()
 * evaluates a draft tree without consuming anything, commit() appends
 * tokens whose distributions were already produced by a tree pass, and
 * rollback() truncates. Not thread-safe; one owner at a time.
 */
class ModelState {
 public:
  explicit ModelState(const TargetModel& model) : model_(&model) {}

  const TargetModel& model() const { return *model_; }
  const TokenSeq& committed() const { return committed_; }
  std::size_t size() const { return committed_.size(); }

  // Distribution after committed ++ new_tokens[..=j] for every j. Advances.
  std::vector<Distribution> forward(std::span<const TokenId> new_tokens) {
    if (new_tokens.empty()) throw UsageError("forward() needs at least one token");
    model_->vocab().check_tokens(new_tokens);
    std::vector<Distribution> out;
    out.reserve(new_tokens.size());
    for (TokenId t : new_tokens) {
      committed_.push_back(t);
      out.push_back(model_->next_distribution({committed_, {}}));
    }
    return out;
  }

  /**
   * One distribution per tree row, each conditioned on the committed prefix
   * plus that row's ancestor path as read back from the mask. The state is
   * left untouched. Throws StructureError when the mask or the position ids
   * do not describe a tree rooted at row 0.
   */
  std::vector<Distribution> forward_tree(const DraftTree& tree) const {
    if (tree.draft_ids.empty()) throw StructureError("empty draft tree");
    if (tree.past_len != committed_.size()) {
      throw StructureError("tree past_len " + std::to_string(tree.past_len) +
                           " differs from committed length " +
                           std::to_string(committed_.size()));
    }
    model_->vocab().check_tokens(tree.draft_ids);
    const auto ancestors = ancestor_table(tree.mask);
    check_positions(tree, ancestors);
    std::vector<Distribution> out;
    out.reserve(tree.seq_len());
    TokenSeq path;
    for (std::size_t r = 0; r < tree.seq_len(); ++r) {
      path.clear();
      for (std::size_t a : ancestors[r]) path.push_back(tree.draft_ids[a]);
      out.push_back(model_->next_distribution({committed_, path}));
    }
    return out;
  }

  void commit(std::span<const TokenId> tokens) {
    model_->vocab().check_tokens(tokens);
    committed_.insert(committed_.end(), tokens.begin(), tokens.end());
  }

  void rollback(std::size_t keep_len) {
    if (keep_len > committed_.size()) {
      throw RangeError("rollback to " + std::to_string(keep_len) + " beyond committed length " +
                       std::to_string(committed_.size()));
    }
    committed_.resize(keep_len);
  }

 private:
  const TargetModel* model_;
  TokenSeq committed_;
};

}  // namespace specdec
