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
#include <map>
#include <utility>

#include "specdec/common.hpp"
#include "specdec/distribution.hpp"
#include "specdec/model.hpp"

namespace specdec {

// Table-driven model for tests: the longest table key that is a suffix of
// the context decides the distribution, otherwise `fallback` applies.
class ScriptedModel final : public TargetModel {
 public:
  using Table = std::map<TokenSeq, Distribution>;

  ScriptedModel(VocabSpec vocab, Table table, Distribution fallback)
      : vocab_(vocab), table_(std::move(table)), fallback_(std::move(fallback)) {
    vocab_.validate();
    check(fallback_);
    for (const auto& [ctx, dist] : table_) {
      vocab_.check_tokens(ctx);
      check(dist);
      longest_key_ = std::max(longest_key_, ctx.size());
    }
  }

  const VocabSpec& vocab() const override { return vocab_; }

  Distribution next_distribution(ContextView context) const override {
    for (std::size_t len = std::min(longest_key_, context.size()) + 1; len-- > 0;) {
      auto it = table_.find(context.suffix(len));
      if (it != table_.end()) return it->second;
    }
    return fallback_;
  }

 private:
  void check(const Distribution& d) const {
    if (d.size() != static_cast<std::size_t>(vocab_.size)) {
      throw UsageError("scripted distribution size differs from vocab size");
    }
  }

  VocabSpec vocab_;
  Table table_;
  Distribution fallback_;
  std::size_t longest_key_ = 0;
};

}  // namespace specdec
