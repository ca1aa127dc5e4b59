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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "specdec/common.hpp"
#include "specdec/distribution.hpp"
#include "specdec/drafter.hpp"
#include "specdec/model.hpp"
#include "specdec/ngram_index.hpp"
#include "specdec/tree_layout.hpp"
#include "specdec/verifier.hpp"

namespace specdec {

enum class DecodeMode {
  kAutoregressive,  // one token per forward
  kLastLogit,       // top entries of the last logit as next-next guesses
  kRetrievalOnly,   // next-token retrieval only
  kLogitSpec,       // next-token retrieval plus candidate retrieval
};

inline std::string_view to_string(DecodeMode mode) {
  switch (mode) {
    case DecodeMode::kAutoregressive: return "autoregressive";
    case DecodeMode::kLastLogit: return "last_logit";
    case DecodeMode::kRetrievalOnly: return "retrieval_only";
    case DecodeMode::kLogitSpec: return "logitspec";
  }
  return "unknown";
}

inline DecodeMode parse_mode(std::string_view name) {
  for (DecodeMode m : {DecodeMode::kAutoregressive, DecodeMode::kLastLogit,
                       DecodeMode::kRetrievalOnly, DecodeMode::kLogitSpec}) {
    if (name == to_string(m)) return m;
  }
  throw UsageError("unknown decode mode '" + std::string(name) + "'");
}

inline bool uses_retrieval(DecodeMode mode) {
  return mode == DecodeMode::kRetrievalOnly || mode == DecodeMode::kLogitSpec;
}

struct DecodeConfig {
  DecodeMode mode = DecodeMode::kLogitSpec;
  std::size_t max_new_tokens = 128;
  double temperature = 0.0;
  std::uint64_t seed = 0;
  DraftConfig draft;
  std::size_t last_logit_k = 60;
  IndexOptions index;
  // Called with every tree before it is evaluated (debug dumps).
  std::function<void(const DraftTree&)> on_tree;

  void validate() const {
    if (max_new_tokens < 1) throw UsageError("max_new_tokens must be >= 1");
    if (!(temperature >= 0.0)) throw UsageError("temperature must be >= 0");
    if (last_logit_k < 1) throw UsageError("last_logit_k must be >= 1");
    draft.validate();
  }
};

// Operation counts per decode phase.
struct PhaseCounters {
  std::uint64_t retrieve = 0;  // hash probes
  std::uint64_t prepare = 0;   // tree rows laid out
  std::uint64_t forward = 0;   // model passes
  std::uint64_t verify = 0;    // draft tokens compared
  std::uint64_t update = 0;    // tokens added to the index

  PhaseCounters& operator+=(const PhaseCounters& o) {
    retrieve += o.retrieve;
    prepare += o.prepare;
    forward += o.forward;
    verify += o.verify;
    update += o.update;
    return *this;
  }
  bool operator==(const PhaseCounters&) const = default;
};

struct StepRecord {
  std::size_t accepted_len = 0;  // emitted tokens this step minus one
  std::size_t draft_size = 0;    // gamma
  bool retrieval_hit = false;
  std::size_t used_m = 0;
  // Rank of the token after the pending one within the last logit.
  std::optional<std::size_t> next_next_rank;
  PhaseCounters phases;

  bool operator==(const StepRecord&) const = default;
};

struct DecodeMetrics {
  std::size_t steps = 0;
  std::size_t tokens = 0;
  std::size_t retrieval_hits = 0;
  PhaseCounters phases;

  bool operator==(const DecodeMetrics&) const = default;
};

struct DecodeResult {
  DecodeMode mode = DecodeMode::kAutoregressive;
  TokenSeq tokens;  // generated only
  DecodeMetrics metrics;
  std::vector<StepRecord> steps;
};

/**
 * Runs one decode session.
 *
 * The prefill forward yields the first pending token together with the
 * distribution that produced it (the last logit). Each step then drafts
 * around the pending token, evaluates the tree in one pass, verifies,
 * commits pending ++ accepted and makes the bonus the new pending token.
 * Output stops at max_new_tokens or right after the first eos.
 */
inline DecodeResult decode(const TargetModel& model, std::span<const TokenId> prompt,
                           const DecodeConfig& cfg) {
  cfg.validate();
  if (prompt.empty()) throw UsageError("prompt must be non-empty");
  const VocabSpec& vocab = model.vocab();
  vocab.check_tokens(prompt);

  const double temp = cfg.temperature;
  auto target = [temp](const Distribution& d) {
    return (temp == 0.0 || temp == 1.0) ? d : apply_temperature(d, temp);
  };

  Rng rng(cfg.seed);
  ModelState state(model);
  Distribution last_dist = state.forward(prompt).back();
  TokenId pending = temp == 0.0 ? last_dist.argmax() : sample_categorical(target(last_dist), rng);

  const bool retrieval = uses_retrieval(cfg.mode);
  NGramIndex index(cfg.index);
  if (retrieval) index.extend(prompt);

  DecodeResult result;
  result.mode = cfg.mode;
  while (result.tokens.size() < cfg.max_new_tokens) {
    StepRecord rec;
    DraftStats stats;
    DraftSet drafts;
    switch (cfg.mode) {
      case DecodeMode::kAutoregressive:
        break;
      case DecodeMode::kLastLogit:
        drafts = build_last_logit_drafts(last_dist, cfg.last_logit_k);
        break;
      case DecodeMode::kRetrievalOnly:
        drafts = build_next_token_drafts(index, state.committed(), pending, cfg.draft, &stats);
        break;
      case DecodeMode::kLogitSpec:
        drafts = build_draft(index, state.committed(), pending, last_dist, cfg.draft, &stats);
        break;
    }
    rec.phases.retrieve = stats.probes;
    rec.retrieval_hit = stats.retrieval_hit;
    rec.used_m = stats.used_m;

    DraftTree tree = prepare_attention_inputs(state.size(), pending, drafts);
    rec.phases.prepare = tree.seq_len();
    rec.draft_size = tree.draft_count();
    if (cfg.on_tree) cfg.on_tree(tree);

    std::vector<Distribution> dists = state.forward_tree(tree);
    rec.phases.forward = 1;

    VerifyOutcome vo;
    if (temp == 0.0) {
      vo = verify_greedy(tree, dists);
    } else {
      std::vector<Distribution> tempered;
      tempered.reserve(dists.size());
      for (const auto& d : dists) tempered.push_back(target(d));
      vo = verify_stochastic(tree, tempered, rng);
      vo.next_dist = dists[vo.bonus_row];
    }
    rec.phases.verify = vo.comparisons;
    rec.next_next_rank = last_dist.rank_of(vo.accepted.empty() ? vo.bonus : vo.accepted.front());

    TokenSeq emitted{pending};
    emitted.insert(emitted.end(), vo.accepted.begin(), vo.accepted.end());
    bool hit_eos = false;
    if (auto eos = std::find(emitted.begin(), emitted.end(), vocab.eos); eos != emitted.end()) {
      emitted.erase(eos + 1, emitted.end());
      hit_eos = true;
    }
    const std::size_t room = cfg.max_new_tokens - result.tokens.size();
    if (emitted.size() > room) {
      emitted.resize(room);
      hit_eos = std::find(emitted.begin(), emitted.end(), vocab.eos) != emitted.end();
    }

    state.commit(emitted);
    if (retrieval) {
      index.extend(emitted);
      rec.phases.update = emitted.size();
    }
    result.tokens.insert(result.tokens.end(), emitted.begin(), emitted.end());
    rec.accepted_len = emitted.size() - 1;

    result.metrics.steps += 1;
    result.metrics.retrieval_hits += rec.retrieval_hit ? 1 : 0;
    result.metrics.phases += rec.phases;
    result.steps.push_back(rec);

    if (hit_eos) break;
    pending = vo.bonus;
    last_dist = std::move(vo.next_dist);
  }
  result.metrics.tokens = result.tokens.size();
  return result;
}

}  // namespace specdec
