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
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "specdec/corpus.hpp"
#include "specdec/engine.hpp"
#include "specdec/metrics.hpp"
#include "specdec/model.hpp"

namespace specdec {

inline constexpr const char* kToolVersion = "0.1.0";

struct PromptRow {
  std::size_t index = 0;
  std::size_t steps = 0;
  std::size_t tokens = 0;
  std::size_t retrieval_hits = 0;
  RankHistogram ranks;
  PhaseCounters phases;
  TokenSeq output;
  std::optional<bool> matches_reference;  // set under --compare
};

struct ModeReport {
  DecodeMode mode = DecodeMode::kLogitSpec;
  std::vector<PromptRow> rows;  // ordered by prompt index
  bool lossless_checked = false;
  std::size_t mismatches = 0;
};

struct BenchOptions {
  std::vector<DecodeMode> modes{DecodeMode::kLogitSpec};
  DecodeConfig base;         // mode and seed are overwritten per session
  std::size_t jobs = 1;
  bool compare = false;      // greedy only: check every mode against autoregressive output
  bool capture_trees = false;
  std::size_t dump_prompt = 0;
  std::string model_path;    // echoed only
  std::string corpus_path;   // echoed only
};

struct Mismatch {
  DecodeMode mode;
  std::size_t prompt = 0;
  std::size_t position = 0;  // first diverging output position
  std::optional<TokenId> expected;
  std::optional<TokenId> got;
};

struct BenchOutput {
  std::vector<ModeReport> modes;
  std::vector<Mismatch> mismatches;
  std::vector<std::string> tree_dumps;  // per mode, for options.dump_prompt
  std::vector<TokenSeq> dump_outputs;   // per mode, output of dump_prompt
};

// Session seeds depend on (seed, prompt index) only, so every mode sees the
// same random stream for a given prompt and thread scheduling never matters.
inline std::uint64_t session_seed(std::uint64_t seed, std::size_t prompt_index) {
  return mix_seed(seed, prompt_index);
}

inline std::vector<DecodeResult> decode_corpus(const TargetModel& model, const Corpus& corpus,
                                               const DecodeConfig& cfg, std::size_t jobs,
                                               std::optional<std::size_t> trace_prompt = {},
                                               std::string* trace = nullptr) {
  const std::size_t n = corpus.sequences.size();
  std::vector<DecodeResult> results(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        DecodeConfig session = cfg;
        session.seed = session_seed(cfg.seed, i);
        if (trace && trace_prompt && *trace_prompt == i) {
          session.on_tree = [trace](const DraftTree& t) { *trace += format_tree(t) + "\n"; };
        }
        results[i] = decode(model, corpus.sequences[i], session);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return results;
}

inline PromptRow summarize(std::size_t index, const DecodeResult& r) {
  PromptRow row;
  row.index = index;
  row.steps = r.metrics.steps;
  row.tokens = r.metrics.tokens;
  row.retrieval_hits = r.metrics.retrieval_hits;
  row.ranks = rank_histogram(std::span(&r, 1));
  row.phases = r.metrics.phases;
  row.output = r.tokens;
  return row;
}

inline std::optional<Mismatch> first_divergence(DecodeMode mode, std::size_t prompt,
                                                const TokenSeq& expected, const TokenSeq& got) {
  const std::size_t n = std::min(expected.size(), got.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (expected[i] != got[i]) return Mismatch{mode, prompt, i, expected[i], got[i]};
  }
  if (expected.size() == got.size()) return std::nullopt;
  Mismatch m{mode, prompt, n, std::nullopt, std::nullopt};
  if (n < expected.size()) m.expected = expected[n];
  if (n < got.size()) m.got = got[n];
  return m;
}

inline BenchOutput run_bench(const TargetModel& model, const Corpus& corpus,
                             const BenchOptions& opts) {
  if (opts.modes.empty()) throw UsageError("no decode modes requested");
  // Sampled outputs are only equal in distribution, never token by token.
  if (opts.compare && opts.base.temperature != 0.0) {
    throw UsageError("output comparison needs temperature 0");
  }
  for (const auto& p : corpus.sequences) model.vocab().check_tokens(p);

  BenchOutput out;
  std::optional<std::vector<DecodeResult>> reference;
  auto reference_outputs = [&]() -> const std::vector<DecodeResult>& {
    if (!reference) {
      DecodeConfig cfg = opts.base;
      cfg.mode = DecodeMode::kAutoregressive;
      reference = decode_corpus(model, corpus, cfg, opts.jobs);
    }
    return *reference;
  };

  for (DecodeMode mode : opts.modes) {
    DecodeConfig cfg = opts.base;
    cfg.mode = mode;
    std::string trace;
    auto results = decode_corpus(model, corpus, cfg, opts.jobs,
                                 opts.capture_trees ? std::optional(opts.dump_prompt)
                                                    : std::nullopt,
                                 &trace);
    if (mode == DecodeMode::kAutoregressive && !reference) reference = results;

    ModeReport report;
    report.mode = mode;
    report.lossless_checked = opts.compare;
    for (std::size_t i = 0; i < results.size(); ++i) {
      report.rows.push_back(summarize(i, results[i]));
    }
    if (opts.compare) {
      const auto& ref = reference_outputs();
      for (std::size_t i = 0; i < results.size(); ++i) {
        auto mm = first_divergence(mode, i, ref[i].tokens, results[i].tokens);
        report.rows[i].matches_reference = !mm.has_value();
        if (mm) {
          ++report.mismatches;
          out.mismatches.push_back(*mm);
        }
      }
    }
    out.tree_dumps.push_back(std::move(trace));
    out.dump_outputs.push_back(opts.dump_prompt < results.size()
                                   ? results[opts.dump_prompt].tokens
                                   : TokenSeq{});
    out.modes.push_back(std::move(report));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Report document

namespace detail {

inline nlohmann::ordered_json phases_json(const PhaseCounters& p) {
  nlohmann::ordered_json j;
  j["retrieve"] = p.retrieve;
  j["prepare"] = p.prepare;
  j["forward"] = p.forward;
  j["verify"] = p.verify;
  j["update"] = p.update;
  return j;
}

inline PhaseCounters phases_from_json(const nlohmann::json& j) {
  PhaseCounters p;
  p.retrieve = j.at("retrieve").get<std::uint64_t>();
  p.prepare = j.at("prepare").get<std::uint64_t>();
  p.forward = j.at("forward").get<std::uint64_t>();
  p.verify = j.at("verify").get<std::uint64_t>();
  p.update = j.at("update").get<std::uint64_t>();
  return p;
}

inline nlohmann::ordered_json rank_cdf_json(const RankHistogram& h) {
  auto cdf = nlohmann::ordered_json::array();
  const auto fr = h.fractions();
  for (std::size_t i = 0; i < RankHistogram::kBucketLimits.size(); ++i) {
    cdf.push_back({RankHistogram::kBucketLimits[i], fr[i]});
  }
  cdf.push_back({"rest", fr.back()});
  return cdf;
}

inline nlohmann::ordered_json rank_counts_json(const RankHistogram& h) {
  auto a = nlohmann::ordered_json::array();
  for (std::size_t c : h.cumulative) a.push_back(c);
  a.push_back(h.total);
  return a;
}

inline RankHistogram rank_counts_from_json(const nlohmann::json& j) {
  RankHistogram h;
  if (!j.is_array() || j.size() != h.cumulative.size() + 1) {
    throw ParseError("rank_counts has the wrong length");
  }
  for (std::size_t i = 0; i < h.cumulative.size(); ++i) h.cumulative[i] = j[i].get<std::size_t>();
  h.total = j.back().get<std::size_t>();
  return h;
}

struct Aggregate {
  std::size_t prompts = 0, steps = 0, tokens = 0, hits = 0;
  RankHistogram ranks;
  PhaseCounters phases;

  void add(std::size_t s, std::size_t t, std::size_t h, const RankHistogram& r,
           const PhaseCounters& p) {
    ++prompts;
    steps += s;
    tokens += t;
    hits += h;
    for (std::size_t i = 0; i < ranks.cumulative.size(); ++i) ranks.cumulative[i] += r.cumulative[i];
    ranks.total += r.total;
    phases += p;
  }
  double mat() const { return steps ? static_cast<double>(tokens) / static_cast<double>(steps) : 0.0; }
  double rate() const { return steps ? static_cast<double>(hits) / static_cast<double>(steps) : 0.0; }
};

}  // namespace detail

inline nlohmann::ordered_json report_json(const BenchOutput& bench, const BenchOptions& opts) {
  nlohmann::ordered_json doc;
  doc["tool"] = "specdec";
  doc["version"] = kToolVersion;
  nlohmann::ordered_json cfg;
  cfg["model"] = opts.model_path;
  cfg["corpus"] = opts.corpus_path;
  auto modes = nlohmann::ordered_json::array();
  for (DecodeMode m : opts.modes) modes.push_back(std::string(to_string(m)));
  cfg["modes"] = modes;
  cfg["max_new_tokens"] = opts.base.max_new_tokens;
  cfg["temperature"] = opts.base.temperature;
  cfg["seed"] = opts.base.seed;
  cfg["top_k"] = opts.base.draft.top_k;
  cfg["capacity"] = opts.base.draft.capacity;
  cfg["m_start"] = opts.base.draft.m_start;
  cfg["next_token_value_len"] = opts.base.draft.next_token_value_len;
  cfg["last_logit_k"] = opts.base.last_logit_k;
  cfg["m_max"] = opts.base.index.m_max;
  cfg["value_len"] = opts.base.index.value_len;
  cfg["max_matches"] = opts.base.index.max_matches;
  cfg["compare"] = opts.compare;
  doc["config"] = cfg;

  auto runs = nlohmann::ordered_json::array();
  for (const auto& mr : bench.modes) {
    detail::Aggregate agg;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : mr.rows) {
      agg.add(r.steps, r.tokens, r.retrieval_hits, r.ranks, r.phases);
      nlohmann::ordered_json row;
      row["prompt"] = r.index;
      row["steps"] = r.steps;
      row["tokens"] = r.tokens;
      row["mat"] = r.steps ? static_cast<double>(r.tokens) / static_cast<double>(r.steps) : 0.0;
      row["retrieval_hits"] = r.retrieval_hits;
      row["rank_counts"] = detail::rank_counts_json(r.ranks);
      row["phase_counters"] = detail::phases_json(r.phases);
      if (r.matches_reference) row["matches_reference"] = *r.matches_reference;
      row["output"] = r.output;
      rows.push_back(std::move(row));
    }
    nlohmann::ordered_json run;
    run["mode"] = std::string(to_string(mr.mode));
    run["prompts"] = agg.prompts;
    run["steps"] = agg.steps;
    run["tokens"] = agg.tokens;
    run["mat"] = agg.mat();
    run["retrieval_success_rate"] =
        uses_retrieval(mr.mode) ? nlohmann::ordered_json(agg.rate()) : nlohmann::ordered_json();
    run["rank_cdf"] = detail::rank_cdf_json(agg.ranks);
    run["phase_counters"] = detail::phases_json(agg.phases);
    nlohmann::ordered_json lossless;
    lossless["checked"] = mr.lossless_checked;
    lossless["mismatches"] = mr.mismatches;
    run["losslessness"] = lossless;
    run["per_prompt"] = std::move(rows);
    runs.push_back(std::move(run));
  }
  doc["runs"] = std::move(runs);
  return doc;
}

// Recomputes every aggregate from the per-prompt rows. Returns a list of
// human-readable discrepancies, empty when the report is consistent.
inline std::vector<std::string> check_report(const nlohmann::json& doc) {
  std::vector<std::string> problems;
  try {
    for (const auto& run : doc.at("runs")) {
      const std::string mode = run.at("mode").get<std::string>();
      detail::Aggregate agg;
      std::size_t mismatches = 0;
      for (const auto& row : run.at("per_prompt")) {
        const auto steps = row.at("steps").get<std::size_t>();
        const auto tokens = row.at("tokens").get<std::size_t>();
        agg.add(steps, tokens, row.at("retrieval_hits").get<std::size_t>(),
                detail::rank_counts_from_json(row.at("rank_counts")),
                detail::phases_from_json(row.at("phase_counters")));
        if (row.at("output").size() != tokens) {
          problems.push_back(mode + ": prompt " + row.at("prompt").dump() +
                             " output length differs from tokens");
        }
        if (row.contains("matches_reference") && !row["matches_reference"].get<bool>()) {
          ++mismatches;
        }
      }
      auto expect = [&](const char* field, const nlohmann::json& want) {
        if (run.at(field) != want) {
          problems.push_back(mode + ": " + field + " is " + run.at(field).dump() +
                             ", recomputed " + want.dump());
        }
      };
      expect("prompts", agg.prompts);
      expect("steps", agg.steps);
      expect("tokens", agg.tokens);
      expect("mat", agg.mat());
      expect("retrieval_success_rate", uses_retrieval(parse_mode(mode))
                                           ? nlohmann::json(agg.rate())
                                           : nlohmann::json());
      expect("rank_cdf", nlohmann::json(detail::rank_cdf_json(agg.ranks)));
      expect("phase_counters", nlohmann::json(detail::phases_json(agg.phases)));
      if (run.at("losslessness").at("mismatches").get<std::size_t>() != mismatches) {
        problems.push_back(mode + ": losslessness.mismatches disagrees with per-prompt rows");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    problems.push_back(std::string("malformed report: ") + e.what());
  } catch (const std::exception& e) {
    problems.push_back(std::string("malformed report: ") + e.what());
  }
  return problems;
}

}  // namespace specdec
