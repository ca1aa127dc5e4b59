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

// specdec: benchmark harness for the speculative decoding engine.
//
//   specdec run --model m.json --corpus prompts.txt --mode logitspec,autoregressive
//   specdec gen-corpus --seed 1 --repetitiveness 0.7 --out prompts.txt
//   specdec gen-model --vocab 64 --order 2 --seed 1 --out m.json
//   specdec check-report report.json
//   specdec tokenize --vocab-file words.txt < text.txt

#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "specdec/specdec.hpp"

namespace {

constexpr int kExitInconsistent = 1;
constexpr int kExitParse = 2;
constexpr int kExitMismatch = 3;

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw specdec::ParseError("cannot write " + path);
  out << text;
}

std::string token_or_end(const std::optional<specdec::TokenId>& t) {
  return t ? std::to_string(*t) : std::string("<end>");
}

struct RunArgs {
  std::string model, corpus, modes = "logitspec", json_out, dump_tree, dump_index;
  std::size_t max_new_tokens = 128, top_k = 16, capacity = 60, m_start = 3, last_logit_k = 60;
  std::size_t jobs = 1, dump_prompt = 0;
  double temperature = 0.0;
  std::uint64_t seed = 0;
  bool compare = false;
};

int cmd_run(const RunArgs& a) {
  specdec::BenchOptions opts;
  opts.modes.clear();
  std::stringstream ss(a.modes);
  for (std::string name; std::getline(ss, name, ',');) {
    if (!name.empty()) opts.modes.push_back(specdec::parse_mode(name));
  }
  opts.base.max_new_tokens = a.max_new_tokens;
  opts.base.temperature = a.temperature;
  opts.base.seed = a.seed;
  opts.base.draft.top_k = a.top_k;
  opts.base.draft.capacity = a.capacity;
  opts.base.draft.m_start = a.m_start;
  opts.base.last_logit_k = a.last_logit_k;
  opts.base.validate();
  opts.jobs = a.jobs;
  opts.compare = a.compare;
  opts.capture_trees = !a.dump_tree.empty();
  opts.dump_prompt = a.dump_prompt;
  opts.model_path = a.model;
  opts.corpus_path = a.corpus;

  const specdec::MarkovTableModel model = specdec::load_model(a.model);
  const specdec::Corpus corpus = specdec::load_corpus(a.corpus);
  if (corpus.sequences.empty()) throw specdec::ParseError("corpus " + a.corpus + " has no prompts");
  for (const auto& p : corpus.sequences) {
    try {
      model.vocab().check_tokens(p);
    } catch (const specdec::RangeError& e) {
      throw specdec::ParseError("corpus " + a.corpus + ": " + e.what());
    }
  }
  if ((opts.capture_trees || !a.dump_index.empty()) && a.dump_prompt >= corpus.sequences.size()) {
    throw specdec::UsageError("--dump-prompt is past the end of the corpus");
  }

  const specdec::BenchOutput bench = specdec::run_bench(model, corpus, opts);
  write_output(a.json_out, specdec::report_json(bench, opts).dump(2) + "\n");

  if (opts.capture_trees) {
    std::string text;
    for (std::size_t i = 0; i < bench.modes.size(); ++i) {
      text += "# mode " + std::string(specdec::to_string(bench.modes[i].mode)) + "\n";
      text += bench.tree_dumps[i];
    }
    write_output(a.dump_tree, text);
  }
  if (!a.dump_index.empty()) {
    // The index after a session holds prompt ++ output; rebuilding it from
    // that stream gives the same table as the incremental one.
    std::string text;
    for (std::size_t i = 0; i < bench.modes.size(); ++i) {
      if (!specdec::uses_retrieval(bench.modes[i].mode)) continue;
      specdec::TokenSeq stream = corpus.sequences[a.dump_prompt];
      const auto& out = bench.dump_outputs[i];
      stream.insert(stream.end(), out.begin(), out.end());
      const auto index = specdec::NGramIndex::build(stream, opts.base.index);
      text += "# mode " + std::string(specdec::to_string(bench.modes[i].mode)) + "\n";
      text += index.dump();
    }
    write_output(a.dump_index, text);
  }

  if (!bench.mismatches.empty()) {
    for (const auto& m : bench.mismatches) {
      std::cerr << "specdec: " << specdec::to_string(m.mode) << " diverges from autoregressive on prompt "
                << m.prompt << " at position " << m.position << " (expected "
                << token_or_end(m.expected) << ", got " << token_or_end(m.got) << ")\n";
    }
    return kExitMismatch;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speculative decoding benchmark harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", specdec::kToolVersion);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Decode a corpus in one or more modes and write a report");
  run_cmd->add_option("--model", run.model, "Model file (JSON)")->required();
  run_cmd->add_option("--corpus", run.corpus, "Prompt file, one prompt per line")->required();
  run_cmd->add_option("--mode", run.modes,
                      "Comma list of autoregressive, last_logit, retrieval_only, logitspec");
  run_cmd->add_option("--max-new-tokens", run.max_new_tokens)->check(CLI::PositiveNumber);
  run_cmd->add_option("--temperature", run.temperature)->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--seed", run.seed);
  run_cmd->add_option("--top-k", run.top_k, "Next-next candidates taken from the last logit");
  run_cmd->add_option("--capacity", run.capacity, "Draft token budget per step");
  run_cmd->add_option("--m-start", run.m_start, "Longest retrieval query length");
  run_cmd->add_option("--last-logit-k", run.last_logit_k, "Draft count in last_logit mode");
  run_cmd->add_option("--json-out", run.json_out, "Report path (default stdout)");
  run_cmd->add_flag("--compare", run.compare, "Check every mode against autoregressive output");
  run_cmd->add_option("--dump-tree", run.dump_tree, "Write the draft trees of one prompt here");
  run_cmd->add_option("--dump-index", run.dump_index, "Write the final n-gram index of one prompt here");
  run_cmd->add_option("--dump-prompt", run.dump_prompt, "Prompt used by --dump-tree/--dump-index");
  run_cmd->add_option("--jobs", run.jobs, "Parallel decode sessions")->check(CLI::PositiveNumber);

  specdec::CorpusSpec cspec;
  std::string corpus_out;
  auto* gen_corpus = app.add_subcommand("gen-corpus", "Write a synthetic prompt corpus");
  gen_corpus->add_option("--seed", cspec.seed);
  gen_corpus->add_option("--vocab", cspec.vocab.size)->check(CLI::Range(2, 1 << 24));
  gen_corpus->add_option("--eos", cspec.vocab.eos);
  gen_corpus->add_option("--count", cspec.count);
  gen_corpus->add_option("--length", cspec.length)->check(CLI::PositiveNumber);
  gen_corpus->add_option("--repetitiveness", cspec.repetitiveness)->check(CLI::Range(0.0, 1.0));
  gen_corpus->add_option("--out", corpus_out, "Output path (default stdout)");

  specdec::MarkovParams mparams;
  std::string model_out, train_path;
  bool embed_counts = false;
  auto* gen_model = app.add_subcommand("gen-model", "Write a Markov model file");
  gen_model->add_option("--vocab", mparams.vocab.size);
  gen_model->add_option("--eos", mparams.vocab.eos);
  gen_model->add_option("--order", mparams.order);
  gen_model->add_option("--alpha", mparams.alpha);
  gen_model->add_option("--seed", mparams.seed);
  gen_model->add_option("--train-corpus", train_path, "Corpus path stored in the file");
  gen_model->add_flag("--explicit-counts", embed_counts, "Embed the trained count table");
  gen_model->add_option("--out", model_out, "Output path (default stdout)");

  std::string report_path;
  auto* check = app.add_subcommand("check-report", "Recompute report aggregates from per-prompt rows");
  check->add_option("report", report_path)->required();

  std::string vocab_file, text_in, tok_out;
  bool detokenize = false;
  auto* tokenize = app.add_subcommand("tokenize", "Whitespace tokenizer over a word list");
  tokenize->add_option("--vocab-file", vocab_file, "One word per line; id = line index")->required();
  tokenize->add_option("--input", text_in, "Text file (default stdin), one prompt per line");
  tokenize->add_option("--out", tok_out, "Output path (default stdout)");
  tokenize->add_flag("--decode", detokenize, "Map token ids back to words");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*gen_corpus) {
      write_output(corpus_out, specdec::format_corpus(specdec::gen_corpus(cspec)));
      return 0;
    }
    if (*gen_model) {
      mparams.validate();
      std::optional<std::string> stored;
      std::optional<specdec::MarkovTableModel> trained;
      if (!train_path.empty()) {
        if (embed_counts) {
          trained = specdec::MarkovTableModel::train(mparams, specdec::load_corpus(train_path).sequences);
        } else {
          stored = train_path;
        }
      } else if (embed_counts) {
        trained = specdec::MarkovTableModel::from_seed(mparams);
      }
      write_output(model_out, specdec::format_model(mparams, stored, trained ? &*trained : nullptr));
      return 0;
    }
    if (*check) {
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(specdec::read_text_file(report_path));
      } catch (const nlohmann::json::parse_error& e) {
        throw specdec::ParseError(std::string("report is not valid JSON: ") + e.what());
      }
      const auto problems = specdec::check_report(doc);
      for (const auto& p : problems) std::cerr << "specdec: " << p << "\n";
      if (!problems.empty()) return kExitInconsistent;
      std::cout << "report consistent\n";
      return 0;
    }
    if (*tokenize) {
      const auto vocab = specdec::WordVocabulary::parse(specdec::read_text_file(vocab_file));
      std::string text;
      if (text_in.empty()) {
        text.assign(std::istreambuf_iterator<char>(std::cin), {});
      } else {
        text = specdec::read_text_file(text_in);
      }
      std::string out;
      if (detokenize) {
        for (const auto& seq : specdec::parse_corpus(text).sequences) out += vocab.decode(seq) + "\n";
      } else {
        std::istringstream lines(text);
        specdec::Corpus c;
        for (std::string line; std::getline(lines, line);) {
          auto ids = vocab.encode(line);
          if (!ids.empty()) c.sequences.push_back(std::move(ids));
        }
        out = specdec::format_corpus(c);
      }
      write_output(tok_out, out);
      return 0;
    }
  } catch (const specdec::ParseError& e) {
    std::cerr << "specdec: " << e.what() << "\n";
    return kExitParse;
  } catch (const specdec::UsageError& e) {
    std::cerr << "specdec: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "specdec: " << e.what() << "\n";
    return kExitInconsistent;
  }
  return 0;
}
