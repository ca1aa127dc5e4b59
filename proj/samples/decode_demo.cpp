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

// Decodes one repetitive prompt with a seeded Markov model in every mode and
// prints tokens per forward pass.

#include <iomanip>
#include <iostream>

#include "specdec/specdec.hpp"

int main() {
  specdec::MarkovParams params;
  params.seed = 11;
  const auto model = specdec::MarkovTableModel::from_seed(params);

  specdec::CorpusSpec spec;
  spec.seed = 11;
  spec.count = 1;
  spec.repetitiveness = 0.8;
  const auto prompt = specdec::gen_corpus(spec).sequences.front();

  specdec::TokenSeq reference;
  for (auto mode : {specdec::DecodeMode::kAutoregressive, specdec::DecodeMode::kLastLogit,
                    specdec::DecodeMode::kRetrievalOnly, specdec::DecodeMode::kLogitSpec}) {
    specdec::DecodeConfig cfg;
    cfg.mode = mode;
    const auto result = specdec::decode(model, prompt, cfg);
    if (reference.empty()) reference = result.tokens;
    std::cout << std::left << std::setw(16) << specdec::to_string(mode) << " steps "
              << std::setw(4) << result.metrics.steps << " mat " << std::fixed
              << std::setprecision(3) << specdec::mat(result)
              << (result.tokens == reference ? "  same output" : "  OUTPUT DIFFERS") << "\n";
  }
  return 0;
}
