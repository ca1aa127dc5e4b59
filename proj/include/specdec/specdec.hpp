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

#include "specdec/bench.hpp"
#include "specdec/common.hpp"
#include "specdec/corpus.hpp"
#include "specdec/distribution.hpp"
#include "specdec/drafter.hpp"
#include "specdec/engine.hpp"
#include "specdec/markov_model.hpp"
#include "specdec/metrics.hpp"
#include "specdec/model.hpp"
#include "specdec/model_file.hpp"
#include "specdec/ngram_index.hpp"
#include "specdec/scripted_model.hpp"
#include "specdec/tree_layout.hpp"
#include "specdec/verifier.hpp"
