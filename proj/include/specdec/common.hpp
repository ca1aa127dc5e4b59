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
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace specdec {

using TokenId = std::int32_t;
using TokenSeq = std::vector<TokenId>;

// Error taxonomy shared by every module.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class StructureError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VocabSpec {
  std::int32_t size = 2;
  TokenId eos = 0;

  void validate() const {
    if (size < 2) {
      throw UsageError("vocab size must be >= 2, got " + std::to_string(size));
    }
    if (eos < 0 || eos >= size) {
      throw UsageError("eos id " + std::to_string(eos) +
                       " outside vocab of size " + std::to_string(size));
    }
  }

  bool contains(TokenId t) const { return t >= 0 && t < size; }

  void check_tokens(std::span<const TokenId> tokens) const {
    for (TokenId t : tokens) {
      if (!contains(t)) {
        throw RangeError("token id " + std::to_string(t) +
                         " outside vocab of size " + std::to_string(size));
      }
    }
  }
};

// Seeded random source. The engine draws every random number through this
// type so a fixed seed replays bit-for-bit on any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer; used to derive independent per-session seeds.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// A logical concatenation head ++ tail of two token ranges, so tree rows can
// be evaluated without copying the committed prefix.
struct ContextView {
  std::span<const TokenId> head;
  std::span<const TokenId> tail;

  std::size_t size() const { return head.size() + tail.size(); }
  TokenId operator[](std::size_t i) const {
    return i < head.size() ? head[i] : tail[i - head.size()];
  }
  TokenSeq suffix(std::size_t n) const {
    TokenSeq out;
    out.reserve(n);
    for (std::size_t i = size() - n; i < size(); ++i) out.push_back((*this)[i]);
    return out;
  }
};

}  // namespace specdec
