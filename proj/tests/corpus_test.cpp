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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "specdec/corpus.hpp"
#include "specdec/model_file.hpp"
#include "test_support.hpp"

namespace specdec {
namespace {

TEST(Corpus, ParseAndFormat) {
  auto c = parse_corpus("1 2 3\n\n  4\t5 \r\n6");
  ASSERT_EQ(c.sequences.size(), 3u);
  EXPECT_EQ(c.sequences[1], (TokenSeq{4, 5}));
  EXPECT_EQ(format_corpus(c), "1 2 3\n4 5\n6\n");
  EXPECT_THROW(parse_corpus("1 x 3\n"), ParseError);
  EXPECT_THROW(parse_corpus("1 -2\n"), ParseError);
  EXPECT_THROW(parse_corpus("12a\n"), ParseError);
  EXPECT_THROW(load_corpus("/nonexistent/corpus.txt"), ParseError);
}

TEST(Corpus, GenerationIsDeterministic) {
  CorpusSpec spec;
  spec.seed = 9;
  EXPECT_EQ(format_corpus(gen_corpus(spec)), format_corpus(gen_corpus(spec)));
  spec.seed = 10;
  CorpusSpec other = spec;
  other.seed = 11;
  EXPECT_NE(format_corpus(gen_corpus(spec)), format_corpus(gen_corpus(other)));
  spec.repetitiveness = 1.5;
  EXPECT_THROW(gen_corpus(spec), UsageError);
}

TEST(Corpus, FullRepetitivenessRepeatsOnePhrase) {
  CorpusSpec spec;
  spec.repetitiveness = 1.0;
  spec.length = 40;
  for (const auto& p : gen_corpus(spec).sequences) {
    ASSERT_EQ(p.size(), 40u);
    for (std::size_t i = 6; i < p.size(); ++i) EXPECT_EQ(p[i], p[i - 6]);
    EXPECT_EQ(std::count(p.begin(), p.end(), 0), 0);
  }
}

// With repetitiveness 0 every token is uniform over the V-1 non-eos ids.
// Any two bigram slots then hold equal bigrams with probability 1/(V-1)^2
// (adjacent slots need three equal tokens, which has the same chance), so
// a prompt of length L has C(L-1, 2)/(V-1)^2 colliding pairs on average.
TEST(Corpus, NoRepetitionMeansChanceBigramCollisions) {
  CorpusSpec spec;
  spec.repetitiveness = 0.0;
  spec.count = 400;
  spec.length = 64;
  spec.vocab = VocabSpec{16, 0};
  const auto c = gen_corpus(spec);
  double observed = 0.0;
  for (const auto& p : c.sequences) {
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      for (std::size_t j = i + 1; j + 1 < p.size(); ++j) {
        observed += (p[i] == p[j] && p[i + 1] == p[j + 1]) ? 1.0 : 0.0;
      }
    }
  }
  observed /= static_cast<double>(c.sequences.size());
  const double v = 15.0;
  const double n = 63.0;  // bigram slots per prompt
  const double expected = (n * (n - 1) / 2.0) / (v * v);
  EXPECT_NEAR(observed, expected, 0.1 * expected);

  spec.repetitiveness = 0.7;
  const auto rep = gen_corpus(spec);
  double rep_obs = 0.0;
  for (const auto& p : rep.sequences) {
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      for (std::size_t j = i + 1; j + 1 < p.size(); ++j) {
        rep_obs += (p[i] == p[j] && p[i + 1] == p[j + 1]) ? 1.0 : 0.0;
      }
    }
  }
  EXPECT_GT(rep_obs / static_cast<double>(rep.sequences.size()), 3.0 * expected);
}

TEST(WordVocabulary, EncodeDecode) {
  auto v = WordVocabulary::parse("<eos>\nthe\ncat\nsat\n");
  EXPECT_EQ(v.size(), 4u);
  EXPECT_EQ(v.encode("the cat  sat"), (TokenSeq{1, 2, 3}));
  EXPECT_EQ(v.decode(TokenSeq{3, 1}), "sat the");
  EXPECT_THROW(v.encode("dog"), ParseError);
  EXPECT_THROW(v.decode(TokenSeq{4}), RangeError);
  EXPECT_THROW(WordVocabulary::parse("a\na\n"), ParseError);
}

TEST(ModelFile, SeededAndExplicitAgree) {
  MarkovParams p;
  p.vocab = VocabSpec{16, 0};
  p.seed = 3;
  const auto seeded = parse_model(format_model(p));
  const auto model = MarkovTableModel::from_seed(p);
  EXPECT_EQ(seeded.format_counts(), model.format_counts());
  const auto explicit_model = parse_model(format_model(p, std::nullopt, &model));
  EXPECT_EQ(explicit_model.format_counts(), model.format_counts());
}

TEST(ModelFile, TrainCorpusResolvesRelativeToModel) {
  const auto dir = std::filesystem::temp_directory_path() / "specdec_model_file_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "train.txt") << "1 2 3 1 2 3\n";
  std::ofstream(dir / "m.json") << R"({"vocab_size": 4, "order": 1, "train_corpus_path": "train.txt"})";
  const auto m = load_model((dir / "m.json").string());
  EXPECT_EQ(m.next_distribution({TokenSeq{2}, {}}).argmax(), 3);
  std::filesystem::remove_all(dir);
}

TEST(ModelFile, Errors) {
  EXPECT_THROW(parse_model("not json"), ParseError);
  EXPECT_THROW(parse_model("[1]"), ParseError);
  EXPECT_THROW(parse_model(R"({"order": 2})"), ParseError);
  EXPECT_THROW(parse_model(R"({"vocab_size": 1})"), ParseError);
  EXPECT_THROW(parse_model(R"({"vocab_size": 4, "train_corpus_path": "a", "explicit_counts": []})"),
               ParseError);
  EXPECT_THROW(parse_model(R"({"vocab_size": 4, "explicit_counts": ["1 -> 9:1"]})"), ParseError);
}

}  // namespace
}  // namespace specdec
