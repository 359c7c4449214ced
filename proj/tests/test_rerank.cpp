// Copyright 2026 The xattr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "xattr/rerank.hpp"
#include "xattr/scorer.hpp"

namespace xattr {
namespace {

Example three_passages() {
  Example e;
  e.example_id = "r-1";
  e.query_language = LanguageCode("fi");
  e.query = "q";
  e.answer = "a";
  for (int r = 1; r <= 3; ++r) {
    Passage p;
    p.passage_id = "p" + std::to_string(r);
    p.retrieval_rank = r;
    p.language = LanguageCode("fi");
    p.text = "t" + std::to_string(r);
    e.passages.push_back(p);
  }
  return e;
}

std::vector<ScoredPassage> scored(std::initializer_list<double> values) {
  std::vector<ScoredPassage> out;
  int r = 1;
  for (double v : values) out.push_back({"p" + std::to_string(r++), v, "test"});
  return out;
}

ScoreTable table_of(const std::vector<Example>& examples, const Scorer& scorer) {
  ScoreTable t;
  for (const auto& e : examples) {
    for (const auto& p : e.passages) t[e.example_id].push_back({p.passage_id, scorer.score(e, p), scorer.name()});
  }
  return t;
}

TEST(Rerank, PicksArgmax) {
  const Example e = three_passages();
  const RerankChoice c = rerank(e, scored({0.2, 0.9, 0.4}));
  EXPECT_EQ(c.passage_id, "p2");
  EXPECT_EQ(c.score, 0.9);
}

TEST(Rerank, TiesGoToBetterRank) {
  const Example e = three_passages();
  EXPECT_EQ(rerank(e, scored({0.5, 0.9, 0.9})).passage_id, "p2");
  EXPECT_EQ(rerank(e, scored({0.7, 0.7, 0.7})).passage_id, "p1");
  auto reversed = scored({0.1, 0.8, 0.8});
  std::reverse(reversed.begin(), reversed.end());
  EXPECT_EQ(rerank(e, reversed).passage_id, "p2");
}

TEST(Rerank, ScoresMustCoverPassagesExactly) {
  const Example e = three_passages();
  EXPECT_THROW(rerank(e, scored({0.1, 0.2})), ValidationError);
  auto extra = scored({0.1, 0.2, 0.3});
  extra.push_back({"p9", 0.5, "test"});
  EXPECT_THROW(rerank(e, extra), ValidationError);
  auto twice = scored({0.1, 0.2, 0.3});
  twice[2].passage_id = "p1";
  EXPECT_THROW(rerank(e, twice), ValidationError);
}

TEST(Rerank, InvariantUnderIncreasingTransform) {
  SplitMix rng(40);
  for (int i = 0; i < 300; ++i) {
    const Example e = testing::random_example(rng, "x", 8);
    std::vector<ScoredPassage> s, t;
    for (const auto& p : e.passages) {
      const double v = static_cast<double>(rng.below(5)) / 4.0;
      s.push_back({p.passage_id, v, "a"});
      t.push_back({p.passage_id, std::exp(3.0 * v) - 7.0, "b"});
    }
    EXPECT_EQ(rerank(e, s).passage_id, rerank(e, t).passage_id);
  }
}

TEST(RerankedAis, OracleReachesAllAndConstantKeepsTop1) {
  SplitMix rng(41);
  for (int round = 0; round < 30; ++round) {
    const auto examples = testing::random_examples(rng, 40);
    const LabelMap labels = testing::random_labels(rng, examples, testing::uniform(rng));
    const MockScorer oracle({1, MockMode::oracle}, labels);
    const MockScorer constant({1, MockMode::constant});
    const MockScorer hashed({static_cast<std::uint64_t>(round)});
    const auto all = ais(examples, labels, Pool::all);
    const auto top1 = ais(examples, labels, Pool::top1);
    EXPECT_EQ(reranked_ais(examples, labels, table_of(examples, oracle)).ais.rate, all.rate);
    EXPECT_EQ(reranked_ais(examples, labels, table_of(examples, constant)).ais.rate, top1.rate);
    EXPECT_DOUBLE_EQ(*all.percent(), testing::brute_force_ais(examples, labels, false, 0));
    EXPECT_DOUBLE_EQ(*top1.percent(), testing::brute_force_ais(examples, labels, true, 0));
    const auto any = reranked_ais(examples, labels, table_of(examples, hashed)).ais.rate;
    EXPECT_LE(any.hits, all.rate.hits);
  }
}

TEST(RerankedAis, UnjudgedExamplesAreExcluded) {
  SplitMix rng(42);
  const auto examples = testing::random_examples(rng, 5);
  LabelMap labels = testing::random_labels(rng, examples, 0.5);
  labels.erase({examples[0].example_id, examples[0].passages.back().passage_id});
  const auto r = reranked_ais(examples, labels, table_of(examples, MockScorer({2})));
  EXPECT_EQ(r.ais.excluded, 1);
  EXPECT_EQ(r.ais.rate.total, 4);
  EXPECT_EQ(r.choices.size(), 5u);
  EXPECT_EQ(r.ais.excluded, ais(examples, labels, Pool::all).excluded);
}

TEST(RerankedAis, MissingScoresAreAnError) {
  SplitMix rng(43);
  const auto examples = testing::random_examples(rng, 2);
  ScoreTable t = table_of(examples, MockScorer({2}));
  t.erase(examples[1].example_id);
  EXPECT_THROW(reranked_ais(examples, testing::random_labels(rng, examples, 0.5), t),
               ValidationError);
}

TEST(RelativeImprovement, Examples) {
  EXPECT_NEAR(relative_improvement(27.9, 39.2), 40.5, 0.2);
  EXPECT_NEAR(relative_improvement(23.3, 30.3), 30.0, 0.1);
  EXPECT_EQ(relative_improvement(31.7, 31.7), 0.0);
  EXPECT_DOUBLE_EQ(relative_improvement(50.0, 25.0), -50.0);
  EXPECT_THROW(relative_improvement(0.0, 10.0), UndefinedMetric);
}

}  // namespace
}  // namespace xattr
