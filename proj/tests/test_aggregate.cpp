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

#include <algorithm>

#include "aggregation_table.hpp"
#include "support.hpp"
#include "xattr/aggregate.hpp"

namespace xattr {
namespace {

using testing::records_for;

TEST(AggregateRatings, TruthTableOverAllThreeRaterCombinations) {
  for (const auto& c : testing::kVoteTruthTable) {
    const auto j = aggregate_ratings(records_for(c.votes));
    if (c.label < 0) {
      EXPECT_FALSE(j.has_value()) << c.votes;
      continue;
    }
    ASSERT_TRUE(j.has_value()) << c.votes;
    EXPECT_EQ(j->label, c.label) << c.votes;
    EXPECT_EQ(j->valid_rating_count, c.valid) << c.votes;
    EXPECT_EQ(j->yes_votes, c.yes) << c.votes;
    EXPECT_NO_THROW(validate_judgment(*j));
  }
}

TEST(AggregateRatings, Examples) {
  EXPECT_EQ(aggregate_ratings(records_for("yyn"))->label, 1);
  EXPECT_EQ(aggregate_ratings(records_for("yyn"))->yes_votes, 2);
  EXPECT_FALSE(aggregate_ratings(records_for("ffy")).has_value());
  EXPECT_EQ(aggregate_ratings(records_for("ynn"))->label, 0);
  EXPECT_FALSE(aggregate_ratings(records_for("")).has_value());
}

TEST(AggregateRatings, UninterpretableAnswersAreDropped) {
  auto records = records_for("yyn");
  records[0].interpretable = false;
  records[0].attributed.reset();
  const auto j = aggregate_ratings(records);
  ASSERT_TRUE(j);
  EXPECT_EQ(j->valid_rating_count, 2);
  EXPECT_EQ(j->label, 0);
  records[1].interpretable = false;
  records[1].attributed.reset();
  EXPECT_FALSE(aggregate_ratings(records));
}

TEST(AggregateRatings, MixedScenariosAreFatal) {
  auto records = records_for("yyn");
  records[2].scenario = Scenario::in_english;
  EXPECT_THROW(aggregate_ratings(records), ValidationError);
}

TEST(AggregateRatings, PermutationInvariant) {
  SplitMix rng(17);
  const char codes[] = "ynfu";
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(6));
    std::string votes;
    for (int i = 0; i < n; ++i) votes += codes[rng.below(4)];
    std::string pure = votes;
    std::replace(pure.begin(), pure.end(), 'u', 'n');
    auto records = records_for(pure.c_str());
    for (int i = 0; i < n; ++i) {
      if (votes[static_cast<std::size_t>(i)] == 'u') {
        records[static_cast<std::size_t>(i)].interpretable = false;
        records[static_cast<std::size_t>(i)].attributed.reset();
      }
    }
    const auto expected = aggregate_ratings(records);
    for (int k = 0; k < 5; ++k) {
      for (std::size_t i = records.size(); i > 1; --i) std::swap(records[i - 1], records[rng.below(i)]);
      EXPECT_EQ(aggregate_ratings(records), expected) << votes;
    }
  }
}

TEST(AggregateRatings, FlippingNoToYesNeverLowersLabel) {
  SplitMix rng(23);
  const char codes[] = "ynf";
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(4));
    std::string votes;
    for (int i = 0; i < n; ++i) votes += codes[rng.below(3)];
    const auto before = aggregate_ratings(records_for(votes.c_str()));
    for (std::size_t i = 0; i < votes.size(); ++i) {
      if (votes[i] != 'n') continue;
      std::string flipped = votes;
      flipped[i] = 'y';
      const auto after = aggregate_ratings(records_for(flipped.c_str()));
      ASSERT_EQ(before.has_value(), after.has_value());
      if (before) {
        EXPECT_GE(after->label, before->label) << votes << " -> " << flipped;
      }
    }
  }
}

std::vector<RatingRecord> triple(const std::string& ex, const std::string& p, const char* votes,
                                 Scenario s = Scenario::in_language) {
  auto records = records_for(votes, s);
  for (auto& r : records) {
    r.example_id = ex;
    r.passage_id = p;
  }
  return records;
}

TEST(AggregateAll, GroupsByPairAndReportsExclusions) {
  std::vector<RatingRecord> ratings;
  for (const auto& [p, v] : std::vector<std::pair<std::string, const char*>>{
           {"p1", "yyn"}, {"p2", "ffn"}, {"p3", "nnn"}}) {
    auto t = triple("e1", p, v);
    ratings.insert(ratings.end(), t.begin(), t.end());
  }
  auto other = triple("e1", "p1", "nnn", Scenario::in_english);
  ratings.insert(ratings.end(), other.begin(), other.end());
  const auto r = aggregate_all(ratings, Scenario::in_language);
  ASSERT_EQ(r.judgments.size(), 2u);
  EXPECT_EQ(r.judgments[0].passage_id, "p1");
  EXPECT_EQ(r.judgments[0].label, 1);
  ASSERT_EQ(r.excluded.size(), 1u);
  EXPECT_EQ(r.excluded[0].passage_id, "p2");
  EXPECT_EQ(label_map(aggregate_all(ratings, Scenario::in_english).judgments).at({"e1", "p1"}), 0);
}

TEST(Agreement, UnanimousIsHundred) {
  std::vector<RatingRecord> ratings;
  for (int i = 0; i < 5; ++i) {
    auto t = triple("e" + std::to_string(i), "p", i % 2 ? "yyy" : "nnn");
    ratings.insert(ratings.end(), t.begin(), t.end());
  }
  const auto js = aggregate_all(ratings, Scenario::in_language).judgments;
  EXPECT_DOUBLE_EQ(agreement_with_consensus(js, ratings), 100.0);
}

TEST(Agreement, SingleSplitTriple) {
  const auto ratings = triple("e", "p", "yyn");
  const auto js = aggregate_all(ratings, Scenario::in_language).judgments;
  EXPECT_DOUBLE_EQ(agreement_with_consensus(js, ratings), 200.0 / 3.0);
}

TEST(Agreement, EmptyIsUndefined) {
  EXPECT_THROW(agreement_with_consensus({}, {}), UndefinedMetric);
  const auto ratings = triple("e", "p", "ffy");
  const auto js = aggregate_all(ratings, Scenario::in_language).judgments;
  EXPECT_THROW(agreement_with_consensus(js, ratings), UndefinedMetric);
}

// 100 triples, 30 of them with exactly one dissenting rater: 270 of 300
// individual ratings agree.
TEST(Agreement, PlantedDissentMatchesRecount) {
  SplitMix rng(99);
  std::vector<int> order(100);
  for (int i = 0; i < 100; ++i) order[static_cast<std::size_t>(i)] = i;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  std::set<int> dissent(order.begin(), order.begin() + 30);
  std::vector<RatingRecord> ratings;
  for (int i = 0; i < 100; ++i) {
    const bool majority_yes = rng.below(2) == 1;
    std::string v = majority_yes ? "yyy" : "nnn";
    if (dissent.count(i)) v[rng.below(3)] = majority_yes ? 'n' : 'y';
    auto t = triple("e" + std::to_string(i), "p", v.c_str());
    ratings.insert(ratings.end(), t.begin(), t.end());
  }
  // Independent recount: majority per triple, then agreeing ratings.
  std::map<std::string, int> yes;
  for (const auto& r : ratings) yes[r.example_id] += *r.attributed;
  long agree = 0;
  for (const auto& r : ratings) agree += (*r.attributed ? 1 : 0) == (yes[r.example_id] >= 2 ? 1 : 0);
  const double expected = 100.0 * static_cast<double>(agree) / static_cast<double>(ratings.size());
  EXPECT_DOUBLE_EQ(expected, 90.0);
  const auto js = aggregate_all(ratings, Scenario::in_language).judgments;
  EXPECT_DOUBLE_EQ(agreement_with_consensus(js, ratings), expected);
}

TEST(ScenarioDisagreement, IdenticalAndOneOfTen) {
  LabelMap s1, s2;
  for (int i = 0; i < 10; ++i) s1[{"e" + std::to_string(i), "p"}] = i % 2;
  s2 = s1;
  EXPECT_DOUBLE_EQ(scenario_disagreement(s1, s2), 0.0);
  s2[{"e3", "p"}] = 1 - s2[{"e3", "p"}];
  s2[{"only-in-s2", "p"}] = 1;
  EXPECT_DOUBLE_EQ(scenario_disagreement(s1, s2), 10.0);
}

TEST(ScenarioDisagreement, PlantedRateAndTranslatedFilter) {
  SplitMix rng(31);
  LabelMap s1, s2;
  std::set<PairKey> translated;
  long differ = 0, shared = 0, differ_tr = 0, shared_tr = 0;
  for (int i = 0; i < 400; ++i) {
    const PairKey k{"e" + std::to_string(i), "p"};
    s1[k] = rng.below(2);
    if (rng.below(5) == 0) continue;  // unlabeled in S2
    const bool flip = rng.below(8) == 0;
    s2[k] = flip ? 1 - s1[k] : s1[k];
    const bool tr = rng.below(3) == 0;
    if (tr) translated.insert(k);
    ++shared;
    differ += flip;
    shared_tr += tr;
    differ_tr += tr && flip;
  }
  EXPECT_DOUBLE_EQ(scenario_disagreement(s1, s2), 100.0 * differ / shared);
  EXPECT_DOUBLE_EQ(scenario_disagreement(s1, s2, [&](const PairKey& k) { return translated.count(k) > 0; }),
                   100.0 * differ_tr / shared_tr);
}

TEST(ScenarioDisagreement, EmptyIntersectionIsUndefined) {
  LabelMap s1{{{"a", "p"}, 1}}, s2{{{"b", "p"}, 1}};
  EXPECT_THROW(scenario_disagreement(s1, s2), UndefinedMetric);
}

TEST(TranslatedFromEnglish, UsesRetrievalLanguage) {
  Example e;
  e.query_language = LanguageCode("bn");
  Passage p{"p", "text", LanguageCode("bn"), 1};
  EXPECT_FALSE(translated_from_english_in_s1(e, p));
  p.translated = true;
  p.original_language = english();
  EXPECT_TRUE(translated_from_english_in_s1(e, p));
}

}  // namespace
}  // namespace xattr
