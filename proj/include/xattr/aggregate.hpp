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

#pragma once

// Majority-vote aggregation of rater records into gold labels, and the
// agreement statistics computed over them.

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "xattr/core.hpp"

namespace xattr {

// A record counts toward the label only if the rater saw the passage and
// answered: not flagged, not marked uninterpretable, and carrying a vote.
inline bool is_valid_rating(const RatingRecord& r) {
  return !r.flagged && r.interpretable != false && r.attributed.has_value();
}

// Aggregates the records of one (example, passage, scenario). Returns nullopt
// when fewer than two valid ratings remain (the triple is excluded).
inline std::optional<AttributionJudgment> aggregate_ratings(
    std::span<const RatingRecord> ratings) {
  if (ratings.empty()) return std::nullopt;
  const RatingRecord& first = ratings.front();
  int valid = 0;
  int yes = 0;
  for (const auto& r : ratings) {
    if (r.scenario != first.scenario) {
      throw ValidationError("scenario", "mixed scenarios for (" + first.example_id +
                                            ", " + first.passage_id + ")");
    }
    if (r.example_id != first.example_id || r.passage_id != first.passage_id) {
      throw ValidationError("passage_id",
                            "records for different (example, passage) pairs");
    }
    if (!is_valid_rating(r)) continue;
    ++valid;
    if (*r.attributed) ++yes;
  }
  if (valid < 2) return std::nullopt;
  return AttributionJudgment{first.example_id, first.passage_id, first.scenario,
                             yes >= 2 ? 1 : 0, valid, yes};
}

using RatingGroups = std::map<PairKey, std::vector<RatingRecord>>;

inline RatingGroups group_ratings(std::span<const RatingRecord> ratings,
                                  Scenario scenario) {
  RatingGroups groups;
  for (const auto& r : ratings) {
    if (r.scenario == scenario) {
      groups[{r.example_id, r.passage_id}].push_back(r);
    }
  }
  return groups;
}

struct AggregationResult {
  std::vector<AttributionJudgment> judgments;  // sorted by (example, passage)
  std::vector<PairKey> excluded;
};

inline AggregationResult aggregate_all(std::span<const RatingRecord> ratings,
                                       Scenario scenario) {
  AggregationResult out;
  for (const auto& [key, group] : group_ratings(ratings, scenario)) {
    if (auto j = aggregate_ratings(group)) {
      out.judgments.push_back(std::move(*j));
    } else {
      out.excluded.push_back(key);
    }
  }
  return out;
}

using LabelMap = std::map<PairKey, int>;

inline LabelMap label_map(std::span<const AttributionJudgment> judgments) {
  LabelMap m;
  for (const auto& j : judgments) m[{j.example_id, j.passage_id}] = j.label;
  return m;
}

inline LabelMap label_map(std::span<const AttributionJudgment> judgments,
                          Scenario scenario) {
  LabelMap m;
  for (const auto& j : judgments) {
    if (j.scenario == scenario) m[{j.example_id, j.passage_id}] = j.label;
  }
  return m;
}

// Percentage of individual valid ratings that agree with their triple's
// aggregated label. Triples without a judgment are left out of both the
// numerator and the denominator.
inline double agreement_with_consensus(std::span<const AttributionJudgment> judgments,
                                       std::span<const RatingRecord> ratings) {
  std::map<std::pair<PairKey, Scenario>, int> labels;
  for (const auto& j : judgments) {
    labels[{{j.example_id, j.passage_id}, j.scenario}] = j.label;
  }
  long agree = 0;
  long total = 0;
  for (const auto& r : ratings) {
    if (!is_valid_rating(r)) continue;
    auto it = labels.find({{r.example_id, r.passage_id}, r.scenario});
    if (it == labels.end()) continue;
    ++total;
    if ((*r.attributed ? 1 : 0) == it->second) ++agree;
  }
  if (total == 0) {
    throw UndefinedMetric("agreement with consensus: no rated triple has a judgment");
  }
  return 100.0 * static_cast<double>(agree) / static_cast<double>(total);
}

// Percentage of pairs, among those labeled in both scenarios, whose labels
// differ. `keep` restricts the population (e.g. to translated passages).
inline double scenario_disagreement(
    const LabelMap& s1, const LabelMap& s2,
    const std::function<bool(const PairKey&)>& keep = nullptr) {
  long differ = 0;
  long shared = 0;
  for (const auto& [key, label] : s1) {
    auto it = s2.find(key);
    if (it == s2.end()) continue;
    if (keep && !keep(key)) continue;
    ++shared;
    if (it->second != label) ++differ;
  }
  if (shared == 0) {
    throw UndefinedMetric("scenario disagreement: no pair labeled in both scenarios");
  }
  return 100.0 * static_cast<double>(differ) / static_cast<double>(shared);
}

// True when the passage text raters saw in the in-language scenario was
// machine-translated from English.
inline bool translated_from_english_in_s1(const Example& e, const Passage& p) {
  return p.source_language() == english() && e.query_language != english();
}

}  // namespace xattr
