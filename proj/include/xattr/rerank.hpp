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

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "xattr/metrics.hpp"

namespace xattr {

struct RerankChoice {
  std::string passage_id;
  double score = 0.0;
};

// The highest-scoring passage; ties go to the better retrieval rank.
// `scored` must cover exactly the example's passages.
inline RerankChoice rerank(const Example& e, std::span<const ScoredPassage> scored) {
  std::map<std::string_view, double> by_id;
  for (const auto& s : scored) {
    if (!e.find_passage(s.passage_id)) {
      throw ValidationError("scored", "passage \"" + s.passage_id +
                                          "\" is not in example \"" + e.example_id + "\"");
    }
    if (!by_id.emplace(s.passage_id, s.score).second) {
      throw ValidationError("scored", "passage \"" + s.passage_id + "\" scored twice");
    }
  }
  if (by_id.size() != e.passages.size() || e.passages.empty()) {
    throw ValidationError("scored", "scores cover " + std::to_string(by_id.size()) + " of " +
                                        std::to_string(e.passages.size()) +
                                        " passages of \"" + e.example_id + "\"");
  }
  const Passage* best = nullptr;
  double best_score = 0.0;
  // Passages are in rank order, so strict '>' keeps the better rank on ties.
  for (const auto& p : e.passages) {
    const double s = by_id.at(p.passage_id);
    if (best == nullptr || s > best_score) {
      best = &p;
      best_score = s;
    }
  }
  return {best->passage_id, best_score};
}

using ScoreTable = std::map<std::string, std::vector<ScoredPassage>>;

struct RerankedAis {
  AisResult ais;
  std::map<std::string, RerankChoice> choices;
};

// AIS of the reranked top-1 passage. Examples with an unjudged passage are
// excluded, matching the population of ais().
inline RerankedAis reranked_ais(std::span<const Example> examples, const LabelMap& labels,
                                const ScoreTable& scores) {
  RerankedAis out;
  for (const auto& e : examples) {
    auto it = scores.find(e.example_id);
    if (it == scores.end()) {
      throw ValidationError("scores", "no scores for example \"" + e.example_id + "\"");
    }
    RerankChoice choice = rerank(e, it->second);
    bool judged = true;
    for (const auto& p : e.passages) judged = judged && labels.count({e.example_id, p.passage_id});
    if (!judged) {
      ++out.ais.excluded;
    } else {
      ++out.ais.rate.total;
      out.ais.rate.hits += labels.at({e.example_id, choice.passage_id}) == 1;
    }
    out.choices.emplace(e.example_id, std::move(choice));
  }
  return out;
}

// 100 * (after - before) / before.
inline double relative_improvement(double before, double after) {
  if (before == 0.0) throw UndefinedMetric("relative improvement from 0");
  return 100.0 * (after - before) / before;
}

}  // namespace xattr
