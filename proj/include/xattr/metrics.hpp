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

// Scalar metrics: exact match, AIS and its breakdowns, ROC-AUC, threshold
// calibration, accuracy and passage language distribution.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "xattr/aggregate.hpp"
#include "xattr/core.hpp"
#include "xattr/text.hpp"

namespace xattr {

// hits / total as a percentage; absent when total is zero.
struct Rate {
  long hits = 0;
  long total = 0;

  std::optional<double> percent() const {
    if (total == 0) return std::nullopt;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(total);
  }

  double percent_or_throw(const char* what) const {
    if (total == 0) throw UndefinedMetric(std::string(what) + ": empty population");
    return 100.0 * static_cast<double>(hits) / static_cast<double>(total);
  }

  bool operator==(const Rate&) const = default;
};

// ---------------------------------------------------------------------------
// Exact match

inline bool exact_match(std::string_view answer,
                        std::span<const std::string> gold_answers) {
  if (gold_answers.empty()) {
    throw UndefinedMetric("exact match: no gold answers");
  }
  const std::string a = normalize(answer);
  return std::any_of(gold_answers.begin(), gold_answers.end(),
                     [&](const std::string& g) { return normalize(g) == a; });
}

// EM bit per example id; examples without gold answers are omitted.
inline std::map<std::string, bool> exact_match_bits(std::span<const Example> examples) {
  std::map<std::string, bool> bits;
  for (const auto& e : examples) {
    if (!e.gold_answers.empty()) bits[e.example_id] = exact_match(e.answer, e.gold_answers);
  }
  return bits;
}

// ---------------------------------------------------------------------------
// AIS

enum class Pool { top1, all };
enum class Subset { any, in_language, english_exclusive };

// How top-1 is read under a subset filter: the best-ranked passage of the
// filtered list, or the overall rank-1 passage if it belongs to the subset.
enum class Top1Mode { within_subset, overall };

inline std::string_view to_string(Pool p) { return p == Pool::top1 ? "top1" : "all"; }

inline std::string_view to_string(Subset s) {
  switch (s) {
    case Subset::any: return "any";
    case Subset::in_language: return "lang";
    case Subset::english_exclusive: return "en";
  }
  return "";
}

inline std::string_view to_string(Top1Mode m) {
  return m == Top1Mode::within_subset ? "within_subset" : "overall";
}

inline Top1Mode parse_top1_mode(std::string_view s) {
  if (s == "within_subset") return Top1Mode::within_subset;
  if (s == "overall") return Top1Mode::overall;
  throw ConfigError("top1 mode must be within_subset|overall, got \"" + std::string(s) + "\"");
}

inline Pool parse_pool(std::string_view s) {
  if (s == "top1") return Pool::top1;
  if (s == "all") return Pool::all;
  throw ConfigError("pool must be top1|all, got \"" + std::string(s) + "\"");
}

inline Subset parse_subset(std::string_view s) {
  if (s == "any") return Subset::any;
  if (s == "lang" || s == "in_language") return Subset::in_language;
  if (s == "en" || s == "english_exclusive") return Subset::english_exclusive;
  throw ConfigError("subset must be any|lang|en, got \"" + std::string(s) + "\"");
}

inline bool in_subset(const Example& e, const Passage& p, Subset subset) {
  switch (subset) {
    case Subset::any: return true;
    case Subset::in_language: return p.source_language() == e.query_language;
    case Subset::english_exclusive: return p.source_language() == english();
  }
  return false;
}

// Whether `e` counts as attributed under (pool, subset). nullopt when a
// pooled passage lacks a judgment, which excludes the example.
inline std::optional<bool> is_attributed(const Example& e, const LabelMap& labels,
                                         Pool pool, Subset subset,
                                         Top1Mode mode = Top1Mode::within_subset) {
  std::vector<int> passage_labels;
  passage_labels.reserve(e.passages.size());
  for (const auto& p : e.passages) {
    auto it = labels.find({e.example_id, p.passage_id});
    if (it == labels.end()) return std::nullopt;
    passage_labels.push_back(it->second);
  }
  if (subset == Subset::english_exclusive) {
    for (std::size_t i = 0; i < e.passages.size(); ++i) {
      if (passage_labels[i] == 1 &&
          in_subset(e, e.passages[i], Subset::in_language)) {
        return false;
      }
    }
  }
  if (pool == Pool::top1) {
    if (mode == Top1Mode::overall) {
      return !e.passages.empty() && in_subset(e, e.passages[0], subset) &&
             passage_labels[0] == 1;
    }
    for (std::size_t i = 0; i < e.passages.size(); ++i) {
      if (in_subset(e, e.passages[i], subset)) return passage_labels[i] == 1;
    }
    return false;
  }
  for (std::size_t i = 0; i < e.passages.size(); ++i) {
    if (passage_labels[i] == 1 && in_subset(e, e.passages[i], subset)) return true;
  }
  return false;
}

struct AisResult {
  Rate rate;
  long excluded = 0;  // examples dropped for a missing judgment

  std::optional<double> percent() const { return rate.percent(); }
};

template <typename Filter>
AisResult ais_where(std::span<const Example> examples, const LabelMap& labels,
                    Pool pool, Subset subset, Top1Mode mode, Filter&& keep) {
  AisResult r;
  for (const auto& e : examples) {
    if (!keep(e)) continue;
    auto hit = is_attributed(e, labels, pool, subset, mode);
    if (!hit) {
      ++r.excluded;
      continue;
    }
    ++r.rate.total;
    if (*hit) ++r.rate.hits;
  }
  return r;
}

// Percentage of answers with an attributed passage under (pool, subset).
inline AisResult ais(std::span<const Example> examples, const LabelMap& labels,
                     Pool pool, Subset subset = Subset::any,
                     Top1Mode mode = Top1Mode::within_subset) {
  return ais_where(examples, labels, pool, subset, mode,
                   [](const Example&) { return true; });
}

struct EmBreakdown {
  AisResult of_em;
  AisResult non_em;
};

// AIS restricted to exact-matched and non-exact-matched answers. Examples
// missing from `em_bits` belong to neither stratum.
inline EmBreakdown ais_breakdown_by_em(std::span<const Example> examples,
                                       const LabelMap& labels,
                                       const std::map<std::string, bool>& em_bits,
                                       Pool pool = Pool::all,
                                       Subset subset = Subset::any,
                                       Top1Mode mode = Top1Mode::within_subset) {
  auto stratum = [&](bool want) {
    return ais_where(examples, labels, pool, subset, mode, [&](const Example& e) {
      auto it = em_bits.find(e.example_id);
      return it != em_bits.end() && it->second == want;
    });
  };
  return {stratum(true), stratum(false)};
}

inline AisResult ais_by_answer_type(std::span<const Example> examples,
                                    const LabelMap& labels, AnswerType type,
                                    Pool pool = Pool::all,
                                    Subset subset = Subset::any) {
  return ais_where(examples, labels, pool, subset, Top1Mode::within_subset,
                   [&](const Example& e) { return e.answer_type == type; });
}

// ---------------------------------------------------------------------------
// Detection metrics

namespace detail {

inline void check_aligned(std::size_t a, std::size_t b) {
  if (a != b) {
    throw ValidationError("labels", "length mismatch: " + std::to_string(a) +
                                        " scores vs " + std::to_string(b) + " labels");
  }
}

inline std::pair<long, long> class_counts(std::span<const int> labels) {
  long pos = 0;
  for (int l : labels) pos += (l != 0);
  return {pos, static_cast<long>(labels.size()) - pos};
}

}  // namespace detail

// Probability that a random positive outscores a random negative, ties
// counting one half. Mann-Whitney U over mid-ranks, O(n log n).
inline double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  detail::check_aligned(scores.size(), labels.size());
  const auto [pos, neg] = detail::class_counts(labels);
  if (pos == 0 || neg == 0) {
    throw UndefinedMetric("ROC-AUC needs both classes");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Ranks are 1-based; twice the mid-rank of a tie block [i, j) is i + j + 1,
  // which keeps the sum integral.
  double twice_rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    long block_pos = 0;
    for (std::size_t k = i; k < j; ++k) block_pos += (labels[order[k]] != 0);
    twice_rank_sum += static_cast<double>(block_pos) * static_cast<double>(i + j + 1);
    i = j;
  }
  const double p = static_cast<double>(pos);
  const double u = twice_rank_sum / 2.0 - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(neg));
}

// Percentage of labels equal to [score >= threshold].
inline double accuracy_at(std::span<const double> scores, std::span<const int> labels,
                          double threshold) {
  detail::check_aligned(scores.size(), labels.size());
  if (scores.empty()) throw UndefinedMetric("accuracy: empty input");
  long correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    correct += ((scores[i] >= threshold) == (labels[i] != 0));
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(scores.size());
}

struct Calibration {
  double threshold = 0.5;
  double accuracy = 0.0;  // percentage on the calibration set
};

// Candidate thresholds: one below the minimum score, midpoints between
// adjacent distinct scores, one above the maximum. Returns the smallest
// candidate reaching the best accuracy.
inline std::vector<double> threshold_candidates(std::span<const double> scores) {
  std::vector<double> distinct(scores.begin(), scores.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<double> out;
  if (distinct.empty()) return out;
  out.push_back(distinct.front() - 1.0);
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
    double mid = distinct[i] + (distinct[i + 1] - distinct[i]) / 2.0;
    // Adjacent doubles: the midpoint may round onto the lower score.
    if (mid <= distinct[i]) mid = distinct[i + 1];
    out.push_back(mid);
  }
  out.push_back(distinct.back() + 1.0);
  return out;
}

inline Calibration calibrate_threshold(std::span<const double> scores,
                                       std::span<const int> labels) {
  detail::check_aligned(scores.size(), labels.size());
  const auto [pos, neg] = detail::class_counts(labels);
  if (pos == 0 || neg == 0) {
    throw UndefinedMetric("threshold calibration needs both classes");
  }
  const std::vector<double> candidates = threshold_candidates(scores);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Below every score all predictions are positive.
  long correct = pos;
  long best = correct;
  std::size_t best_index = 0;
  std::size_t i = 0;
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    // Scores below candidate c flip to negative.
    while (i < order.size() && scores[order[i]] < candidates[c]) {
      correct += labels[order[i]] != 0 ? -1 : 1;
      ++i;
    }
    if (correct > best) {
      best = correct;
      best_index = c;
    }
  }
  return {candidates[best_index],
          100.0 * static_cast<double>(best) / static_cast<double>(scores.size())};
}

// Among examples with EM=0 and gold label 1, the percentage with
// score >= threshold.
inline double non_em_detection_rate(std::span<const double> scores,
                                    std::span<const int> labels,
                                    const std::vector<bool>& em_bits,
                                    double threshold) {
  detail::check_aligned(scores.size(), labels.size());
  detail::check_aligned(scores.size(), em_bits.size());
  Rate r;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (em_bits[i] || labels[i] == 0) continue;
    ++r.total;
    if (scores[i] >= threshold) ++r.hits;
  }
  return r.percent_or_throw("non-EM detection rate");
}

// ---------------------------------------------------------------------------
// Passage language distribution

struct LanguageDistribution {
  long in_language = 0;
  long english = 0;
  long other = 0;

  long total() const { return in_language + english + other; }
  std::optional<double> percent(long count) const {
    return Rate{count, total()}.percent();
  }
};

// Per query language, how pooled passages split into in-language, English
// and other. For English queries English passages are in-language.
inline std::map<LanguageCode, LanguageDistribution> passage_language_distribution(
    std::span<const Example> examples) {
  std::map<LanguageCode, LanguageDistribution> out;
  for (const auto& e : examples) {
    auto& d = out[e.query_language];
    for (const auto& p : e.passages) {
      if (p.source_language() == e.query_language) {
        ++d.in_language;
      } else if (p.source_language() == english()) {
        ++d.english;
      } else {
        ++d.other;
      }
    }
  }
  return out;
}

}  // namespace xattr
