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

// EvalReport: per-language metric tables, built from the metrics module and
// rendered as TSV or Markdown. Rendering only rounds (half-up, one decimal
// for percentages); every number comes from build_report.

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xattr/aggregate.hpp"
#include "xattr/ingest.hpp"
#include "xattr/metrics.hpp"
#include "xattr/rerank.hpp"

namespace xattr {

using Metric = std::optional<double>;

// top-1 / all pair of AIS percentages.
struct PoolCell {
  Metric top1;
  Metric all;

  bool operator==(const PoolCell&) const = default;
};

struct SubsetRow {
  PoolCell ais;
  PoolCell of_em;
  PoolCell non_em;

  bool operator==(const SubsetRow&) const = default;
};

struct LanguageReport {
  std::string language;  // "Avg." for the average row

  long examples = 0;
  long evaluated = 0;
  long excluded = 0;

  SubsetRow any, lang, en;
  Metric ais_of_em;   // under the configured pool/subset
  Metric ais_non_em;
  Metric ais_reranked;
  Metric relative_improvement;
  Metric ais_yes_no;
  Metric ais_short_span;

  Metric threshold;
  Metric accuracy;
  Metric roc_auc;  // in [0, 1]
  Metric non_em_detection;

  long s1_queries = 0, s1_triples = 0, s2_queries = 0, s2_triples = 0;
  Metric agreement_s1;
  Metric agreement_s2;
  Metric scenario_disagreement;
  Metric scenario_disagreement_translated;

  Metric passages_in_language;
  Metric passages_english;
  Metric passages_other;

  bool operator==(const LanguageReport&) const = default;

  // Visits every metric as (key, field); shared by JSON encoding and the
  // average row.
  template <typename Self, typename Fn>
  static void visit_metrics(Self& r, Fn&& fn) {
    auto subset = [&](const char* name, auto& row) {
      const std::string p = name;
      fn(p + ".ais.top1", row.ais.top1);
      fn(p + ".ais.all", row.ais.all);
      fn(p + ".of_em.top1", row.of_em.top1);
      fn(p + ".of_em.all", row.of_em.all);
      fn(p + ".non_em.top1", row.non_em.top1);
      fn(p + ".non_em.all", row.non_em.all);
    };
    subset("any", r.any);
    subset("lang", r.lang);
    subset("en", r.en);
    fn("ais_of_em", r.ais_of_em);
    fn("ais_non_em", r.ais_non_em);
    fn("ais_reranked", r.ais_reranked);
    fn("relative_improvement", r.relative_improvement);
    fn("ais_yes_no", r.ais_yes_no);
    fn("ais_short_span", r.ais_short_span);
    fn("threshold", r.threshold);
    fn("accuracy", r.accuracy);
    fn("roc_auc", r.roc_auc);
    fn("non_em_detection", r.non_em_detection);
    fn("agreement_s1", r.agreement_s1);
    fn("agreement_s2", r.agreement_s2);
    fn("scenario_disagreement", r.scenario_disagreement);
    fn("scenario_disagreement_translated", r.scenario_disagreement_translated);
    fn("passages_in_language", r.passages_in_language);
    fn("passages_english", r.passages_english);
    fn("passages_other", r.passages_other);
  }

  template <typename Self, typename Fn>
  static void visit_counts(Self& r, Fn&& fn) {
    fn("examples", r.examples);
    fn("evaluated", r.evaluated);
    fn("excluded", r.excluded);
    fn("s1_queries", r.s1_queries);
    fn("s1_triples", r.s1_triples);
    fn("s2_queries", r.s2_queries);
    fn("s2_triples", r.s2_triples);
  }
};

struct EvalReport {
  std::string scenario;
  std::string scorer;      // empty when no scorer ran
  std::string pool;
  std::string subset;
  std::string top1_mode;
  std::vector<LanguageReport> languages;  // sorted by language code
  std::optional<LanguageReport> average;

  bool operator==(const EvalReport&) const = default;
};

// ---------------------------------------------------------------------------
// Building

struct ReportOptions {
  Scenario scenario = Scenario::in_language;
  Pool pool = Pool::all;
  Subset subset = Subset::any;
  Top1Mode top1_mode = Top1Mode::within_subset;
  // Decision threshold: per-language values win over the global one; with
  // neither, accuracy and non-EM detection are absent.
  std::optional<double> threshold;
  std::map<std::string, double> language_thresholds;
};

struct ReportInputs {
  std::span<const Example> examples;
  LabelMap labels;                             // gold labels for `scenario`
  std::span<const RatingRecord> ratings;       // optional, both scenarios
  std::optional<ScoreTable> scores;            // optional scorer outputs
  std::string scorer_name;
};

namespace detail {

template <typename Fn>
Metric try_metric(Fn&& fn) {
  try {
    return fn();
  } catch (const UndefinedMetric&) {
    return std::nullopt;
  }
}

inline PoolCell pool_cell(const std::function<AisResult(Pool)>& f) {
  return {f(Pool::top1).percent(), f(Pool::all).percent()};
}

}  // namespace detail

inline LanguageReport build_language_report(const std::string& language,
                                            std::span<const Example> examples,
                                            const ReportInputs& in,
                                            const ReportOptions& opt) {
  LanguageReport r;
  r.language = language;
  r.examples = static_cast<long>(examples.size());
  const auto em = exact_match_bits(examples);

  auto subset_row = [&](Subset s) {
    SubsetRow row;
    row.ais = detail::pool_cell([&](Pool p) { return ais(examples, in.labels, p, s, opt.top1_mode); });
    row.of_em = detail::pool_cell([&](Pool p) {
      return ais_breakdown_by_em(examples, in.labels, em, p, s, opt.top1_mode).of_em;
    });
    row.non_em = detail::pool_cell([&](Pool p) {
      return ais_breakdown_by_em(examples, in.labels, em, p, s, opt.top1_mode).non_em;
    });
    return row;
  };
  r.any = subset_row(Subset::any);
  r.lang = subset_row(Subset::in_language);
  r.en = subset_row(Subset::english_exclusive);

  const AisResult headline = ais(examples, in.labels, Pool::all, Subset::any);
  r.evaluated = headline.rate.total;
  r.excluded = headline.excluded;
  const EmBreakdown configured =
      ais_breakdown_by_em(examples, in.labels, em, opt.pool, opt.subset, opt.top1_mode);
  r.ais_of_em = configured.of_em.percent();
  r.ais_non_em = configured.non_em.percent();
  r.ais_yes_no = ais_by_answer_type(examples, in.labels, AnswerType::yes_no).percent();
  r.ais_short_span = ais_by_answer_type(examples, in.labels, AnswerType::short_span).percent();

  if (in.scores) {
    r.ais_reranked = reranked_ais(examples, in.labels, *in.scores).ais.percent();
    if (r.any.ais.top1 && r.ais_reranked) {
      r.relative_improvement = detail::try_metric(
          [&] { return relative_improvement(*r.any.ais.top1, *r.ais_reranked); });
    }
    std::vector<double> scores;
    std::vector<int> labels;
    std::vector<bool> em_bits;
    for (const auto& e : examples) {
      const auto& scored = in.scores->at(e.example_id);
      for (const auto& s : scored) {
        auto it = in.labels.find({e.example_id, s.passage_id});
        if (it == in.labels.end()) continue;
        scores.push_back(s.score);
        labels.push_back(it->second);
        auto bit = em.find(e.example_id);
        em_bits.push_back(bit != em.end() && bit->second);
      }
    }
    r.roc_auc = detail::try_metric([&] { return roc_auc(scores, labels); });
    if (auto t = opt.language_thresholds.find(language); t != opt.language_thresholds.end()) {
      r.threshold = t->second;
    } else {
      r.threshold = opt.threshold;
    }
    if (r.threshold) {
      r.accuracy = detail::try_metric([&] { return accuracy_at(scores, labels, *r.threshold); });
      r.non_em_detection = detail::try_metric(
          [&] { return non_em_detection_rate(scores, labels, em_bits, *r.threshold); });
    }
  }

  if (!in.ratings.empty()) {
    std::set<std::string> ids;
    for (const auto& e : examples) ids.insert(e.example_id);
    std::vector<RatingRecord> mine;
    for (const auto& rr : in.ratings) {
      if (ids.count(rr.example_id)) mine.push_back(rr);
    }
    const auto s1 = aggregate_all(mine, Scenario::in_language);
    const auto s2 = aggregate_all(mine, Scenario::in_english);
    auto count_queries = [](const std::vector<AttributionJudgment>& js) {
      std::set<std::string> q;
      for (const auto& j : js) q.insert(j.example_id);
      return static_cast<long>(q.size());
    };
    r.s1_queries = count_queries(s1.judgments);
    r.s1_triples = static_cast<long>(s1.judgments.size());
    r.s2_queries = count_queries(s2.judgments);
    r.s2_triples = static_cast<long>(s2.judgments.size());
    r.agreement_s1 = detail::try_metric([&] { return agreement_with_consensus(s1.judgments, mine); });
    r.agreement_s2 = detail::try_metric([&] { return agreement_with_consensus(s2.judgments, mine); });
    const LabelMap m1 = label_map(s1.judgments);
    const LabelMap m2 = label_map(s2.judgments);
    r.scenario_disagreement = detail::try_metric([&] { return scenario_disagreement(m1, m2); });
    std::set<PairKey> translated;
    for (const auto& e : examples) {
      for (const auto& p : e.passages) {
        if (translated_from_english_in_s1(e, p)) translated.insert({e.example_id, p.passage_id});
      }
    }
    r.scenario_disagreement_translated = detail::try_metric([&] {
      return scenario_disagreement(m1, m2, [&](const PairKey& k) { return translated.count(k) > 0; });
    });
  }

  const auto dist = passage_language_distribution(examples);
  if (!dist.empty()) {
    const auto& d = dist.begin()->second;
    r.passages_in_language = d.percent(d.in_language);
    r.passages_english = d.percent(d.english);
    r.passages_other = d.percent(d.other);
  }
  return r;
}

// Arithmetic mean of every metric over the languages that define it.
inline LanguageReport average_row(const std::vector<LanguageReport>& rows) {
  LanguageReport avg;
  avg.language = "Avg.";
  std::map<std::string, std::pair<double, int>> sums;
  for (const auto& row : rows) {
    LanguageReport::visit_metrics(row, [&](const std::string& key, const Metric& m) {
      if (m) {
        sums[key].first += *m;
        sums[key].second += 1;
      }
    });
  }
  LanguageReport::visit_metrics(avg, [&](const std::string& key, Metric& m) {
    auto it = sums.find(key);
    if (it != sums.end()) m = it->second.first / it->second.second;
  });
  return avg;
}

inline EvalReport build_report(const ReportInputs& in, const ReportOptions& opt) {
  EvalReport report;
  report.scenario = std::string(to_string(opt.scenario));
  report.scorer = in.scores ? in.scorer_name : "";
  report.pool = std::string(to_string(opt.pool));
  report.subset = std::string(to_string(opt.subset));
  report.top1_mode = std::string(to_string(opt.top1_mode));
  std::map<LanguageCode, std::vector<Example>> by_language;
  for (const auto& e : in.examples) by_language[e.query_language].push_back(e);
  for (auto& [lang, examples] : by_language) {
    std::sort(examples.begin(), examples.end(),
              [](const Example& a, const Example& b) { return a.example_id < b.example_id; });
    report.languages.push_back(build_language_report(lang.str(), examples, in, opt));
  }
  if (!report.languages.empty()) report.average = average_row(report.languages);
  return report;
}

// ---------------------------------------------------------------------------
// JSON

inline ordered_json language_report_to_json(const LanguageReport& r) {
  ordered_json j;
  j["language"] = r.language;
  LanguageReport::visit_counts(r, [&](const char* key, const long& v) { j[key] = v; });
  LanguageReport::visit_metrics(r, [&](const std::string& key, const Metric& m) {
    j[key] = m ? ordered_json(*m) : ordered_json(nullptr);
  });
  return j;
}

inline LanguageReport language_report_from_json(const json& j) {
  LanguageReport r;
  r.language = detail::require_string(j, "language");
  LanguageReport::visit_counts(r, [&](const char* key, long& v) {
    v = detail::require(j, key, "").get<long>();
  });
  LanguageReport::visit_metrics(r, [&](const std::string& key, Metric& m) {
    auto it = j.find(key);
    if (it != j.end() && !it->is_null()) m = it->get<double>();
  });
  return r;
}

inline ordered_json report_to_json(const EvalReport& r) {
  ordered_json j;
  j["scenario"] = r.scenario;
  j["scorer"] = r.scorer;
  j["pool"] = r.pool;
  j["subset"] = r.subset;
  j["top1_mode"] = r.top1_mode;
  j["languages"] = ordered_json::array();
  for (const auto& l : r.languages) j["languages"].push_back(language_report_to_json(l));
  j["average"] = r.average ? language_report_to_json(*r.average) : ordered_json(nullptr);
  return j;
}

inline EvalReport report_from_json(const json& j) {
  EvalReport r;
  r.scenario = detail::require_string(j, "scenario");
  r.scorer = detail::require_string(j, "scorer");
  r.pool = detail::require_string(j, "pool");
  r.subset = detail::require_string(j, "subset");
  r.top1_mode = detail::require_string(j, "top1_mode");
  for (const auto& l : detail::require(j, "languages", "")) {
    r.languages.push_back(language_report_from_json(l));
  }
  if (j.contains("average") && !j["average"].is_null()) {
    r.average = language_report_from_json(j["average"]);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Rendering

enum class ReportFormat { tsv, markdown };

inline ReportFormat parse_format(std::string_view s) {
  if (s == "tsv") return ReportFormat::tsv;
  if (s == "md" || s == "markdown") return ReportFormat::markdown;
  throw ConfigError("format must be tsv|md, got \"" + std::string(s) + "\"");
}

// Half-up rounding at `decimals`; absent values render as "-".
inline std::string format_fixed(const Metric& v, int decimals = 1) {
  if (!v) return "-";
  const double scale = std::pow(10.0, decimals);
  // The epsilon absorbs binary representation error at exact halves.
  double rounded = std::floor(*v * scale + 0.5 + 1e-7) / scale;
  if (rounded == 0.0) rounded = 0.0;  // no "-0.0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, rounded);
  return buf;
}

inline std::string format_signed_percent(const Metric& v) {
  if (!v) return "-";
  std::string s = format_fixed(v);
  if (s.front() != '-') s.insert(s.begin(), '+');
  return s + "%";
}

inline std::string format_pair(const PoolCell& c) {
  return format_fixed(c.top1) + "/" + format_fixed(c.all);
}

namespace detail {

class TableWriter {
 public:
  TableWriter(std::ostream& out, ReportFormat format) : out_(out), format_(format) {}

  void section(const std::string& title, const std::vector<std::string>& header) {
    if (sections_++) out_ << '\n';
    if (format_ == ReportFormat::markdown) {
      out_ << "## " << title << "\n\n";
      row(header);
      std::vector<std::string> rule(header.size(), "---");
      row(rule);
    } else {
      out_ << "# " << title << '\n';
      row(header);
    }
  }

  void row(const std::vector<std::string>& cells) {
    if (format_ == ReportFormat::markdown) {
      out_ << '|';
      for (const auto& c : cells) out_ << ' ' << c << " |";
    } else {
      for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "\t" : "") << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ostream& out_;
  ReportFormat format_;
  int sections_ = 0;
};

}  // namespace detail

enum ReportSection : unsigned {
  kCoverage = 1u << 0,
  kReranking = 1u << 1,
  kSubsets = 1u << 2,
  kEmBreakdown = 1u << 3,
  kAnswerType = 1u << 4,
  kDetection = 1u << 5,
  kAgreement = 1u << 6,
  kPassageLanguages = 1u << 7,
  kAllSections = (1u << 8) - 1,
};

// Deterministic rendering of the report tables.
inline void emit_report(std::ostream& out, const EvalReport& r, ReportFormat format,
                        unsigned sections = kAllSections) {
  const bool md = format == ReportFormat::markdown;
  if (md) {
    out << "# Attribution report\n\n";
    out << "scenario: " << r.scenario << ", scorer: " << (r.scorer.empty() ? "none" : r.scorer)
        << ", EM breakdown: " << r.pool << "/" << r.subset << ", top-1: " << r.top1_mode
        << "\n\n";
  } else {
    out << "# scenario\t" << r.scenario << "\n# scorer\t" << (r.scorer.empty() ? "none" : r.scorer)
        << "\n# em_breakdown\t" << r.pool << "/" << r.subset << "\n# top1_mode\t" << r.top1_mode
        << "\n\n";
  }
  detail::TableWriter w(out, format);
  std::vector<const LanguageReport*> with_avg;
  for (const auto& l : r.languages) with_avg.push_back(&l);
  if (r.average) with_avg.push_back(&*r.average);

  if (sections & kCoverage) {
    w.section("Coverage", {"Lang.", "examples", "evaluated", "excluded"});
    for (const auto& l : r.languages) {
      w.row({l.language, std::to_string(l.examples), std::to_string(l.evaluated),
             std::to_string(l.excluded)});
    }
  }

  if (sections & kReranking) {
    if (md) {
      w.section("Reranking", {"Lang.", "top-1", "all", "reranked"});
    } else {
      w.section("Reranking", {"Lang.", "top-1", "all", "reranked", "relative_improvement"});
    }
    for (const auto* l : with_avg) {
      if (md) {
        std::string reranked = format_fixed(l->ais_reranked);
        if (l->relative_improvement) {
          reranked += " (" + format_signed_percent(l->relative_improvement) + ")";
        }
        w.row({l->language, format_fixed(l->any.ais.top1), format_fixed(l->any.ais.all), reranked});
      } else {
        w.row({l->language, format_fixed(l->any.ais.top1), format_fixed(l->any.ais.all),
               format_fixed(l->ais_reranked), format_signed_percent(l->relative_improvement)});
      }
    }
  }

  if (sections & kSubsets) {
    w.section("Attribution by passage subset (top-1/all)",
              {"Lang.", "Subset", "AIS", "of EM", "non-EM"});
    for (const auto* l : with_avg) {
      for (auto [name, row] : {std::pair{"any", &l->any}, std::pair{"lang", &l->lang},
                               std::pair{"en", &l->en}}) {
        w.row({l->language, name, format_pair(row->ais), format_pair(row->of_em),
               format_pair(row->non_em)});
      }
    }
  }

  if (sections & kEmBreakdown) {
    w.section("Exact-match breakdown (" + r.pool + "/" + r.subset + ")",
              {"Lang.", "of EM", "non-EM"});
    for (const auto* l : with_avg) {
      w.row({l->language, format_fixed(l->ais_of_em), format_fixed(l->ais_non_em)});
    }
  }

  if (sections & kAnswerType) {
    w.section("Answer type (all passages)", {"Lang.", "yes/no", "short spans", "all"});
    for (const auto* l : with_avg) {
      w.row({l->language, format_fixed(l->ais_yes_no), format_fixed(l->ais_short_span),
             format_fixed(l->any.ais.all)});
    }
  }

  if (sections & kDetection) {
    w.section("Attribution detection",
              {"Lang.", "threshold", "accuracy", "ROC AUC", "non-EM detected"});
    for (const auto* l : with_avg) {
      Metric auc;
      if (l->roc_auc) auc = *l->roc_auc * 100.0;
      w.row({l->language, format_fixed(l->threshold, 3), format_fixed(l->accuracy),
             format_fixed(auc), format_fixed(l->non_em_detection)});
    }
  }

  if (sections & kAgreement) {
    w.section("Annotation agreement", {"Lang.", "S1 queries/triples", "S2 queries/triples",
                                       "S1 agreement", "S2 agreement", "S1!=S2", "S1!=S2 Tr."});
    for (const auto* l : with_avg) {
      const bool avg = l == (r.average ? &*r.average : nullptr);
      w.row({l->language,
             avg ? "-" : std::to_string(l->s1_queries) + "/" + std::to_string(l->s1_triples),
             avg ? "-" : std::to_string(l->s2_queries) + "/" + std::to_string(l->s2_triples),
             format_fixed(l->agreement_s1), format_fixed(l->agreement_s2),
             format_fixed(l->scenario_disagreement),
             format_fixed(l->scenario_disagreement_translated)});
    }
  }

  if (sections & kPassageLanguages) {
    w.section("Retrieved passage languages", {"Lang.", "in-lang", "en", "others"});
    for (const auto& l : r.languages) {
      w.row({l.language, format_fixed(l.passages_in_language), format_fixed(l.passages_english),
             format_fixed(l.passages_other)});
    }
  }
}

inline std::string render_report(const EvalReport& r, ReportFormat format) {
  std::ostringstream out;
  emit_report(out, r, format);
  return out.str();
}

}  // namespace xattr
