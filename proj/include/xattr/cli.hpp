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

// The `xattr` command line: ingest, aggregate, agreement, score, calibrate,
// evaluate, rerank, mine and report. Option values resolve as
// flag > --config file > environment (endpoints only) > default.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "xattr/aggregate.hpp"
#include "xattr/error.hpp"
#include "xattr/ingest.hpp"
#include "xattr/metrics.hpp"
#include "xattr/mine.hpp"
#include "xattr/parallel.hpp"
#include "xattr/remote.hpp"
#include "xattr/report.hpp"
#include "xattr/rerank.hpp"
#include "xattr/scorer.hpp"
#include "xattr/translate.hpp"

namespace xattr::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,       // bad flags or configuration
  kInput = 3,       // unreadable or invalid input files
  kRemote = 4,      // scorer or translator endpoint failures
  kUndefined = 5,   // a requested metric is undefined on the data
};

struct Options {
  std::string config;
  std::string examples, ratings, judgments, scores, documents, report, lexicon;
  std::string thresholds, translation_cache, out;
  std::string scorer = "string-match";
  std::string endpoint, translate_endpoint;
  std::string scenario = "in_language";
  std::string subset = "any";
  std::string pool = "all";
  std::string top1_mode = "within_subset";
  std::string format = "md";
  std::string mock_mode = "hashed";
  std::string template_id{kDefaultTemplateId};
  std::optional<double> threshold;
  std::optional<std::uint64_t> seed;
  double epsilon = 0.0;
  int k = 10;
  unsigned jobs = 1;
  int batch_size = 16;
};

// Keys accepted in the --config JSON object, mapped onto Options.
inline const std::map<std::string, std::function<void(Options&, const json&)>>& config_keys() {
  static const std::map<std::string, std::function<void(Options&, const json&)>> keys = [] {
    std::map<std::string, std::function<void(Options&, const json&)>> m;
    auto str = [&](const char* key, std::string Options::*field) {
      m[key] = [field](Options& o, const json& v) { o.*field = v.get<std::string>(); };
    };
    str("examples", &Options::examples);
    str("ratings", &Options::ratings);
    str("judgments", &Options::judgments);
    str("scores", &Options::scores);
    str("documents", &Options::documents);
    str("report", &Options::report);
    str("lexicon", &Options::lexicon);
    str("thresholds", &Options::thresholds);
    str("translation_cache", &Options::translation_cache);
    str("out", &Options::out);
    str("scorer", &Options::scorer);
    str("endpoint", &Options::endpoint);
    str("translate_endpoint", &Options::translate_endpoint);
    str("scenario", &Options::scenario);
    str("subset", &Options::subset);
    str("pool", &Options::pool);
    str("top1_mode", &Options::top1_mode);
    str("format", &Options::format);
    str("mock_mode", &Options::mock_mode);
    str("template", &Options::template_id);
    m["threshold"] = [](Options& o, const json& v) { o.threshold = v.get<double>(); };
    m["seed"] = [](Options& o, const json& v) { o.seed = v.get<std::uint64_t>(); };
    m["epsilon"] = [](Options& o, const json& v) { o.epsilon = v.get<double>(); };
    m["k"] = [](Options& o, const json& v) { o.k = v.get<int>(); };
    m["jobs"] = [](Options& o, const json& v) { o.jobs = v.get<unsigned>(); };
    m["batch_size"] = [](Options& o, const json& v) { o.batch_size = v.get<int>(); };
    return m;
  }();
  return keys;
}

// Fills options that were not given as flags from the config file, then
// endpoints still unset from the environment.
inline void resolve_options(Options& o, const std::set<std::string>& given) {
  if (!o.config.empty()) {
    if (!fs::is_regular_file(o.config)) throw ConfigError("config " + o.config + " not found");
    auto in = detail::open_input(o.config);
    json cfg;
    try {
      cfg = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config " + o.config + " is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config " + o.config + " must be a JSON object");
    for (const auto& [key, value] : cfg.items()) {
      auto it = config_keys().find(key);
      if (it == config_keys().end()) {
        throw ConfigError("config " + o.config + ": unknown key \"" + key + "\"");
      }
      if (given.count(key)) continue;
      try {
        it->second(o, value);
      } catch (const json::exception&) {
        throw ConfigError("config " + o.config + ": key \"" + key + "\" has the wrong type");
      }
    }
  }
  auto env = [](const char* name) -> std::string {
    const char* v = std::getenv(name);
    return v ? v : "";
  };
  if (o.endpoint.empty()) o.endpoint = env("XATTR_SCORER_ENDPOINT");
  if (o.translate_endpoint.empty()) o.translate_endpoint = env("XATTR_TRANSLATE_ENDPOINT");
}

// ---------------------------------------------------------------------------
// Loading

inline void require_option(const std::string& value, const std::string& command,
                           const std::string& flag) {
  if (value.empty()) throw ConfigError(command + " requires " + flag);
}

inline void sort_examples(std::vector<Example>& examples) {
  std::sort(examples.begin(), examples.end(), [](const Example& a, const Example& b) {
    if (a.query_language != b.query_language) return a.query_language < b.query_language;
    return a.example_id < b.example_id;
  });
}

inline YesNoLexicon lexicon_for(const Options& o) {
  return o.lexicon.empty() ? default_lexicon() : YesNoLexicon::load(o.lexicon);
}

inline Dataset load_inputs(const Options& o, const std::string& command) {
  require_option(o.examples, command, "--examples");
  std::optional<fs::path> ratings;
  if (!o.ratings.empty()) ratings = o.ratings;
  Dataset ds = load_dataset(o.examples, ratings, lexicon_for(o));
  sort_examples(ds.examples);
  return ds;
}

// Gold labels for the configured scenario, from --judgments or by
// aggregating --ratings.
inline std::optional<LabelMap> load_labels(const Options& o, const Dataset& ds) {
  const Scenario scenario = parse_scenario(o.scenario);
  if (!o.judgments.empty()) return label_map(load_judgments(o.judgments), scenario);
  if (!ds.ratings.empty()) return label_map(aggregate_all(ds.ratings, scenario).judgments);
  return std::nullopt;
}

inline LabelMap require_labels(const Options& o, const Dataset& ds, const std::string& command) {
  auto labels = load_labels(o, ds);
  if (!labels) throw ConfigError(command + " requires --judgments or --ratings");
  return *labels;
}

// ---------------------------------------------------------------------------
// Scoring

struct ScorerBundle {
  std::unique_ptr<TranslationClient> translation_client;
  std::unique_ptr<TranslationCache> translation_cache;
  std::unique_ptr<Scorer> scorer;
};

inline MockMode parse_mock_mode(std::string_view s) {
  if (s == "hashed") return MockMode::hashed;
  if (s == "constant") return MockMode::constant;
  if (s == "oracle") return MockMode::oracle;
  if (s == "noisy-oracle" || s == "noisy_oracle") return MockMode::noisy_oracle;
  throw ConfigError("mock mode must be hashed|constant|oracle|noisy-oracle, got \"" +
                    std::string(s) + "\"");
}

inline ScorerBundle make_scorer(const Options& o, const std::optional<LabelMap>& labels) {
  ScorerBundle b;
  if (o.scorer == "string-match") {
    b.scorer = std::make_unique<StringMatchScorer>();
  } else if (o.scorer == "string-match-tt") {
    if (o.translate_endpoint.empty()) {
      throw ConfigError(
          "scorer string-match-tt requires --translate-endpoint or XATTR_TRANSLATE_ENDPOINT");
    }
    b.translation_client = std::make_unique<HttpTranslationClient>(o.translate_endpoint);
    b.translation_cache = o.translation_cache.empty()
                              ? std::make_unique<TranslationCache>()
                              : std::make_unique<TranslationCache>(o.translation_cache);
    b.scorer = std::make_unique<TranslateTestStringMatchScorer>(
        Translator{b.translation_client.get(), b.translation_cache.get()});
  } else if (o.scorer == "remote") {
    ScorerSpec spec;
    spec.name = "remote";
    spec.kind = ScorerKind::remote_entailment;
    if (!o.endpoint.empty()) spec.endpoint = o.endpoint;
    spec.template_id = o.template_id;
    if (!spec.endpoint) {
      throw ConfigError("scorer remote requires --endpoint or XATTR_SCORER_ENDPOINT");
    }
    HttpOptions http;
    http.max_in_flight = static_cast<int>(std::max(1u, o.jobs));
    b.scorer = std::make_unique<RemoteScorer>(spec, http);
  } else if (o.scorer == "mock") {
    if (!o.seed) throw ConfigError("scorer mock requires --seed");
    MockConfig cfg;
    cfg.seed = *o.seed;
    cfg.mode = parse_mock_mode(o.mock_mode);
    cfg.epsilon = o.epsilon;
    b.scorer = std::make_unique<MockScorer>(cfg, labels, "mock-" + o.mock_mode);
  } else {
    throw ConfigError("scorer must be string-match|string-match-tt|remote|mock, got \"" +
                      o.scorer + "\"");
  }
  return b;
}

struct ScoringRun {
  std::vector<ScoreRecord> records;  // (language, example_id, rank) order
  std::vector<std::string> failures;
};

// Scores every (example, passage) pair in batches over `jobs` threads.
// Results land in fixed slots, so the output order never depends on timing.
inline ScoringRun score_examples(const std::vector<Example>& examples, const Scorer& scorer,
                                 unsigned jobs, int batch_size) {
  std::vector<ScoreItem> items;
  for (const auto& e : examples) {
    for (const auto& p : e.passages) items.push_back({&e, &p});
  }
  const std::size_t batch = static_cast<std::size_t>(std::max(1, batch_size));
  const std::size_t batches = (items.size() + batch - 1) / batch;
  std::vector<ScoreOutcome> outcomes(items.size());
  parallel_for(batches, jobs, [&](std::size_t b) {
    const std::size_t begin = b * batch;
    const std::size_t end = std::min(items.size(), begin + batch);
    auto part = scorer.score_many(std::span<const ScoreItem>(items).subspan(begin, end - begin));
    std::move(part.begin(), part.end(), outcomes.begin() + static_cast<std::ptrdiff_t>(begin));
  });
  ScoringRun run;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    if (outcomes[i].ok()) {
      run.records.push_back({item.example->example_id,
                             {item.passage->passage_id, *outcomes[i].score, scorer.name()}});
    } else {
      run.failures.push_back("(" + item.example->example_id + ", " + item.passage->passage_id +
                             "): " + outcomes[i].error);
    }
  }
  return run;
}

inline ScoreTable score_table(const std::vector<ScoreRecord>& records) {
  ScoreTable table;
  for (const auto& r : records) table[r.example_id].push_back(r.scored);
  return table;
}

// Scores from --scores, else from running the configured scorer. Item
// failures abort; for network-backed scorers they are transport failures.
inline std::vector<ScoreRecord> obtain_scores(const Options& o, const Dataset& ds,
                                              const std::optional<LabelMap>& labels) {
  if (!o.scores.empty()) return load_scores(o.scores);
  ScorerBundle b = make_scorer(o, labels);
  ScoringRun run = score_examples(ds.examples, *b.scorer, o.jobs, o.batch_size);
  if (!run.failures.empty()) {
    std::string msg = std::to_string(run.failures.size()) + " of " +
                      std::to_string(run.failures.size() + run.records.size()) +
                      " items failed to score; first: " + run.failures.front();
    if (o.scorer == "remote" || o.scorer == "string-match-tt") throw TransportError(msg, 0);
    throw ValidationError("scores", msg);
  }
  return run.records;
}

inline void write_scores(const fs::path& path, const std::vector<ScoreRecord>& records) {
  auto out = detail::open_output(path);
  write_jsonl(out, records, score_to_json);
}

inline fs::path out_path(const Options& o, const std::string& command, const std::string& name) {
  require_option(o.out, command, "--out");
  fs::create_directories(o.out);
  return fs::path(o.out) / name;
}

inline std::string format_extension(ReportFormat f) {
  return f == ReportFormat::tsv ? "tsv" : "md";
}

inline std::map<std::string, double> load_thresholds(const std::string& path) {
  std::map<std::string, double> out;
  if (path.empty()) return out;
  auto in = detail::open_input(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("thresholds " + path + " is not valid JSON: " + e.what());
  }
  for (const auto& [lang, v] : j.items()) {
    out[lang] = v.is_object() ? v.at("threshold").get<double>() : v.get<double>();
  }
  return out;
}

inline ReportOptions report_options(const Options& o) {
  ReportOptions r;
  r.scenario = parse_scenario(o.scenario);
  r.pool = parse_pool(o.pool);
  r.subset = parse_subset(o.subset);
  r.top1_mode = parse_top1_mode(o.top1_mode);
  r.language_thresholds = load_thresholds(o.thresholds);
  r.threshold = o.threshold;
  if (auto all = r.language_thresholds.find("all"); all != r.language_thresholds.end()) {
    if (!r.threshold) r.threshold = all->second;
    r.language_thresholds.erase(all);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Commands

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

inline int cmd_ingest(const Options& o, Streams io) {
  Dataset ds = load_inputs(o, "ingest");
  {
    auto out = detail::open_output(out_path(o, "ingest", "examples.jsonl"));
    write_examples(out, ds.examples, ds.metadata);
  }
  if (!ds.ratings.empty()) {
    auto out = detail::open_output(out_path(o, "ingest", "ratings.jsonl"));
    write_jsonl(out, ds.ratings, rating_to_json);
  }
  std::map<std::string, long> per_language;
  for (const auto& e : ds.examples) ++per_language[e.query_language.str()];
  io.out << "examples\t" << ds.examples.size() << "\nratings\t" << ds.ratings.size() << '\n';
  for (const auto& [lang, n] : per_language) io.out << "language\t" << lang << '\t' << n << '\n';
  return kOk;
}

inline int cmd_aggregate(const Options& o, Streams io) {
  require_option(o.ratings, "aggregate", "--ratings");
  std::vector<RatingRecord> ratings;
  if (!o.examples.empty()) {
    ratings = load_inputs(o, "aggregate").ratings;
  } else {
    ratings = load_ratings(o.ratings);
  }
  std::vector<AttributionJudgment> all;
  long excluded = 0;
  for (Scenario s : {Scenario::in_language, Scenario::in_english}) {
    auto r = aggregate_all(ratings, s);
    io.out << to_string(s) << "\tjudgments\t" << r.judgments.size() << "\texcluded\t"
           << r.excluded.size() << '\n';
    excluded += static_cast<long>(r.excluded.size());
    all.insert(all.end(), r.judgments.begin(), r.judgments.end());
  }
  auto out = detail::open_output(out_path(o, "aggregate", "judgments.jsonl"));
  write_jsonl(out, all, judgment_to_json);
  return kOk;
}

inline int cmd_agreement(const Options& o, Streams io) {
  require_option(o.ratings, "agreement", "--ratings");
  Dataset ds = load_inputs(o, "agreement");
  ReportInputs in;
  in.examples = ds.examples;
  in.ratings = ds.ratings;
  in.labels = label_map(aggregate_all(ds.ratings, parse_scenario(o.scenario)).judgments);
  const ReportFormat format = parse_format(o.format);
  EvalReport report = build_report(in, report_options(o));
  emit_report(io.out, report, format, kAgreement | kPassageLanguages);
  if (!o.out.empty()) {
    auto out = detail::open_output(out_path(o, "agreement", "agreement." + format_extension(format)));
    emit_report(out, report, format, kAgreement | kPassageLanguages);
  }
  return kOk;
}

inline int cmd_score(const Options& o, Streams io) {
  Dataset ds = load_inputs(o, "score");
  std::optional<LabelMap> labels = load_labels(o, ds);
  ScorerBundle b = make_scorer(o, labels);
  ScoringRun run = score_examples(ds.examples, *b.scorer, o.jobs, o.batch_size);
  write_scores(out_path(o, "score", "scores.jsonl"), run.records);
  io.out << "scored\t" << run.records.size() << "\nfailed\t" << run.failures.size() << '\n';
  if (!run.failures.empty()) {
    const std::size_t shown = std::min<std::size_t>(run.failures.size(), 3);
    for (std::size_t i = 0; i < shown; ++i) io.err << "error: remote: " << run.failures[i] << '\n';
    if (run.failures.size() > shown) {
      io.err << "error: remote: " << run.failures.size() - shown << " more failures\n";
    }
    return kRemote;
  }
  return kOk;
}

// Pairs with both a score and a gold label, grouped by query language.
struct LabeledScores {
  std::vector<double> scores;
  std::vector<int> labels;
};

inline std::map<std::string, LabeledScores> labeled_scores(const Dataset& ds,
                                                           const LabelMap& labels,
                                                           const ScoreTable& table) {
  std::map<std::string, LabeledScores> out;
  for (const auto& e : ds.examples) {
    auto it = table.find(e.example_id);
    if (it == table.end()) continue;
    for (const auto& s : it->second) {
      auto l = labels.find({e.example_id, s.passage_id});
      if (l == labels.end()) continue;
      auto& bucket = out[e.query_language.str()];
      bucket.scores.push_back(s.score);
      bucket.labels.push_back(l->second);
    }
  }
  return out;
}

// Per-language thresholds plus a pooled "all" entry. Languages whose pairs
// carry a single label class are skipped with a warning.
inline int cmd_calibrate(const Options& o, Streams io) {
  Dataset ds = load_inputs(o, "calibrate");
  const LabelMap labels = require_labels(o, ds, "calibrate");
  const ScoreTable table = score_table(obtain_scores(o, ds, labels));
  ordered_json result;
  LabeledScores pooled;
  io.out << "language\tthreshold\taccuracy\tpairs\n";
  auto emit = [&](const std::string& key, const LabeledScores& ls) {
    try {
      const Calibration c = calibrate_threshold(ls.scores, ls.labels);
      result[key] = {{"threshold", c.threshold},
                     {"accuracy", c.accuracy},
                     {"pairs", ls.scores.size()}};
      io.out << key << '\t' << format_fixed(c.threshold, 3) << '\t' << format_fixed(c.accuracy)
             << '\t' << ls.scores.size() << '\n';
    } catch (const UndefinedMetric& e) {
      io.err << "warning: " << key << ": " << e.what() << '\n';
    }
  };
  for (const auto& [lang, ls] : labeled_scores(ds, labels, table)) {
    emit(lang, ls);
    pooled.scores.insert(pooled.scores.end(), ls.scores.begin(), ls.scores.end());
    pooled.labels.insert(pooled.labels.end(), ls.labels.begin(), ls.labels.end());
  }
  emit("all", pooled);
  if (result.empty()) throw UndefinedMetric("no language has both label classes");
  auto out = detail::open_output(out_path(o, "calibrate", "thresholds.json"));
  out << result.dump(2) << '\n';
  return kOk;
}

inline int cmd_evaluate(const Options& o, Streams io) {
  Dataset ds = load_inputs(o, "evaluate");
  const LabelMap labels = require_labels(o, ds, "evaluate");
  const ReportFormat format = parse_format(o.format);
  std::vector<ScoreRecord> records = obtain_scores(o, ds, labels);
  if (o.scores.empty()) write_scores(out_path(o, "evaluate", "scores.jsonl"), records);
  ReportInputs in;
  in.examples = ds.examples;
  in.labels = labels;
  in.ratings = ds.ratings;
  in.scores = score_table(records);
  in.scorer_name = o.scores.empty() ? (o.scorer == "mock" ? "mock-" + o.mock_mode : o.scorer)
                                    : (records.empty() ? "scores" : records.front().scored.scorer_name);
  const EvalReport report = build_report(in, report_options(o));
  {
    auto out = detail::open_output(out_path(o, "evaluate", "eval_report.json"));
    out << report_to_json(report).dump(2) << '\n';
  }
  {
    auto out = detail::open_output(out_path(o, "evaluate", "report." + format_extension(format)));
    emit_report(out, report, format);
  }
  emit_report(io.out, report, format, kReranking | kDetection);
  return kOk;
}

inline int cmd_rerank(const Options& o, Streams io) {
  Dataset ds = load_inputs(o, "rerank");
  const std::optional<LabelMap> labels = load_labels(o, ds);
  const ScoreTable table = score_table(obtain_scores(o, ds, labels));
  auto out = detail::open_output(out_path(o, "rerank", "reranked.jsonl"));
  for (const auto& e : ds.examples) {
    auto it = table.find(e.example_id);
    if (it == table.end()) {
      throw ValidationError("scores", "no scores for example \"" + e.example_id + "\"");
    }
    const RerankChoice c = rerank(e, it->second);
    ordered_json j;
    j["example_id"] = e.example_id;
    j["selected_passage_id"] = c.passage_id;
    j["score"] = c.score;
    out << j.dump() << '\n';
  }
  if (labels) {
    io.out << "language\ttop-1\treranked\n";
    std::map<LanguageCode, std::vector<Example>> by_language;
    for (const auto& e : ds.examples) by_language[e.query_language].push_back(e);
    for (const auto& [lang, examples] : by_language) {
      io.out << lang.str() << '\t' << format_fixed(ais(examples, *labels, Pool::top1).percent())
             << '\t' << format_fixed(reranked_ais(examples, *labels, table).ais.percent()) << '\n';
    }
  }
  return kOk;
}

inline int cmd_mine(const Options& o, Streams io) {
  require_option(o.documents, "mine", "--documents");
  if (o.k < 1) throw ConfigError("--k must be at least 1");
  auto in = detail::open_input(o.documents);
  std::vector<MiningDocument> docs = read_documents(in);
  std::sort(docs.begin(), docs.end(), [](const MiningDocument& a, const MiningDocument& b) {
    if (a.language != b.language) return a.language < b.language;
    return a.doc_id < b.doc_id;
  });
  const std::uint64_t seed = o.seed.value_or(0);
  MineResult r = mine_corpus(docs, o.k, seed);
  for (const auto& w : r.warnings) io.err << "warning: " << w << '\n';
  auto out = detail::open_output(out_path(o, "mine", "train.jsonl"));
  const std::size_t n = r.pairs.size();
  emit_training_file(out, std::move(r.pairs), o.template_id, seed);
  io.out << "documents\t" << docs.size() << "\npairs\t" << n << '\n';
  return kOk;
}

inline int cmd_report(const Options& o, Streams io) {
  require_option(o.report, "report", "--report");
  auto in = detail::open_input(o.report);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(o.report, std::string("not valid JSON: ") + e.what());
  }
  const EvalReport report = report_from_json(j);
  const ReportFormat format = parse_format(o.format);
  if (o.out.empty()) {
    emit_report(io.out, report, format);
  } else {
    auto out = detail::open_output(out_path(o, "report", "report." + format_extension(format)));
    emit_report(out, report, format);
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// Entry point

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Attribution evaluation for multilingual question answering", "xattr"};
  app.require_subcommand(1);
  Options o;

  struct Command {
    const char* name;
    const char* help;
    std::vector<std::string> flags;
    int (*fn)(const Options&, Streams);
  };
  const std::vector<Command> commands = {
      {"ingest", "Validate and normalize examples (and ratings)",
       {"examples", "ratings", "lexicon", "out"}, cmd_ingest},
      {"aggregate", "Majority-vote ratings into judgments for both scenarios",
       {"examples", "ratings", "lexicon", "out"}, cmd_aggregate},
      {"agreement", "Rater agreement and scenario disagreement per language",
       {"examples", "ratings", "lexicon", "scenario", "format", "out"}, cmd_agreement},
      {"score", "Score every (example, passage) pair",
       {"examples", "ratings", "judgments", "lexicon", "scenario", "scorer", "endpoint",
        "translate-endpoint", "translation-cache", "template", "mock-mode", "epsilon", "seed",
        "jobs", "batch-size", "out"},
       cmd_score},
      {"calibrate", "Pick the accuracy-maximizing threshold per language",
       {"examples", "ratings", "judgments", "scores", "lexicon", "scenario", "scorer", "endpoint",
        "translate-endpoint", "translation-cache", "template", "mock-mode", "epsilon", "seed",
        "jobs", "batch-size", "out"},
       cmd_calibrate},
      {"evaluate", "Compute AIS, detection and agreement metrics and write the report",
       {"examples", "ratings", "judgments", "scores", "lexicon", "scenario", "subset", "pool",
        "top1-mode", "threshold", "thresholds", "scorer", "endpoint", "translate-endpoint",
        "translation-cache", "template", "mock-mode", "epsilon", "seed", "jobs", "batch-size",
        "format", "out"},
       cmd_evaluate},
      {"rerank", "Select the highest-scoring passage per example",
       {"examples", "ratings", "judgments", "scores", "lexicon", "scenario", "scorer", "endpoint",
        "translate-endpoint", "translation-cache", "template", "mock-mode", "epsilon", "seed",
        "jobs", "batch-size", "out"},
       cmd_rerank},
      {"mine", "Build NLI training pairs with in-document negatives",
       {"documents", "k", "seed", "template", "out"}, cmd_mine},
      {"report", "Render an eval_report.json as TSV or Markdown",
       {"report", "format", "out"}, cmd_report},
  };

  std::map<std::string, std::function<CLI::Option*(CLI::App*)>> option_factory = {
      {"examples", [&](CLI::App* s) { return s->add_option("--examples", o.examples, "Examples JSONL"); }},
      {"ratings", [&](CLI::App* s) { return s->add_option("--ratings", o.ratings, "Ratings JSONL"); }},
      {"judgments", [&](CLI::App* s) { return s->add_option("--judgments", o.judgments, "Judgments JSONL (instead of --ratings)"); }},
      {"scores", [&](CLI::App* s) { return s->add_option("--scores", o.scores, "Precomputed scores JSONL (skips scoring)"); }},
      {"documents", [&](CLI::App* s) { return s->add_option("--documents", o.documents, "Mining documents JSONL"); }},
      {"report", [&](CLI::App* s) { return s->add_option("--report", o.report, "eval_report.json to render"); }},
      {"lexicon", [&](CLI::App* s) { return s->add_option("--lexicon", o.lexicon, "Yes/no lexicon JSON"); }},
      {"thresholds", [&](CLI::App* s) { return s->add_option("--thresholds", o.thresholds, "Per-language thresholds JSON from calibrate"); }},
      {"translation-cache", [&](CLI::App* s) { return s->add_option("--translation-cache", o.translation_cache, "Persistent translation cache JSONL"); }},
      {"out", [&](CLI::App* s) { return s->add_option("--out", o.out, "Output directory"); }},
      {"scorer", [&](CLI::App* s) {
         return s->add_option("--scorer", o.scorer, "string-match|string-match-tt|remote|mock")
             ->check(CLI::IsMember({"string-match", "string-match-tt", "remote", "mock"}));
       }},
      {"endpoint", [&](CLI::App* s) { return s->add_option("--endpoint", o.endpoint, "Scorer service URL"); }},
      {"translate-endpoint", [&](CLI::App* s) { return s->add_option("--translate-endpoint", o.translate_endpoint, "Translation service URL"); }},
      {"scenario", [&](CLI::App* s) {
         return s->add_option("--scenario", o.scenario, "in_language|in_english")
             ->check(CLI::IsMember({"in_language", "in_english"}));
       }},
      {"subset", [&](CLI::App* s) {
         return s->add_option("--subset", o.subset, "Passage subset for the EM breakdown: any|lang|en")
             ->check(CLI::IsMember({"any", "lang", "en"}));
       }},
      {"pool", [&](CLI::App* s) {
         return s->add_option("--pool", o.pool, "Passage pool for the EM breakdown: top1|all")
             ->check(CLI::IsMember({"top1", "all"}));
       }},
      {"top1-mode", [&](CLI::App* s) {
         return s->add_option("--top1-mode", o.top1_mode, "Top-1 under a subset: within_subset|overall")
             ->check(CLI::IsMember({"within_subset", "overall"}));
       }},
      {"format", [&](CLI::App* s) {
         return s->add_option("--format", o.format, "tsv|md")->check(CLI::IsMember({"tsv", "md", "markdown"}));
       }},
      {"mock-mode", [&](CLI::App* s) {
         return s->add_option("--mock-mode", o.mock_mode, "hashed|constant|oracle|noisy-oracle")
             ->check(CLI::IsMember({"hashed", "constant", "oracle", "noisy-oracle"}));
       }},
      {"template", [&](CLI::App* s) { return s->add_option("--template", o.template_id, "Prompt template id"); }},
      {"threshold", [&](CLI::App* s) { return s->add_option("--threshold", o.threshold, "Decision threshold for accuracy"); }},
      {"seed", [&](CLI::App* s) { return s->add_option("--seed", o.seed, "Random seed"); }},
      {"epsilon", [&](CLI::App* s) {
         return s->add_option("--epsilon", o.epsilon, "Noisy-oracle flip probability")->check(CLI::Range(0.0, 1.0));
       }},
      {"k", [&](CLI::App* s) { return s->add_option("--k", o.k, "Negatives per document (default 10)"); }},
      {"jobs", [&](CLI::App* s) {
         return s->add_option("--jobs", o.jobs, "Worker threads (default 1)")->check(CLI::PositiveNumber);
       }},
      {"batch-size", [&](CLI::App* s) {
         return s->add_option("--batch-size", o.batch_size, "Pairs per scoring request")->check(CLI::PositiveNumber);
       }},
  };

  std::map<CLI::App*, const Command*> by_app;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", o.config, "JSON config file (flags win over it)");
    for (const auto& f : c.flags) option_factory.at(f)(sub);
    by_app[sub] = &c;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << "\n";
    return kUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  std::set<std::string> given;
  for (const CLI::Option* opt : chosen->get_options()) {
    if (opt->count() > 0) {
      std::string key = opt->get_single_name();
      std::replace(key.begin(), key.end(), '-', '_');
      given.insert(key);
    }
  }

  const Streams io{out, err};
  try {
    resolve_options(o, given);
    return by_app.at(chosen)->fn(o, io);
  } catch (const ConfigError& e) {
    err << "error: config: " << e.what() << '\n';
    return kUsage;
  } catch (const TransportError& e) {
    err << "error: transport: " << e.what() << '\n';
    return kRemote;
  } catch (const ProtocolError& e) {
    err << "error: protocol: " << e.what() << '\n';
    return kRemote;
  } catch (const UndefinedMetric& e) {
    err << "error: undefined metric: " << e.what() << '\n';
    return kUndefined;
  } catch (const ValidationError& e) {
    err << "error: invalid input: " << e.what() << '\n';
    return kInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: filesystem: " << e.what() << '\n';
    return kInput;
  }
}

}  // namespace xattr::cli
