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

// Line-delimited JSON readers and writers for examples, ratings, judgments
// and scores, plus the yes/no lexicon used to resolve missing answer types.
//
// Examples file, one object per line:
//   {"example_id": str, "query": str, "query_language": str, "answer": str,
//    "gold_answers": [str], "answer_type": "yes_no"|"short_span"|null,
//    "passages": [{"passage_id": str, "text": str, "language": str,
//                  "retrieval_rank": int}]}
// Passages may also carry "translated", "original_language" and
// "original_text"; examples may carry "translation". A first line of the form
// {"_meta": {...}} holds dataset metadata (source system, corpus snapshot,
// creation date) and is optional.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "xattr/core.hpp"
#include "xattr/text.hpp"

namespace xattr {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Schema violation at a known line of an input file.
class SchemaError : public ValidationError {
 public:
  SchemaError(int line, const std::string& field_path,
              const std::string& message)
      : ValidationError(field_path, "line " + std::to_string(line) + ": " +
                                        (field_path.empty() ? "" : field_path + ": ") +
                                        message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline const json& require(const json& obj, const char* key,
                           const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError(path + key, "missing required field");
  }
  return *it;
}

inline std::string require_string(const json& obj, const char* key,
                                  const std::string& path = "") {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw ValidationError(path + key, "expected string");
  return v.get<std::string>();
}

inline std::optional<bool> optional_bool(const json& obj, const char* key,
                                         const std::string& path = "") {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_boolean()) throw ValidationError(path + key, "expected bool|null");
  return it->get<bool>();
}

inline LanguageCode require_language(const json& obj, const char* key,
                                     const std::string& path = "") {
  std::string code = require_string(obj, key, path);
  if (!LanguageCode::is_valid(code)) {
    throw ValidationError(path + key, "invalid language code \"" + code + "\"");
  }
  return LanguageCode(std::move(code));
}

inline std::vector<std::string> string_list(const json& v,
                                            const std::string& path) {
  if (!v.is_array()) throw ValidationError(path, "expected array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) {
      throw ValidationError(path + "[" + std::to_string(i) + "]",
                            "expected string");
    }
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

// Calls `fn(json, line_number)` for every non-blank line of `in`, turning
// parse and validation failures into SchemaError with the line number.
template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(line_no, "", std::string("malformed JSON: ") + e.what());
    }
    if (!record.is_object()) {
      throw SchemaError(line_no, "", "expected a JSON object");
    }
    try {
      fn(record, line_no);
    } catch (const SchemaError&) {
      throw;
    } catch (const ValidationError& e) {
      // Strip the field path prefix the base class already baked in.
      std::string msg = e.what();
      const std::string prefix = e.field_path() + ": ";
      if (!e.field_path().empty() && msg.rfind(prefix, 0) == 0) {
        msg = msg.substr(prefix.size());
      }
      throw SchemaError(line_no, e.field_path(), msg);
    }
  }
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputFileError("cannot open " + path.string());
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Yes/no lexicon

// Per-language sets of answers that mark a yes/no question. Entries are
// stored normalized, so lookups compare normalized forms.
class YesNoLexicon {
 public:
  YesNoLexicon() = default;

  void add(const LanguageCode& lang, std::string_view token) {
    entries_[lang].insert(normalize(token));
  }

  bool has_language(const LanguageCode& lang) const {
    return entries_.count(lang) > 0;
  }

  const std::set<std::string>& entries(const LanguageCode& lang) const {
    auto it = entries_.find(lang);
    if (it == entries_.end()) {
      throw ConfigError("yes/no lexicon has no entries for language \"" +
                        lang.str() + "\"");
    }
    return it->second;
  }

  const std::map<LanguageCode, std::set<std::string>>& all() const {
    return entries_;
  }

  static YesNoLexicon from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("lexicon: expected an object");
    YesNoLexicon lex;
    for (const auto& [lang, tokens] : j.items()) {
      if (!LanguageCode::is_valid(lang)) {
        throw ConfigError("lexicon: invalid language code \"" + lang + "\"");
      }
      if (!tokens.is_array()) {
        throw ConfigError("lexicon: \"" + lang + "\" must map to an array");
      }
      LanguageCode code(lang);
      lex.entries_[code];
      for (const auto& t : tokens) {
        if (!t.is_string()) {
          throw ConfigError("lexicon: non-string token for \"" + lang + "\"");
        }
        lex.add(code, t.get<std::string>());
      }
    }
    return lex;
  }

  static YesNoLexicon load(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("lexicon " + path.string() + ": " + e.what());
    }
    return from_json(j);
  }

  ordered_json to_json() const {
    ordered_json j = ordered_json::object();
    for (const auto& [lang, tokens] : entries_) {
      j[lang.str()] = std::vector<std::string>(tokens.begin(), tokens.end());
    }
    return j;
  }

  bool operator==(const YesNoLexicon&) const = default;

 private:
  std::map<LanguageCode, std::set<std::string>> entries_;
};

// Built-in copy of data/lexicon/yes_no.v1.json. XOR-TyDi stores yes/no
// answers as English "yes"/"no" in every language; native forms are included
// for answers produced in-language.
inline const YesNoLexicon& default_lexicon() {
  static const YesNoLexicon lex = YesNoLexicon::from_json(json::parse(R"({
    "bn": ["yes", "no", "হ্যাঁ", "না"],
    "en": ["yes", "no"],
    "fi": ["yes", "no", "kyllä", "ei"],
    "ja": ["yes", "no", "はい", "いいえ"],
    "ru": ["yes", "no", "да", "нет"],
    "te": ["yes", "no", "అవును", "కాదు"]
  })"));
  return lex;
}

inline AnswerType infer_answer_type(std::string_view answer,
                                    const LanguageCode& lang,
                                    const YesNoLexicon& lexicon) {
  return lexicon.entries(lang).count(normalize(answer)) ? AnswerType::yes_no
                                                        : AnswerType::short_span;
}

// ---------------------------------------------------------------------------
// Record <-> JSON

inline ordered_json passage_to_json(const Passage& p) {
  ordered_json j;
  j["passage_id"] = p.passage_id;
  j["text"] = p.text;
  j["language"] = p.language.str();
  j["retrieval_rank"] = p.retrieval_rank;
  if (p.translated) j["translated"] = true;
  if (p.original_language) j["original_language"] = p.original_language->str();
  if (p.original_text) j["original_text"] = *p.original_text;
  return j;
}

inline Passage passage_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path, "expected object");
  const std::string prefix = path + ".";
  Passage p;
  p.passage_id = detail::require_string(j, "passage_id", prefix);
  p.text = detail::require_string(j, "text", prefix);
  p.language = detail::require_language(j, "language", prefix);
  const json& rank = detail::require(j, "retrieval_rank", prefix);
  if (!rank.is_number_integer()) {
    throw ValidationError(prefix + "retrieval_rank", "expected integer");
  }
  p.retrieval_rank = rank.get<int>();
  p.translated = detail::optional_bool(j, "translated", prefix).value_or(false);
  if (j.contains("original_language") && !j["original_language"].is_null()) {
    p.original_language = detail::require_language(j, "original_language", prefix);
  }
  if (j.contains("original_text") && !j["original_text"].is_null()) {
    p.original_text = detail::require_string(j, "original_text", prefix);
  }
  return p;
}

inline ordered_json example_to_json(const Example& e) {
  ordered_json j;
  j["example_id"] = e.example_id;
  j["query"] = e.query;
  j["query_language"] = e.query_language.str();
  j["answer"] = e.answer;
  j["gold_answers"] = e.gold_answers;
  j["answer_type"] = std::string(to_string(e.answer_type));
  j["passages"] = ordered_json::array();
  for (const auto& p : e.passages) j["passages"].push_back(passage_to_json(p));
  if (e.translation) {
    ordered_json t;
    t["target"] = e.translation->target.str();
    t["original_query"] = e.translation->original_query;
    t["original_answer"] = e.translation->original_answer;
    t["original_gold_answers"] = e.translation->original_gold_answers;
    j["translation"] = t;
  }
  return j;
}

// Parses and validates one example. A null or absent answer_type is resolved
// through `lexicon`.
inline Example example_from_json(const json& j,
                                 const YesNoLexicon& lexicon = default_lexicon()) {
  Example e;
  e.example_id = detail::require_string(j, "example_id");
  e.query = detail::require_string(j, "query");
  e.query_language = detail::require_language(j, "query_language");
  e.answer = detail::require_string(j, "answer");
  e.gold_answers = detail::string_list(detail::require(j, "gold_answers", ""),
                                       "gold_answers");
  const json& passages = detail::require(j, "passages", "");
  if (!passages.is_array()) throw ValidationError("passages", "expected array");
  for (std::size_t i = 0; i < passages.size(); ++i) {
    e.passages.push_back(
        passage_from_json(passages[i], "passages[" + std::to_string(i) + "]"));
  }
  std::stable_sort(e.passages.begin(), e.passages.end(),
                   [](const Passage& a, const Passage& b) {
                     return a.retrieval_rank < b.retrieval_rank;
                   });
  if (auto it = j.find("translation"); it != j.end() && !it->is_null()) {
    ExampleTranslation t;
    t.target = detail::require_language(*it, "target", "translation.");
    t.original_query = detail::require_string(*it, "original_query", "translation.");
    t.original_answer =
        detail::require_string(*it, "original_answer", "translation.");
    t.original_gold_answers = detail::string_list(
        detail::require(*it, "original_gold_answers", "translation."),
        "translation.original_gold_answers");
    e.translation = std::move(t);
  }
  validate_example(e);
  auto type = j.find("answer_type");
  if (type == j.end() || type->is_null()) {
    e.answer_type = infer_answer_type(e.answer, e.text_language(), lexicon);
  } else if (type->is_string()) {
    e.answer_type = parse_answer_type(type->get<std::string>());
  } else {
    throw ValidationError("answer_type", "expected string|null");
  }
  return e;
}

inline ordered_json rating_to_json(const RatingRecord& r) {
  ordered_json j;
  j["example_id"] = r.example_id;
  j["passage_id"] = r.passage_id;
  j["rater_id"] = r.rater_id;
  j["scenario"] = std::string(to_string(r.scenario));
  j["interpretable"] = r.interpretable ? ordered_json(*r.interpretable) : ordered_json(nullptr);
  j["attributed"] = r.attributed ? ordered_json(*r.attributed) : ordered_json(nullptr);
  j["flagged"] = r.flagged;
  return j;
}

inline RatingRecord rating_from_json(const json& j) {
  RatingRecord r;
  r.example_id = detail::require_string(j, "example_id");
  r.passage_id = detail::require_string(j, "passage_id");
  r.rater_id = detail::require_string(j, "rater_id");
  r.scenario = parse_scenario(detail::require_string(j, "scenario"));
  r.interpretable = detail::optional_bool(j, "interpretable");
  r.attributed = detail::optional_bool(j, "attributed");
  const json& flagged = detail::require(j, "flagged", "");
  if (!flagged.is_boolean()) throw ValidationError("flagged", "expected bool");
  r.flagged = flagged.get<bool>();
  validate_rating(r);
  return r;
}

inline ordered_json judgment_to_json(const AttributionJudgment& jd) {
  ordered_json j;
  j["example_id"] = jd.example_id;
  j["passage_id"] = jd.passage_id;
  j["scenario"] = std::string(to_string(jd.scenario));
  j["label"] = jd.label;
  j["yes_votes"] = jd.yes_votes;
  j["valid_rating_count"] = jd.valid_rating_count;
  return j;
}

inline AttributionJudgment judgment_from_json(const json& j) {
  AttributionJudgment jd;
  jd.example_id = detail::require_string(j, "example_id");
  jd.passage_id = detail::require_string(j, "passage_id");
  jd.scenario = parse_scenario(detail::require_string(j, "scenario"));
  auto integer = [&](const char* key) {
    const json& v = detail::require(j, key, "");
    if (!v.is_number_integer()) throw ValidationError(key, "expected integer");
    return v.get<int>();
  };
  jd.label = integer("label");
  jd.yes_votes = integer("yes_votes");
  jd.valid_rating_count = integer("valid_rating_count");
  validate_judgment(jd);
  return jd;
}

// One scorer output: {"example_id", "passage_id", "score", "scorer"}.
struct ScoreRecord {
  std::string example_id;
  ScoredPassage scored;

  bool operator==(const ScoreRecord&) const = default;
};

inline ordered_json score_to_json(const ScoreRecord& s) {
  ordered_json j;
  j["example_id"] = s.example_id;
  j["passage_id"] = s.scored.passage_id;
  j["score"] = s.scored.score;
  j["scorer"] = s.scored.scorer_name;
  return j;
}

inline ScoreRecord score_from_json(const json& j) {
  ScoreRecord s;
  s.example_id = detail::require_string(j, "example_id");
  s.scored.passage_id = detail::require_string(j, "passage_id");
  const json& v = detail::require(j, "score", "");
  if (!v.is_number()) throw ValidationError("score", "expected number");
  s.scored.score = v.get<double>();
  s.scored.scorer_name = detail::require_string(j, "scorer");
  validate_scored(s.scored);
  return s;
}

// ---------------------------------------------------------------------------
// Dataset

struct Dataset {
  std::vector<Example> examples;
  std::vector<RatingRecord> ratings;
  std::map<std::string, std::string> metadata;

  const Example* find_example(std::string_view id) const {
    for (const auto& e : examples) {
      if (e.example_id == id) return &e;
    }
    return nullptr;
  }

  bool operator==(const Dataset&) const = default;
};

struct ExampleFile {
  std::vector<Example> examples;
  std::map<std::string, std::string> metadata;
};

inline ExampleFile read_examples(std::istream& in,
                                 const YesNoLexicon& lexicon = default_lexicon()) {
  ExampleFile file;
  std::unordered_set<std::string> ids;
  detail::for_each_record(in, [&](const json& record, int line) {
    if (record.contains("_meta")) {
      if (line != 1 || !file.examples.empty()) {
        throw ValidationError("_meta", "metadata must be the first record");
      }
      if (!record["_meta"].is_object()) {
        throw ValidationError("_meta", "expected object");
      }
      for (const auto& [k, v] : record["_meta"].items()) {
        file.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
      return;
    }
    Example e = example_from_json(record, lexicon);
    if (!ids.insert(e.example_id).second) {
      throw ValidationError("example_id",
                            "duplicate example_id \"" + e.example_id + "\"");
    }
    file.examples.push_back(std::move(e));
  });
  return file;
}

inline std::vector<Example> load_examples(
    const std::filesystem::path& path,
    const YesNoLexicon& lexicon = default_lexicon()) {
  auto in = detail::open_input(path);
  return read_examples(in, lexicon).examples;
}

inline std::vector<RatingRecord> read_ratings(std::istream& in) {
  std::vector<RatingRecord> out;
  std::set<std::tuple<std::string, std::string, std::string, Scenario>> seen;
  detail::for_each_record(in, [&](const json& record, int) {
    RatingRecord r = rating_from_json(record);
    if (!seen.emplace(r.example_id, r.passage_id, r.rater_id, r.scenario).second) {
      throw ValidationError("rater_id", "duplicate rating by \"" + r.rater_id +
                                            "\" for (" + r.example_id + ", " +
                                            r.passage_id + ", " +
                                            std::string(to_string(r.scenario)) +
                                            ")");
    }
    out.push_back(std::move(r));
  });
  return out;
}

inline std::vector<RatingRecord> load_ratings(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return read_ratings(in);
}

// Throws unless every rating resolves to exactly one (example, passage) pair.
inline void cross_check(const std::vector<Example>& examples,
                        const std::vector<RatingRecord>& ratings) {
  std::unordered_set<PairKey, PairKeyHash> pairs;
  for (const auto& e : examples) {
    for (const auto& p : e.passages) pairs.insert({e.example_id, p.passage_id});
  }
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    const auto& r = ratings[i];
    if (!pairs.count({r.example_id, r.passage_id})) {
      throw ValidationError("ratings[" + std::to_string(i) + "]",
                            "unknown (example_id, passage_id) (" + r.example_id +
                                ", " + r.passage_id + ")");
    }
  }
}

inline Dataset load_dataset(const std::filesystem::path& examples_path,
                            const std::optional<std::filesystem::path>& ratings_path,
                            const YesNoLexicon& lexicon = default_lexicon()) {
  Dataset ds;
  auto in = detail::open_input(examples_path);
  ExampleFile file = read_examples(in, lexicon);
  ds.examples = std::move(file.examples);
  ds.metadata = std::move(file.metadata);
  if (ratings_path) {
    ds.ratings = load_ratings(*ratings_path);
    cross_check(ds.examples, ds.ratings);
  }
  return ds;
}

inline std::vector<AttributionJudgment> read_judgments(std::istream& in) {
  std::vector<AttributionJudgment> out;
  std::set<std::tuple<std::string, std::string, Scenario>> seen;
  detail::for_each_record(in, [&](const json& record, int) {
    AttributionJudgment j = judgment_from_json(record);
    if (!seen.emplace(j.example_id, j.passage_id, j.scenario).second) {
      throw ValidationError("passage_id", "duplicate judgment for (" +
                                              j.example_id + ", " +
                                              j.passage_id + ")");
    }
    out.push_back(std::move(j));
  });
  return out;
}

inline std::vector<AttributionJudgment> load_judgments(
    const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return read_judgments(in);
}

inline std::vector<ScoreRecord> read_scores(std::istream& in) {
  std::vector<ScoreRecord> out;
  detail::for_each_record(in, [&](const json& record, int) {
    out.push_back(score_from_json(record));
  });
  return out;
}

inline std::vector<ScoreRecord> load_scores(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return read_scores(in);
}

// Writes one compact JSON object per line, UTF-8, '\n' terminated.
template <typename T, typename Encode>
void write_jsonl(std::ostream& out, const std::vector<T>& items, Encode encode) {
  for (const auto& item : items) {
    out << encode(item).dump(-1, ' ', false, json::error_handler_t::replace)
        << '\n';
  }
}

inline void write_examples(std::ostream& out, const std::vector<Example>& examples,
                           const std::map<std::string, std::string>& metadata = {}) {
  if (!metadata.empty()) {
    ordered_json meta;
    meta["_meta"] = metadata;
    out << meta.dump() << '\n';
  }
  write_jsonl(out, examples, example_to_json);
}

}  // namespace xattr
