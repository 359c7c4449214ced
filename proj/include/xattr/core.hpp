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

// Immutable domain types shared by every module.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "xattr/error.hpp"
#include "xattr/hash.hpp"

namespace xattr {

// A language tag such as "bn", "ja" or "pt-BR".
class LanguageCode {
 public:
  LanguageCode() = default;
  explicit LanguageCode(std::string code) : code_(std::move(code)) {
    if (!is_valid(code_)) {
      throw ValidationError("", "invalid language code \"" + code_ + "\"");
    }
  }

  static bool is_valid(std::string_view code) {
    static const std::regex pattern("^[a-z]{2,3}(-[A-Za-z0-9]{2,8})?$");
    return std::regex_match(code.begin(), code.end(), pattern);
  }

  const std::string& str() const { return code_; }
  bool empty() const { return code_.empty(); }

  auto operator<=>(const LanguageCode&) const = default;
  bool operator==(const LanguageCode&) const = default;

 private:
  std::string code_;
};

inline const LanguageCode& english() {
  static const LanguageCode en("en");
  return en;
}

enum class AnswerType { yes_no, short_span };
enum class Scenario { in_language, in_english };

inline std::string_view to_string(AnswerType t) {
  return t == AnswerType::yes_no ? "yes_no" : "short_span";
}
inline std::string_view to_string(Scenario s) {
  return s == Scenario::in_language ? "in_language" : "in_english";
}

inline Scenario parse_scenario(std::string_view s) {
  if (s == "in_language") return Scenario::in_language;
  if (s == "in_english") return Scenario::in_english;
  throw ValidationError("scenario", "expected in_language|in_english, got \"" +
                                        std::string(s) + "\"");
}

inline AnswerType parse_answer_type(std::string_view s) {
  if (s == "yes_no") return AnswerType::yes_no;
  if (s == "short_span") return AnswerType::short_span;
  throw ValidationError("answer_type", "expected yes_no|short_span, got \"" +
                                           std::string(s) + "\"");
}

struct Passage {
  std::string passage_id;
  std::string text;
  LanguageCode language;
  int retrieval_rank = 1;

  // Set when the text was machine-translated. `original_language` is the
  // retrieval language; `language` is then the language of `text`.
  bool translated = false;
  std::optional<LanguageCode> original_language;
  std::optional<std::string> original_text;

  // Language the passage was retrieved in.
  const LanguageCode& source_language() const {
    return original_language ? *original_language : language;
  }

  bool operator==(const Passage&) const = default;
};

// Query/answer text before translate-test translation.
struct ExampleTranslation {
  LanguageCode target;
  std::string original_query;
  std::string original_answer;
  std::vector<std::string> original_gold_answers;

  bool operator==(const ExampleTranslation&) const = default;
};

struct Example {
  std::string example_id;
  std::string query;
  LanguageCode query_language;
  std::string answer;
  std::vector<std::string> gold_answers;
  AnswerType answer_type = AnswerType::short_span;
  std::vector<Passage> passages;  // sorted by retrieval_rank, ranks 1..n
  std::optional<ExampleTranslation> translation;

  // Language the query/answer text is currently written in.
  const LanguageCode& text_language() const {
    return translation ? translation->target : query_language;
  }

  const Passage* find_passage(std::string_view passage_id) const {
    for (const auto& p : passages) {
      if (p.passage_id == passage_id) return &p;
    }
    return nullptr;
  }

  bool operator==(const Example&) const = default;
};

struct RatingRecord {
  std::string example_id;
  std::string passage_id;
  std::string rater_id;
  Scenario scenario = Scenario::in_language;
  std::optional<bool> interpretable;
  std::optional<bool> attributed;
  bool flagged = false;

  bool operator==(const RatingRecord&) const = default;
};

// Aggregated gold label for one (example, passage) pair under one scenario.
struct AttributionJudgment {
  std::string example_id;
  std::string passage_id;
  Scenario scenario = Scenario::in_language;
  int label = 0;
  int valid_rating_count = 0;
  int yes_votes = 0;

  bool operator==(const AttributionJudgment&) const = default;
};

struct ScoredPassage {
  std::string passage_id;
  double score = 0.0;
  std::string scorer_name;

  bool operator==(const ScoredPassage&) const = default;
};

// (example_id, passage_id); the key of every per-pair table.
struct PairKey {
  std::string example_id;
  std::string passage_id;

  auto operator<=>(const PairKey&) const = default;
  bool operator==(const PairKey&) const = default;
};

struct PairKeyHash {
  std::size_t operator()(const PairKey& k) const {
    std::size_t seed = std::hash<std::string>{}(k.example_id);
    hash_combine(seed, std::hash<std::string>{}(k.passage_id));
    return seed;
  }
};

// ---------------------------------------------------------------------------
// Validation

inline void validate_passage(const Passage& p, const std::string& path) {
  if (p.passage_id.empty()) {
    throw ValidationError(path + ".passage_id", "must be non-empty");
  }
  if (p.text.empty()) throw ValidationError(path + ".text", "must be non-empty");
  if (p.language.empty()) {
    throw ValidationError(path + ".language", "must be non-empty");
  }
  if (p.retrieval_rank < 1) {
    throw ValidationError(path + ".retrieval_rank", "must be >= 1");
  }
}

// Returns `e` unchanged when every invariant holds; otherwise throws with the
// field path of the first violation.
inline const Example& validate_example(const Example& e) {
  if (e.example_id.empty()) {
    throw ValidationError("example_id", "must be non-empty");
  }
  if (e.query_language.empty()) {
    throw ValidationError("query_language", "must be non-empty");
  }
  if (e.answer.empty()) throw ValidationError("answer", "empty answer");
  std::set<std::string_view> ids;
  for (std::size_t i = 0; i < e.passages.size(); ++i) {
    const std::string path = "passages[" + std::to_string(i) + "]";
    validate_passage(e.passages[i], path);
    if (e.passages[i].retrieval_rank != static_cast<int>(i) + 1) {
      throw ValidationError(path + ".retrieval_rank", "non-contiguous ranks");
    }
    if (!ids.insert(e.passages[i].passage_id).second) {
      throw ValidationError(path + ".passage_id", "duplicate passage_id");
    }
  }
  return e;
}

inline const RatingRecord& validate_rating(const RatingRecord& r) {
  if (r.example_id.empty()) {
    throw ValidationError("example_id", "must be non-empty");
  }
  if (r.passage_id.empty()) {
    throw ValidationError("passage_id", "must be non-empty");
  }
  if (r.rater_id.empty()) throw ValidationError("rater_id", "must be non-empty");
  if (r.flagged && r.attributed) {
    throw ValidationError("attributed", "flagged records carry no judgment");
  }
  if (r.attributed && r.interpretable == false) {
    throw ValidationError("attributed",
                          "present although the answer was not interpretable");
  }
  return r;
}

inline const AttributionJudgment& validate_judgment(
    const AttributionJudgment& j) {
  if (j.valid_rating_count < 2) {
    throw ValidationError("valid_rating_count", "must be >= 2");
  }
  if (j.yes_votes < 0 || j.yes_votes > j.valid_rating_count) {
    throw ValidationError("yes_votes", "must lie in [0, valid_rating_count]");
  }
  if (j.label != (j.yes_votes >= 2 ? 1 : 0)) {
    throw ValidationError("label", "must equal [yes_votes >= 2]");
  }
  return j;
}

inline const ScoredPassage& validate_scored(const ScoredPassage& s) {
  if (!(s.score >= 0.0 && s.score <= 1.0)) {
    throw ValidationError("score", "must lie in [0,1]");
  }
  return s;
}

}  // namespace xattr

template <>
struct std::hash<xattr::LanguageCode> {
  std::size_t operator()(const xattr::LanguageCode& c) const {
    return std::hash<std::string>{}(c.str());
  }
};

template <>
struct std::hash<xattr::Passage> {
  std::size_t operator()(const xattr::Passage& p) const {
    std::size_t seed = std::hash<std::string>{}(p.passage_id);
    xattr::hash_combine(seed, std::hash<std::string>{}(p.text));
    xattr::hash_combine(seed, std::hash<xattr::LanguageCode>{}(p.language));
    xattr::hash_combine(seed, std::hash<int>{}(p.retrieval_rank));
    xattr::hash_combine(seed, std::hash<bool>{}(p.translated));
    if (p.original_language) {
      xattr::hash_combine(seed,
                          std::hash<xattr::LanguageCode>{}(*p.original_language));
    }
    if (p.original_text) {
      xattr::hash_combine(seed, std::hash<std::string>{}(*p.original_text));
    }
    return seed;
  }
};

template <>
struct std::hash<xattr::Example> {
  std::size_t operator()(const xattr::Example& e) const {
    std::size_t seed = std::hash<std::string>{}(e.example_id);
    xattr::hash_combine(seed, std::hash<std::string>{}(e.query));
    xattr::hash_combine(seed, std::hash<xattr::LanguageCode>{}(e.query_language));
    xattr::hash_combine(seed, std::hash<std::string>{}(e.answer));
    for (const auto& g : e.gold_answers) {
      xattr::hash_combine(seed, std::hash<std::string>{}(g));
    }
    xattr::hash_combine(seed, static_cast<std::size_t>(e.answer_type));
    for (const auto& p : e.passages) {
      xattr::hash_combine(seed, std::hash<xattr::Passage>{}(p));
    }
    if (e.translation) {
      xattr::hash_combine(seed,
                          std::hash<xattr::LanguageCode>{}(e.translation->target));
      xattr::hash_combine(seed,
                          std::hash<std::string>{}(e.translation->original_query));
    }
    return seed;
  }
};
