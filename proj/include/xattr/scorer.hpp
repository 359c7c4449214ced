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

// Attribution detection: (query, answer, passage) -> probability that the
// answer is attributed to the passage.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xattr/aggregate.hpp"
#include "xattr/core.hpp"
#include "xattr/hash.hpp"
#include "xattr/text.hpp"

namespace xattr {

// ---------------------------------------------------------------------------
// Prompt template

// Premise is the passage verbatim; the hypothesis wraps query and answer.
// Nothing is escaped, so a query containing the delimiter `" is "` cannot be
// inverted unambiguously.
struct PromptTriple {
  std::string premise;
  std::string hypothesis;

  bool operator==(const PromptTriple&) const = default;
};

struct PromptTemplate {
  std::string_view id;
  std::string_view hypothesis_prefix;
  std::string_view separator;
  std::string_view hypothesis_suffix;
};

inline constexpr PromptTemplate kNliTemplate{
    "nli", "the answer to the question \"", "\" is \"", "\""};

inline constexpr std::string_view kDefaultTemplateId = "nli";

inline const PromptTemplate& find_template(std::string_view id) {
  if (id == kNliTemplate.id) return kNliTemplate;
  throw ConfigError("unknown prompt template \"" + std::string(id) + "\"");
}

inline PromptTriple build_prompt(std::string_view query, std::string_view answer,
                                 std::string_view passage_text,
                                 std::string_view template_id = kDefaultTemplateId) {
  const PromptTemplate& t = find_template(template_id);
  std::string hypothesis;
  hypothesis.reserve(t.hypothesis_prefix.size() + query.size() +
                     t.separator.size() + answer.size() + 1);
  hypothesis.append(t.hypothesis_prefix)
      .append(query)
      .append(t.separator)
      .append(answer)
      .append(t.hypothesis_suffix);
  return {std::string(passage_text), std::move(hypothesis)};
}

inline PromptTriple build_prompt(const Example& e, const Passage& p,
                                 std::string_view template_id = kDefaultTemplateId) {
  return build_prompt(e.query, e.answer, p.text, template_id);
}

// The single-string form sent to generative models.
inline std::string render_prompt(const PromptTriple& t) {
  return "premise: \"" + t.premise + "\" hypothesis: " + t.hypothesis;
}

struct InvertedPrompt {
  std::string query;
  std::string answer;
  std::string passage;
};

// Recovers (q, a, p). Splits at the first separator, so it is exact whenever
// the query does not contain the separator sequence.
inline std::optional<InvertedPrompt> invert_prompt(
    const PromptTriple& t, std::string_view template_id = kDefaultTemplateId) {
  const PromptTemplate& tpl = find_template(template_id);
  std::string_view h = t.hypothesis;
  if (h.size() < tpl.hypothesis_prefix.size() + tpl.hypothesis_suffix.size() ||
      h.substr(0, tpl.hypothesis_prefix.size()) != tpl.hypothesis_prefix ||
      h.substr(h.size() - tpl.hypothesis_suffix.size()) != tpl.hypothesis_suffix) {
    return std::nullopt;
  }
  h.remove_prefix(tpl.hypothesis_prefix.size());
  h.remove_suffix(tpl.hypothesis_suffix.size());
  const auto sep = h.find(tpl.separator);
  if (sep == std::string_view::npos) return std::nullopt;
  return InvertedPrompt{std::string(h.substr(0, sep)),
                        std::string(h.substr(sep + tpl.separator.size())),
                        t.premise};
}

// ---------------------------------------------------------------------------
// String match

inline double string_match_score(std::string_view answer, AnswerType type,
                                 std::string_view passage_text) {
  // Yes/no answers never appear verbatim; predict the majority class.
  if (type == AnswerType::yes_no) return 0.0;
  const std::string a = normalize(answer);
  return normalize(passage_text).find(a) != std::string::npos ? 1.0 : 0.0;
}

inline double string_match_score(const Example& e, const Passage& p) {
  return string_match_score(e.answer, e.answer_type, p.text);
}

// ---------------------------------------------------------------------------
// Scorer interface

enum class ScorerKind { string_match, string_match_translate_test, remote_entailment, mock };

struct ScorerSpec {
  std::string name;
  ScorerKind kind = ScorerKind::string_match;
  std::optional<std::string> endpoint;
  std::string template_id{kDefaultTemplateId};
  std::optional<std::uint64_t> seed;
};

inline void validate_scorer_spec(const ScorerSpec& s) {
  if (s.kind == ScorerKind::remote_entailment && !s.endpoint) {
    throw ConfigError("remote scorer \"" + s.name + "\" requires an endpoint");
  }
  if (s.kind == ScorerKind::mock && !s.seed) {
    throw ConfigError("mock scorer \"" + s.name + "\" requires a seed");
  }
  find_template(s.template_id);
}

// Outcome of scoring one item inside a batch: a score or an error message.
struct ScoreOutcome {
  std::optional<double> score;
  std::string error;

  bool ok() const { return score.has_value(); }
};

struct ScoreItem {
  const Example* example;
  const Passage* passage;
};

// Scorers are shared across worker threads; implementations keep score()
// safe for concurrent calls.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual const std::string& name() const = 0;
  virtual double score(const Example& e, const Passage& p) const = 0;

  // Scores each item independently; one failing item does not fail the rest.
  virtual std::vector<ScoreOutcome> score_many(std::span<const ScoreItem> items) const {
    std::vector<ScoreOutcome> out;
    out.reserve(items.size());
    for (const auto& item : items) {
      try {
        out.push_back({score(*item.example, *item.passage), {}});
      } catch (const Error& err) {
        out.push_back({std::nullopt, err.what()});
      }
    }
    return out;
  }
};

class StringMatchScorer final : public Scorer {
 public:
  explicit StringMatchScorer(std::string name = "string-match")
      : name_(std::move(name)) {}

  const std::string& name() const override { return name_; }
  double score(const Example& e, const Passage& p) const override {
    return string_match_score(e, p);
  }

 private:
  std::string name_;
};

// ---------------------------------------------------------------------------
// Mock scorer

enum class MockMode { hashed, constant, oracle, noisy_oracle };

struct MockConfig {
  std::uint64_t seed = 0;
  MockMode mode = MockMode::hashed;
  double epsilon = 0.0;          // flip probability for noisy_oracle
  double constant_value = 0.5;   // for MockMode::constant
};

// Deterministic test double. In oracle mode the score is the gold label; in
// noisy-oracle mode each label flips when a per-pair uniform draw falls below
// epsilon, so flipped sets are nested as epsilon grows.
class MockScorer final : public Scorer {
 public:
  MockScorer(MockConfig config, std::optional<LabelMap> gold = std::nullopt,
             std::string name = "mock")
      : config_(config), gold_(std::move(gold)), name_(std::move(name)) {
    const bool needs_gold =
        config_.mode == MockMode::oracle || config_.mode == MockMode::noisy_oracle;
    if (needs_gold && !gold_) {
      throw ConfigError("mock scorer in oracle mode requires judgments");
    }
    if (config_.epsilon < 0.0 || config_.epsilon > 1.0) {
      throw ConfigError("noisy-oracle epsilon must lie in [0,1]");
    }
  }

  const std::string& name() const override { return name_; }

  double score(const Example& e, const Passage& p) const override {
    switch (config_.mode) {
      case MockMode::hashed:
        return unit_interval(pair_hash(e, p, 0x68617368ull));
      case MockMode::constant:
        return config_.constant_value;
      case MockMode::oracle:
        return gold_label(e, p);
      case MockMode::noisy_oracle: {
        const double label = gold_label(e, p);
        const bool flip = unit_interval(pair_hash(e, p, 0x666c6970ull)) < config_.epsilon;
        return flip ? 1.0 - label : label;
      }
    }
    return 0.0;
  }

 private:
  std::uint64_t pair_hash(const Example& e, const Passage& p, std::uint64_t salt) const {
    std::uint64_t h = fnv1a_field(e.example_id, kFnvOffset);
    h = fnv1a_field(p.passage_id, h);
    return splitmix64(h ^ splitmix64(config_.seed ^ salt));
  }

  double gold_label(const Example& e, const Passage& p) const {
    auto it = gold_->find({e.example_id, p.passage_id});
    if (it == gold_->end()) {
      throw ValidationError("judgments", "oracle has no judgment for (" +
                                             e.example_id + ", " + p.passage_id + ")");
    }
    return it->second ? 1.0 : 0.0;
  }

  MockConfig config_;
  std::optional<LabelMap> gold_;
  std::string name_;
};

// ---------------------------------------------------------------------------
// Few-shot prompts

struct LabeledExemplar {
  std::string query;
  std::string answer;
  std::string passage;
  LanguageCode query_language;
  LanguageCode passage_language;
  int label = 0;
  std::optional<std::string> rationale;  // opaque text, used verbatim
};

struct FewShotTarget {
  std::string query;
  std::string answer;
  std::string passage;
  LanguageCode language;
};

namespace detail {

inline void append_shot(std::string& out, const PromptTriple& triple,
                        const std::optional<std::string>& rationale,
                        std::optional<int> label) {
  out += render_prompt(triple);
  out += '\n';
  if (rationale) out += "rationale: " + *rationale + '\n';
  out += "attributed:";
  if (label) out += *label ? " yes" : " no";
  out += '\n';
}

}  // namespace detail

// Four exemplars for the target language, ordered positive/negative with
// in-language passages first: [pos-lang, neg-lang, pos-en, neg-en], then the
// target with an open answer slot. Exemplars are drawn per slot with a
// generator seeded by (seed, language), so output bytes depend only on the
// inputs.
inline std::string build_fewshot_prompt(const FewShotTarget& target,
                                        std::span<const LabeledExemplar> pool,
                                        bool with_rationale, std::uint64_t seed,
                                        std::string_view template_id = kDefaultTemplateId) {
  struct Slot {
    int label;
    bool in_language;
  };
  static constexpr Slot kSlots[] = {{1, true}, {0, true}, {1, false}, {0, false}};

  SplitMix rng(splitmix64(seed) ^ fnv1a(target.language.str()));
  std::vector<std::size_t> used;
  std::string out;
  for (const Slot& slot : kSlots) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const auto& x = pool[i];
      if (x.query_language != target.language || (x.label != 0) != (slot.label != 0)) {
        continue;
      }
      const LanguageCode& want = slot.in_language ? target.language : english();
      if (x.passage_language != want) continue;
      if (std::find(used.begin(), used.end(), i) != used.end()) continue;
      candidates.push_back(i);
    }
    if (candidates.empty()) {
      throw ValidationError(
          "exemplars", std::string("insufficient pool composition: no ") +
                           (slot.label ? "positive" : "negative") + " exemplar with " +
                           (slot.in_language ? "in-language" : "English") +
                           " passage for \"" + target.language.str() + "\"");
    }
    const std::size_t pick = candidates[rng.below(candidates.size())];
    used.push_back(pick);
    const auto& x = pool[pick];
    std::optional<std::string> rationale;
    if (with_rationale) rationale = x.rationale.value_or("");
    detail::append_shot(out, build_prompt(x.query, x.answer, x.passage, template_id),
                        rationale, x.label);
    out += '\n';
  }
  detail::append_shot(out,
                      build_prompt(target.query, target.answer, target.passage, template_id),
                      std::nullopt, std::nullopt);
  return out;
}

}  // namespace xattr
