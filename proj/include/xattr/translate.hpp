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

// Translation client abstraction with a content-addressed cache, and the
// translate-test transformation of examples.
//
// Wire protocol: POST /v1/translate {"text": str, "source": str|null,
// "target": str} -> {"text": str}

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "xattr/core.hpp"
#include "xattr/hash.hpp"
#include "xattr/remote.hpp"
#include "xattr/scorer.hpp"
#include "xattr/text.hpp"

namespace xattr {

class TranslationClient {
 public:
  virtual ~TranslationClient() = default;

  // Distinguishes cache entries produced by different systems.
  virtual const std::string& identity() const = 0;
  virtual std::string translate(const std::string& text,
                                const std::optional<LanguageCode>& source,
                                const LanguageCode& target) const = 0;
};

// Test double: prefixes the text with "[<target>] " and counts calls.
class PassThroughTranslationClient final : public TranslationClient {
 public:
  const std::string& identity() const override { return identity_; }

  std::string translate(const std::string& text, const std::optional<LanguageCode>&,
                        const LanguageCode& target) const override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return marker(target) + text;
  }

  static std::string marker(const LanguageCode& target) {
    return "[" + target.str() + "] ";
  }

  long calls() const { return calls_.load(); }

 private:
  std::string identity_ = "pass-through";
  mutable std::atomic<long> calls_{0};
};

class HttpTranslationClient final : public TranslationClient {
 public:
  explicit HttpTranslationClient(const std::string& endpoint, HttpOptions options = {})
      : client_(endpoint, std::move(options)), identity_("http:" + endpoint) {}

  const std::string& identity() const override { return identity_; }

  std::string translate(const std::string& text, const std::optional<LanguageCode>& source,
                        const LanguageCode& target) const override {
    nlohmann::json body = {{"text", text},
                           {"source", source ? nlohmann::json(source->str()) : nlohmann::json(nullptr)},
                           {"target", target.str()}};
    const nlohmann::json res = client_.post("/v1/translate", body);
    if (!res.is_object() || !res.contains("text") || !res["text"].is_string()) {
      throw ProtocolError("translate response lacks string \"text\"");
    }
    return res["text"].get<std::string>();
  }

 private:
  JsonHttpClient client_;
  std::string identity_;
};

// Content-addressed translation cache keyed by (normalized text, source,
// target, client identity). With a path, entries persist in an append-only
// JSONL file ({"key": hex, "text": str}) read back on construction.
class TranslationCache {
 public:
  TranslationCache() = default;
  explicit TranslationCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(*path_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        auto j = nlohmann::json::parse(line);
        entries_[j.at("key").get<std::string>()] = j.at("text").get<std::string>();
      } catch (const nlohmann::json::exception&) {
        // A torn final line from an interrupted run; later lines still load.
      }
    }
  }

  static std::string key(std::string_view text, const std::optional<LanguageCode>& source,
                         const LanguageCode& target, std::string_view client) {
    const std::string norm = normalize(text);
    auto digest = [&](std::uint64_t seed) {
      std::uint64_t h = fnv1a_field(norm, seed);
      h = fnv1a_field(source ? source->str() : std::string("-"), h);
      h = fnv1a_field(target.str(), h);
      return fnv1a_field(client, h);
    };
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx",
                  static_cast<unsigned long long>(digest(kFnvOffset)),
                  static_cast<unsigned long long>(digest(splitmix64(kFnvOffset))));
    return buf;
  }

  std::optional<std::string> get(const std::string& k) const {
    std::shared_lock lock(mu_);
    auto it = entries_.find(k);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void put(const std::string& k, const std::string& text) {
    std::unique_lock lock(mu_);
    entries_[k] = text;
    if (path_) {
      std::ofstream out(*path_, std::ios::app | std::ios::binary);
      if (!out) throw ConfigError("cannot append to translation cache " + path_->string());
      out << nlohmann::json{{"key", k}, {"text", text}}.dump() << '\n';
    }
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return entries_.size();
  }

 private:
  std::optional<std::filesystem::path> path_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, std::string> entries_;
};

// Identity when source == target; otherwise a cache lookup, then the client.
inline std::string translate(const std::string& text, const std::optional<LanguageCode>& source,
                             const LanguageCode& target, const TranslationClient* client,
                             TranslationCache* cache = nullptr) {
  if (source && *source == target) return text;
  if (client == nullptr) throw ConfigError("no translation client configured");
  std::string k;
  if (cache) {
    k = TranslationCache::key(text, source, target, client->identity());
    if (auto hit = cache->get(k)) return *hit;
  }
  std::string out = client->translate(text, source, target);
  if (cache) cache->put(k, out);
  return out;
}

struct Translator {
  const TranslationClient* client = nullptr;
  TranslationCache* cache = nullptr;

  std::string operator()(const std::string& text, const std::optional<LanguageCode>& source,
                         const LanguageCode& target) const {
    return translate(text, source, target, client, cache);
  }
};

// Translates query, answer, gold answers and every passage not already in
// `target`. Passages keep their rank and record the original text and
// language. Applying it twice equals applying it once. Client errors
// propagate and no partial example is returned.
inline Example translate_example_for_test(const Example& e, const LanguageCode& target,
                                          const Translator& translator) {
  Example out = e;
  if (e.text_language() != target) {
    const LanguageCode& from = e.text_language();
    ExampleTranslation info;
    info.target = target;
    info.original_query = e.translation ? e.translation->original_query : e.query;
    info.original_answer = e.translation ? e.translation->original_answer : e.answer;
    info.original_gold_answers =
        e.translation ? e.translation->original_gold_answers : e.gold_answers;
    out.query = translator(e.query, from, target);
    out.answer = translator(e.answer, from, target);
    for (auto& g : out.gold_answers) g = translator(g, from, target);
    out.translation = std::move(info);
  }
  for (auto& p : out.passages) {
    if (p.language == target) continue;
    if (!p.original_text) p.original_text = p.text;
    if (!p.original_language) p.original_language = p.language;
    p.text = translator(p.text, p.language, target);
    p.language = target;
    p.translated = true;
  }
  return out;
}

// String match after translating query, answer and passage to English.
class TranslateTestStringMatchScorer final : public Scorer {
 public:
  TranslateTestStringMatchScorer(Translator translator,
                                 std::string name = "string-match-tt")
      : translator_(translator), name_(std::move(name)) {
    if (translator_.client == nullptr) {
      throw ConfigError("translate-test scorer needs a translation endpoint");
    }
  }

  const std::string& name() const override { return name_; }

  double score(const Example& e, const Passage& p) const override {
    if (e.answer_type == AnswerType::yes_no) return 0.0;
    const std::string answer = translator_(e.answer, e.text_language(), english());
    const std::string text = translator_(p.text, p.language, english());
    return string_match_score(answer, e.answer_type, text);
  }

 private:
  Translator translator_;
  std::string name_;
};

}  // namespace xattr
