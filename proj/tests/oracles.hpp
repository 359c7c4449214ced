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

// Test utilities without a test-framework dependency: temporary
// directories, random data generators and brute-force reference
// implementations.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "xattr/aggregate.hpp"
#include "xattr/core.hpp"
#include "xattr/hash.hpp"

namespace xattr::testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    SplitMix rng(static_cast<std::uint64_t>(
        std::chrono::steady_clock::now().time_since_epoch().count()) ^ ++counter);
    path_ = fs::temp_directory_path() / ("xattr-test-" + std::to_string(rng.next()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline fs::path source_dir() { return fs::path(XATTR_SOURCE_DIR); }

inline double uniform(SplitMix& rng) { return unit_interval(rng.next()); }

inline const std::vector<LanguageCode>& languages() {
  static const std::vector<LanguageCode> langs = {
      LanguageCode("bn"), LanguageCode("fi"), LanguageCode("ja"), LanguageCode("ru"),
      LanguageCode("te"), LanguageCode("en"), LanguageCode("sv")};
  return langs;
}

// A valid example with 1..max_passages passages in random languages.
inline Example random_example(SplitMix& rng, const std::string& id, int max_passages = 6) {
  static const std::vector<std::string> words = {"Nairobi", "Волга", "Helsinki", "はい",
                                                 "বর্মী",    "the skin", "ＮＨＫ", "São  Paulo",
                                                 "\"quoted\"", "50"};
  Example e;
  e.example_id = id;
  e.query_language = languages()[rng.below(5)];
  e.query = "question " + words[rng.below(words.size())] + " " + std::to_string(rng.below(1000));
  e.answer = words[rng.below(words.size())];
  const int gold = static_cast<int>(rng.below(3));
  for (int g = 0; g < gold; ++g) e.gold_answers.push_back(words[rng.below(words.size())]);
  e.answer_type = rng.below(4) == 0 ? AnswerType::yes_no : AnswerType::short_span;
  const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_passages)));
  for (int r = 1; r <= n; ++r) {
    Passage p;
    p.passage_id = id + "-p" + std::to_string(r);
    p.retrieval_rank = r;
    p.language = rng.below(2) ? e.query_language : languages()[rng.below(languages().size())];
    p.text = "passage " + std::to_string(r) + " about " + words[rng.below(words.size())];
    if (rng.below(5) == 0) {
      p.translated = true;
      p.original_language = english();
      p.original_text = "original " + p.text;
    }
    e.passages.push_back(std::move(p));
  }
  return e;
}

inline std::vector<Example> random_examples(SplitMix& rng, int n, int max_passages = 6) {
  std::vector<Example> out;
  for (int i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "ex-%04d", i);
    out.push_back(random_example(rng, id, max_passages));
  }
  return out;
}

// Labels every pooled passage; each is 1 with probability p1.
inline LabelMap random_labels(SplitMix& rng, const std::vector<Example>& examples, double p1) {
  LabelMap m;
  for (const auto& e : examples) {
    for (const auto& p : e.passages) m[{e.example_id, p.passage_id}] = uniform(rng) < p1;
  }
  return m;
}

// Scores with both label classes present; `ties` draws from seven levels.
inline std::pair<std::vector<double>, std::vector<int>> random_instance(SplitMix& rng,
                                                                        std::size_t n, bool ties) {
  std::vector<double> s(n);
  std::vector<int> y(n);
  do {
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = ties ? static_cast<double>(rng.below(7)) / 6.0 : uniform(rng);
      y[i] = rng.below(2);
    }
  } while (std::count(y.begin(), y.end(), 1) == 0 || std::count(y.begin(), y.end(), 0) == 0);
  return {s, y};
}

// Attributed-answer percentage computed from explicit passage sets: the
// subset members are collected first, then the pooled members are checked.
// English-exclusive examples with an attributed in-language passage never
// count. Returns -1 when nothing is judged.
inline double brute_force_ais(const std::vector<Example>& examples, const LabelMap& labels,
                              bool top1_only, int subset /* 0 any, 1 lang, 2 en */) {
  long hits = 0, total = 0;
  for (const auto& e : examples) {
    std::vector<const Passage*> members;
    bool lang_hit = false;
    for (const auto& p : e.passages) {
      const LanguageCode src = p.original_language.value_or(p.language);
      const bool is_lang = src == e.query_language;
      if (is_lang && labels.at({e.example_id, p.passage_id}) == 1) lang_hit = true;
      if (subset == 0 || (subset == 1 && is_lang) || (subset == 2 && src == english())) {
        members.push_back(&p);
      }
    }
    std::sort(members.begin(), members.end(), [](const Passage* a, const Passage* b) {
      return a->retrieval_rank < b->retrieval_rank;
    });
    if (top1_only && members.size() > 1) members.resize(1);
    bool hit = false;
    for (const Passage* p : members) hit = hit || labels.at({e.example_id, p->passage_id}) == 1;
    if (subset == 2 && lang_hit) hit = false;
    ++total;
    hits += hit;
  }
  return total == 0 ? -1.0 : 100.0 * static_cast<double>(hits) / static_cast<double>(total);
}

// Mean over all (positive, negative) pairs of 1 / 0.5 / 0.
inline double brute_force_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double sum = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      ++pairs;
      sum += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  return sum / static_cast<double>(pairs);
}

inline double brute_force_accuracy(const std::vector<double>& s, const std::vector<int>& y,
                                   double t) {
  long ok = 0;
  for (std::size_t i = 0; i < s.size(); ++i) ok += (s[i] >= t) == (y[i] == 1);
  return 100.0 * static_cast<double>(ok) / static_cast<double>(s.size());
}

}  // namespace xattr::testing
