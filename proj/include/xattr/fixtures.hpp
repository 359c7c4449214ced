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

// Offline fixtures: count-exact synthetic datasets and a small handcrafted
// multilingual set with hand-assigned labels.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xattr/aggregate.hpp"
#include "xattr/ingest.hpp"
#include "xattr/mine.hpp"
#include "xattr/rerank.hpp"

namespace xattr {

// ---------------------------------------------------------------------------
// Synthetic datasets

// Target proportions for one language. `top1`/`all` are AIS over any
// passage; the *_lang and *_en fields are the in-language and
// English-exclusive subsets (within-subset top-1). `em` is the EM rate over
// all examples and `of_em_all` the AIS(all) rate among EM examples.
// `reranked` is the AIS reached by the reference scorer's top choice.
struct SyntheticTargets {
  LanguageCode language;
  long n = 0;
  double top1 = 0.0;
  double all = 0.0;
  std::optional<double> top1_lang;
  std::optional<double> all_lang;
  std::optional<double> top1_en;
  std::optional<double> all_en;
  std::optional<double> em;
  std::optional<double> of_em_all;
  std::optional<double> reranked;
};

struct SyntheticFixture {
  Dataset dataset;  // examples plus unanimous in-language ratings
  std::vector<AttributionJudgment> judgments;
  ScoreTable reference_scores;  // present when `reranked` was requested
};

namespace detail {

inline long exact_count(double proportion, long denominator, const char* what) {
  if (!(proportion >= 0.0 && proportion <= 1.0)) {
    throw ConfigError(std::string(what) + ": proportion outside [0,1]");
  }
  const double raw = proportion * static_cast<double>(denominator);
  const double rounded = std::round(raw);
  if (std::abs(raw - rounded) > 1e-6) {
    throw ConfigError(std::string(what) + ": " + std::to_string(proportion) +
                      " is not representable with " + std::to_string(denominator) +
                      " items");
  }
  return static_cast<long>(rounded);
}

// Passage layouts over four ranks. Each char pair is (language, label):
// 'L' query language, 'E' English, 'O' another language; '1' attributed.
enum Archetype { kA, kB, kC, kL, kM, kK, kD, kE, kF, kG, kH, kArchetypeCount };

inline constexpr const char* kLayouts[kArchetypeCount] = {
    "L1E0L0O0",  // a: top1, top1-lang
    "E1L0E0O0",  // b: top1, top1-en
    "O1L0E0L0",  // c: top1 via another language
    "O1L0L1E0",  // l: top1 + lang(all) but not top1-lang
    "O1E0E1L0",  // m: top1 + en(all) but not top1-en
    "E0L1L0O0",  // k: top1-lang without top1
    "L0L1E0O0",  // d: lang(all) only
    "L0E1E0O0",  // e: top1-en without top1
    "L0E0E1O0",  // f: en(all) only
    "L0E0O1L0",  // g: attributed to another language only
    "L0E0O0L0",  // h: not attributed
};

inline LanguageCode other_language(const LanguageCode& lang) {
  return LanguageCode(lang.str() == "hi" ? "ta" : "hi");
}

}  // namespace detail

// Builds a dataset whose AIS statistics equal the targets exactly: every
// proportion times its denominator must be an integer. Examples are
// assigned to passage layouts by count; the seed only permutes which
// example gets which layout.
inline SyntheticFixture build_synthetic(const SyntheticTargets& t, std::uint64_t seed) {
  using namespace detail;
  if (t.n <= 0) throw ConfigError("synthetic fixture needs n > 0");
  const long top1 = exact_count(t.top1, t.n, "top1");
  const long all = exact_count(t.all, t.n, "all");
  const long top1_lang = t.top1_lang ? exact_count(*t.top1_lang, t.n, "top1_lang") : top1;
  const long all_lang = t.all_lang ? exact_count(*t.all_lang, t.n, "all_lang") : all;
  const long top1_en = t.top1_en ? exact_count(*t.top1_en, t.n, "top1_en") : 0;
  const long all_en = t.all_en ? exact_count(*t.all_en, t.n, "all_en") : 0;
  const bool subsets = t.top1_lang || t.all_lang || t.top1_en || t.all_en;
  if (subsets && t.language == english()) {
    throw ConfigError("subset targets need a non-English query language");
  }
  if (top1 > all || top1_lang > all_lang || top1_en > all_en || all_lang + all_en > all) {
    throw ConfigError("inconsistent synthetic targets");
  }

  // Greedy cover of the six indicator counts by layouts.
  long count[kArchetypeCount] = {};
  long t1 = top1;
  count[kA] = std::min(t1, top1_lang);
  t1 -= count[kA];
  count[kK] = top1_lang - count[kA];
  count[kB] = std::min(t1, top1_en);
  t1 -= count[kB];
  count[kE] = top1_en - count[kB];
  long lang_rest = all_lang - top1_lang;
  long en_rest = all_en - top1_en;
  count[kL] = std::min(t1, lang_rest);
  t1 -= count[kL];
  lang_rest -= count[kL];
  count[kD] = lang_rest;
  count[kM] = std::min(t1, en_rest);
  t1 -= count[kM];
  en_rest -= count[kM];
  count[kF] = en_rest;
  count[kC] = t1;
  long attributed = 0;
  for (int a = 0; a < kG; ++a) attributed += count[a];
  count[kG] = all - attributed;
  count[kH] = t.n - all;
  if (count[kG] < 0) throw ConfigError("inconsistent synthetic targets");

  std::vector<int> layout;
  layout.reserve(static_cast<std::size_t>(t.n));
  for (int a = 0; a < kArchetypeCount; ++a) layout.insert(layout.end(), count[a], a);
  SplitMix rng(splitmix64(seed) ^ fnv1a(t.language.str()));
  for (std::size_t i = layout.size(); i > 1; --i) std::swap(layout[i - 1], layout[rng.below(i)]);

  // Indices of attributed and unattributed examples, in example order.
  std::vector<std::size_t> hit_idx, miss_idx;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    (layout[i] == kH ? miss_idx : hit_idx).push_back(i);
  }

  std::vector<bool> em_bit(layout.size(), false);
  const bool with_gold = t.em.has_value();
  if (with_gold) {
    const long em = exact_count(*t.em, t.n, "em");
    const long em_hit = exact_count(t.of_em_all.value_or(0.0), em, "of_em_all");
    if (em_hit > static_cast<long>(hit_idx.size()) ||
        em - em_hit > static_cast<long>(miss_idx.size())) {
      throw ConfigError("inconsistent EM targets");
    }
    for (long i = 0; i < em_hit; ++i) em_bit[hit_idx[static_cast<std::size_t>(i)]] = true;
    for (long i = 0; i < em - em_hit; ++i) em_bit[miss_idx[static_cast<std::size_t>(i)]] = true;
  } else if (t.of_em_all) {
    throw ConfigError("of_em_all needs an em rate");
  }

  std::vector<bool> rerank_hit(layout.size(), false);
  if (t.reranked) {
    const long r = exact_count(*t.reranked, t.n, "reranked");
    if (r > static_cast<long>(hit_idx.size())) {
      throw ConfigError("reranked AIS cannot exceed AIS(all)");
    }
    // Take hits from the back so they are not correlated with EM.
    for (long i = 0; i < r; ++i) rerank_hit[hit_idx[hit_idx.size() - 1 - static_cast<std::size_t>(i)]] = true;
  }

  const LanguageCode other = other_language(t.language);
  SyntheticFixture out;
  out.dataset.metadata = {{"source", "synthetic"}, {"language", t.language.str()},
                          {"seed", std::to_string(seed)}};
  char id[64];
  for (std::size_t i = 0; i < layout.size(); ++i) {
    std::snprintf(id, sizeof id, "syn-%s-%05zu", t.language.str().c_str(), i);
    Example e;
    e.example_id = id;
    e.query = "Synthetic question " + std::to_string(i) + " (" + t.language.str() + ")";
    e.query_language = t.language;
    e.answer = "answer " + std::to_string(i);
    if (with_gold) e.gold_answers = {em_bit[i] ? e.answer : "gold " + std::to_string(i)};
    e.answer_type = AnswerType::short_span;
    const std::string_view spec = kLayouts[layout[i]];
    int first_hit = -1, first_miss = -1;
    for (int r = 0; r < 4; ++r) {
      Passage p;
      p.passage_id = e.example_id + "-p" + std::to_string(r + 1);
      p.retrieval_rank = r + 1;
      const char lang = spec[2 * r];
      p.language = lang == 'L' ? t.language : lang == 'E' ? english() : other;
      p.text = "Synthetic passage " + std::to_string(r + 1) + " for question " +
               std::to_string(i) + " [" + p.language.str() + "]";
      const int label = spec[2 * r + 1] == '1';
      if (label && first_hit < 0) first_hit = r;
      if (!label && first_miss < 0) first_miss = r;
      for (int rater = 1; rater <= 3; ++rater) {
        out.dataset.ratings.push_back({e.example_id, p.passage_id, "rater-" + std::to_string(rater),
                                       Scenario::in_language, true, label == 1, false});
      }
      out.judgments.push_back({e.example_id, p.passage_id, Scenario::in_language, label, 3,
                               label ? 3 : 0});
      e.passages.push_back(std::move(p));
    }
    if (t.reranked) {
      const int chosen = rerank_hit[i] ? first_hit : first_miss;
      auto& scored = out.reference_scores[e.example_id];
      for (int r = 0; r < 4; ++r) {
        scored.push_back({e.passages[static_cast<std::size_t>(r)].passage_id,
                          r == chosen ? 0.9 : 0.1, "reference"});
      }
    }
    out.dataset.examples.push_back(std::move(e));
  }
  return out;
}

// Concatenates per-language fixtures into one dataset.
inline SyntheticFixture combine(std::span<const SyntheticFixture> parts) {
  SyntheticFixture out;
  out.dataset.metadata = {{"source", "synthetic"}};
  for (const auto& f : parts) {
    auto& ds = out.dataset;
    ds.examples.insert(ds.examples.end(), f.dataset.examples.begin(), f.dataset.examples.end());
    ds.ratings.insert(ds.ratings.end(), f.dataset.ratings.begin(), f.dataset.ratings.end());
    out.judgments.insert(out.judgments.end(), f.judgments.begin(), f.judgments.end());
    out.reference_scores.insert(f.reference_scores.begin(), f.reference_scores.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Handcrafted set

// Votes are one char per rater: 'y' yes, 'n' no, 'f' flagged,
// 'u' answer not interpretable.
struct HandcraftedPassage {
  Passage passage;
  std::string s1_votes;
  std::string s2_votes;
  int string_match = 0;  // hand label for the string-match baseline
};

struct HandcraftedCase {
  Example example;  // passages filled from `passages`
  std::optional<AnswerType> declared_type;  // nullopt: resolved by lexicon
  std::vector<HandcraftedPassage> passages;
};

namespace detail {

inline HandcraftedPassage hp(std::string id, int rank, const char* lang, std::string text,
                             std::string s1, std::string s2, int sm) {
  Passage p;
  p.passage_id = std::move(id);
  p.retrieval_rank = rank;
  p.language = LanguageCode(lang);
  p.text = std::move(text);
  return {std::move(p), std::move(s1), std::move(s2), sm};
}

inline HandcraftedCase hc(std::string id, const char* lang, std::string query,
                          std::string answer, std::vector<std::string> gold,
                          std::optional<AnswerType> type,
                          std::vector<HandcraftedPassage> passages) {
  HandcraftedCase c;
  c.example.example_id = std::move(id);
  c.example.query_language = LanguageCode(lang);
  c.example.query = std::move(query);
  c.example.answer = std::move(answer);
  c.example.gold_answers = std::move(gold);
  c.declared_type = type;
  c.example.answer_type = type ? *type
                               : infer_answer_type(c.example.answer, c.example.query_language,
                                                   default_lexicon());
  for (const auto& p : passages) c.example.passages.push_back(p.passage);
  c.passages = std::move(passages);
  validate_example(c.example);
  return c;
}

}  // namespace detail

inline const std::vector<HandcraftedCase>& handcrafted_cases() {
  using detail::hc;
  using detail::hp;
  constexpr auto span = AnswerType::short_span;
  static const std::vector<HandcraftedCase> cases = {
      hc("hc-01", "te", "కెన్యా రాజధాని ఏది?", "Nairobi", {"Nairobi"}, span,
         {hp("hc-01-p1", 1, "en",
             "Kenya (English Republic of Kenya) The Republic of Kenya is a country in East "
             "Africa. It is bordered by Ethiopia to the north, Somalia to the northeast and "
             "Tanzania to the south. Its capital is Nairobi.",
             "yyy", "yyy", 1),
          hp("hc-01-p2", 2, "te",
             "కెన్యా తూర్పు ఆఫ్రికాలోని ఒక దేశం. దీనికి ఉత్తరాన ఇథియోపియా ఉంది.", "nnn",
             "nnn", 0)}),
      hc("hc-02", "bn", "দ্বিতীয় বিশ্বযুদ্ধে গড়ে কত মানুষ মারা গিয়েছিল?", "Six crores",
         {"70-85 millions"}, span,
         {hp("hc-02-p1", 1, "en",
             "crores. The countries involved faced a kind of perfect war situation (ie, all "
             "available, regardless of military-civilian distinctions, were involved in the "
             "war in some way). As a result, all the economic, industrial and technological "
             "resources of the respective countries had to be used for war purposes. This war "
             "is known as the bloodiest in the history of the world, which caused the death "
             "of about six crore people.",
             "yyn", "yyy", 0),
          hp("hc-02-p2", 2, "bn", "দ্বিতীয় বিশ্বযুদ্ধ ১৯৩৯ সালে শুরু হয়েছিল।", "nnn", "nnn",
             0)}),
      hc("hc-03", "bn", "মানবদেহের বৃহত্তম অঙ্গ কোনটি?", "the skin", {"the liver"}, span,
         {hp("hc-03-p1", 1, "en",
             "Skin is the largest organ in our body. It has three important layers. The skin "
             "covers the entire body and protects the internal parts.",
             "yyy", "yyy", 1),
          hp("hc-03-p2", 2, "bn", "যকৃৎ মানবদেহের একটি গুরুত্বপূর্ণ অঙ্গ।", "nny", "nnn", 0)}),
      hc("hc-04", "ja", "カール・マルクスは歴史学派？", "Yes", {"Yes"}, std::nullopt,
         {hp("hc-04-p1", 1, "ja",
             "マルクス主義とは、カール・マルクスとフリードリヒ・エンゲルスによって展開された思想を"
             "ベースとして確立された社会主義思想体系の一つである。",
             "nny", "nnn", 0),
          hp("hc-04-p2", 2, "en",
             "Karl Marx was a German philosopher, economist, historian, sociologist and "
             "political theorist.",
             "yyy", "yyn", 0)}),
      hc("hc-05", "bn", "মারমা জনগোষ্ঠীর মাতৃভাষার নাম কী?", "বর্মী", {"বর্মী"}, span,
         {hp("hc-05-p1", 1, "bn",
             "বর্মী ভাষা বা মিয়ানমারের ভাষা চীনা-তিব্বতি ভাষা পরিবারের লোলো-বর্মী উপশাখার একটি ভাষা।",
             "nnn", "nny", 1),
          hp("hc-05-p2", 2, "en",
             "The Marma people are the second-largest ethnic group in the Chittagong Hill "
             "Tracts.",
             "nnn", "ffn", 0)}),
      hc("hc-06", "ru", "Какая самая длинная река в Европе?", "Волга", {"Волга"}, span,
         {hp("hc-06-p1", 1, "ru",
             "Волга — река в европейской части России, самая длинная река в Европе.", "yyy",
             "yyy", 1),
          hp("hc-06-p2", 2, "en", "The Volga is the longest river in Europe.", "yyy", "yyy",
             0)}),
      hc("hc-07", "fi", "Mikä on Suomen pääkaupunki?", "Helsinki", {"Helsinki"}, span,
         {hp("hc-07-p1", 1, "fi",
             "Helsinki on Suomen pääkaupunki ja maan väkirikkain kaupunki.", "yyy", "yyy", 1),
          hp("hc-07-p2", 2, "en", "Tampere is the third most populous city in Finland.",
             "nnu", "nnn", 0),
          hp("hc-07-p3", 3, "sv", "Helsingfors är Finlands huvudstad.", "yyn", "yyy", 0)}),
      hc("hc-08", "ja", "日本の公共放送局の略称は何ですか？", "ＮＨＫ", {"NHK"}, span,
         {hp("hc-08-p1", 1, "ja", "日本放送協会（NHK）は日本の公共放送である。", "yyy", "yyy",
             1)}),
      hc("hc-09", "ru", "Является ли Плутон планетой?", "Нет", {"Нет"}, std::nullopt,
         {hp("hc-09-p1", 1, "ru", "Плутон — карликовая планета в поясе Койпера.", "yyy",
             "yyy", 0),
          hp("hc-09-p2", 2, "en", "Pluto was reclassified as a dwarf planet in 2006.", "yyn",
             "yyy", 0)}),
      hc("hc-10", "te", "అమెరికా సంయుక్త రాష్ట్రాలలో ఎన్ని దేశాలు ఉన్నాయి?", "50", {"50"}, span,
         {hp("hc-10-p1", 1, "en",
             "The United States of America (USA), commonly known as the United States (U.S. "
             "or US) or America, is a country composed of 50 states, a federal district, five "
             "major self-governing territories, and various possessions.",
             "nny", "yyn", 1),
          hp("hc-10-p2", 2, "te", "వాషింగ్టన్ డి.సి. అమెరికా సంయుక్త రాష్ట్రాల రాజధాని.",
             "nnn", "nnn", 0)}),
  };
  return cases;
}

inline RatingRecord vote_to_rating(const Example& e, const Passage& p, Scenario s,
                                   int rater, char vote) {
  RatingRecord r;
  r.example_id = e.example_id;
  r.passage_id = p.passage_id;
  r.rater_id = std::string(s == Scenario::in_language ? e.query_language.str() : "en") +
               "-rater-" + std::to_string(rater);
  r.scenario = s;
  switch (vote) {
    case 'y': r.interpretable = true; r.attributed = true; break;
    case 'n': r.interpretable = true; r.attributed = false; break;
    case 'u': r.interpretable = false; break;
    case 'f': r.flagged = true; break;
    default: throw ConfigError(std::string("unknown vote code '") + vote + "'");
  }
  return r;
}

// Examples (answer_type as declared, null ones resolved) and ratings for
// both scenarios.
inline Dataset handcrafted_dataset() {
  Dataset ds;
  ds.metadata = {{"source", "handcrafted"}, {"version", "1"}};
  for (const auto& c : handcrafted_cases()) {
    ds.examples.push_back(c.example);
    for (const auto& hp : c.passages) {
      for (Scenario s : {Scenario::in_language, Scenario::in_english}) {
        const std::string& votes = s == Scenario::in_language ? hp.s1_votes : hp.s2_votes;
        for (std::size_t i = 0; i < votes.size(); ++i) {
          ds.ratings.push_back(vote_to_rating(c.example, hp.passage, s,
                                              static_cast<int>(i) + 1, votes[i]));
        }
      }
    }
  }
  return ds;
}

// Hand labels for the string-match baseline.
inline LabelMap handcrafted_string_match_labels() {
  LabelMap m;
  for (const auto& c : handcrafted_cases()) {
    for (const auto& hp : c.passages) {
      m[{c.example.example_id, hp.passage.passage_id}] = hp.string_match;
    }
  }
  return m;
}

// Examples file encoding that keeps the null answer_type of cases whose type
// comes from the lexicon.
inline void write_handcrafted_examples(std::ostream& out) {
  ordered_json meta;
  meta["_meta"] = handcrafted_dataset().metadata;
  out << meta.dump() << '\n';
  for (const auto& c : handcrafted_cases()) {
    ordered_json j = example_to_json(c.example);
    if (!c.declared_type) j["answer_type"] = nullptr;
    out << j.dump() << '\n';
  }
}

// Mining corpus: a 12-passage, a 5-passage and a single-passage document.
inline std::vector<MiningDocument> handcrafted_documents() {
  auto doc = [](std::string id, const char* lang, std::string query, std::string answer,
                int positive, std::vector<std::string> texts) {
    MiningDocument d;
    d.doc_id = std::move(id);
    d.language = LanguageCode(lang);
    d.query = std::move(query);
    d.answer = std::move(answer);
    for (std::size_t i = 0; i < texts.size(); ++i) {
      d.passages.push_back({d.doc_id + "-s" + std::to_string(i + 1), std::move(texts[i])});
    }
    d.positive_passage_id = d.passages.at(static_cast<std::size_t>(positive)).passage_id;
    return d;
  };
  return {
      doc("doc-fi-helsinki", "fi", "Mikä on Suomen pääkaupunki?", "Helsinki", 0,
          {"Helsinki on Suomen pääkaupunki.", "Suomi liittyi Euroopan unioniin vuonna 1995.",
           "Suomen virallisia kieliä ovat suomi ja ruotsi.", "Suomessa on noin 5,6 miljoonaa asukasta.",
           "Suomen rahayksikkö on euro.", "Suomessa on paljon järviä.",
           "Lapissa voi nähdä revontulia.", "Sauna on suomalainen keksintö.",
           "Tampere on Suomen kolmanneksi suurin kaupunki.", "Turku oli Suomen ensimmäinen pääkaupunki.",
           "Suomen itsenäisyyspäivä on 6. joulukuuta.", "Suomen lippu on sininen risti valkoisella pohjalla."}),
      doc("doc-ru-volga", "ru", "Какая самая длинная река в Европе?", "Волга", 2,
          {"Волга впадает в Каспийское море.", "Исток Волги находится на Валдайской возвышенности.",
           "Волга — самая длинная река в Европе.", "На Волге стоят Казань и Самара.",
           "Бассейн Волги занимает треть европейской части России."}),
      doc("doc-te-single", "te", "భారతదేశ రాజధాని ఏది?", "న్యూఢిల్లీ", 0,
          {"న్యూఢిల్లీ భారతదేశ రాజధాని."}),
  };
}

}  // namespace xattr
