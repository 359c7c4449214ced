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

// Training data for attribution detectors: the answer-bearing passage of a
// document is the positive, other passages of the same document are the
// negatives.
//
// Documents file, one object per line:
//   {"doc_id": str, "language": str, "query": str, "answer": str,
//    "positive_passage_id": str,
//    "passages": [{"passage_id": str, "text": str}]}
// Training file: a {"_meta": {...}} header line, then
//   {"premise": str, "hypothesis": str, "label": 0|1, "language": str,
//    "doc_id": str}

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xattr/hash.hpp"
#include "xattr/ingest.hpp"
#include "xattr/scorer.hpp"

namespace xattr {

struct DocumentPassage {
  std::string passage_id;
  std::string text;

  bool operator==(const DocumentPassage&) const = default;
};

struct MiningDocument {
  std::string doc_id;
  LanguageCode language;
  std::string query;
  std::string answer;
  std::string positive_passage_id;
  std::vector<DocumentPassage> passages;
};

struct MinedPair {
  std::string query;
  std::string answer;
  std::string passage_id;
  std::string passage;
  int label = 0;
  std::string source_document_id;
  LanguageCode language;

  bool operator==(const MinedPair&) const = default;
};

struct MineResult {
  std::vector<MinedPair> pairs;  // the positive first, then negatives
  std::vector<std::string> warnings;
};

inline std::uint64_t document_seed(std::uint64_t global_seed, std::string_view doc_id) {
  return splitmix64(global_seed ^ fnv1a(doc_id));
}

// One positive pair plus min(k, eligible) negatives drawn uniformly without
// replacement. Passages whose id or text equals the positive are ineligible.
inline MineResult mine_negatives(const MiningDocument& doc, std::string_view positive_id,
                                 int k, std::uint64_t seed) {
  if (k < 1) throw ConfigError("negatives per document must be >= 1");
  const DocumentPassage* positive = nullptr;
  for (const auto& p : doc.passages) {
    if (p.passage_id == positive_id) positive = &p;
  }
  if (positive == nullptr) {
    throw ValidationError("positive_passage_id", "\"" + std::string(positive_id) +
                                                     "\" not in document \"" + doc.doc_id + "\"");
  }
  std::vector<const DocumentPassage*> pool;
  for (const auto& p : doc.passages) {
    if (p.passage_id != positive->passage_id && p.text != positive->text) pool.push_back(&p);
  }

  MineResult out;
  auto pair_for = [&](const DocumentPassage& p, int label) {
    return MinedPair{doc.query, doc.answer, p.passage_id, p.text,
                     label,     doc.doc_id, doc.language};
  };
  out.pairs.push_back(pair_for(*positive, 1));
  if (pool.empty()) {
    out.warnings.push_back("document \"" + doc.doc_id + "\" has no negative candidates");
    return out;
  }
  // Partial Fisher-Yates: the first `take` slots become the sample.
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), pool.size());
  SplitMix rng(seed);
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
    out.pairs.push_back(pair_for(*pool[i], 0));
  }
  return out;
}

// Documents are mined independently with seeds derived from
// (global seed, doc_id); output follows input order.
inline MineResult mine_corpus(std::span<const MiningDocument> docs, int k,
                              std::uint64_t global_seed) {
  MineResult out;
  for (const auto& doc : docs) {
    MineResult r = mine_negatives(doc, doc.positive_passage_id, k,
                                  document_seed(global_seed, doc.doc_id));
    out.pairs.insert(out.pairs.end(), r.pairs.begin(), r.pairs.end());
    out.warnings.insert(out.warnings.end(), r.warnings.begin(), r.warnings.end());
  }
  return out;
}

inline MiningDocument document_from_json(const json& j) {
  MiningDocument d;
  d.doc_id = detail::require_string(j, "doc_id");
  d.language = detail::require_language(j, "language");
  d.query = detail::require_string(j, "query");
  d.answer = detail::require_string(j, "answer");
  d.positive_passage_id = detail::require_string(j, "positive_passage_id");
  const json& passages = detail::require(j, "passages", "");
  if (!passages.is_array()) throw ValidationError("passages", "expected array");
  for (std::size_t i = 0; i < passages.size(); ++i) {
    const std::string path = "passages[" + std::to_string(i) + "].";
    d.passages.push_back({detail::require_string(passages[i], "passage_id", path),
                          detail::require_string(passages[i], "text", path)});
  }
  return d;
}

inline ordered_json document_to_json(const MiningDocument& d) {
  ordered_json j;
  j["doc_id"] = d.doc_id;
  j["language"] = d.language.str();
  j["query"] = d.query;
  j["answer"] = d.answer;
  j["positive_passage_id"] = d.positive_passage_id;
  j["passages"] = ordered_json::array();
  for (const auto& p : d.passages) {
    j["passages"].push_back({{"passage_id", p.passage_id}, {"text", p.text}});
  }
  return j;
}

inline std::vector<MiningDocument> read_documents(std::istream& in) {
  std::vector<MiningDocument> docs;
  detail::for_each_record(in, [&](const json& record, int) {
    docs.push_back(document_from_json(record));
  });
  return docs;
}

// Writes the training file: a metadata header, then one record per pair in
// an order shuffled deterministically by `seed`.
inline void emit_training_file(std::ostream& out, std::vector<MinedPair> pairs,
                               std::string_view template_id, std::uint64_t seed) {
  find_template(template_id);
  long positives = 0;
  for (const auto& p : pairs) positives += p.label;
  ordered_json meta;
  meta["template_id"] = std::string(template_id);
  meta["seed"] = seed;
  meta["count"] = pairs.size();
  meta["positives"] = positives;
  out << ordered_json{{"_meta", meta}}.dump() << '\n';

  SplitMix rng(splitmix64(seed));
  for (std::size_t i = pairs.size(); i > 1; --i) {
    std::swap(pairs[i - 1], pairs[rng.below(i)]);
  }
  for (const auto& p : pairs) {
    const PromptTriple t = build_prompt(p.query, p.answer, p.passage, template_id);
    ordered_json j;
    j["premise"] = t.premise;
    j["hypothesis"] = t.hypothesis;
    j["label"] = p.label;
    j["language"] = p.language.str();
    j["doc_id"] = p.source_document_id;
    out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
  if (!out) throw ConfigError("failed writing training file");
}

}  // namespace xattr
