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

// JSON-over-HTTP client with bounded retries, and the remote entailment
// scorer speaking the scorer wire protocol:
//   POST /v1/score        {"premise": str, "hypothesis": str} -> {"score": number}
//   POST /v1/score_batch  {"items": [{...}, ...]} -> {"scores": [number, ...]}
// Batch entries may be null or {"error": str} for items that failed.

#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "xattr/error.hpp"
#include "xattr/scorer.hpp"

namespace xattr {

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{250};
  double multiplier = 2.0;
};

struct HttpOptions {
  RetryPolicy retry;
  std::chrono::milliseconds connect_timeout{2000};
  std::chrono::milliseconds read_timeout{30000};
  int max_in_flight = 8;
  // Replaced in tests to avoid real waits.
  std::function<void(std::chrono::milliseconds)> sleep =
      [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
};

// Posts JSON bodies to one endpoint ("http://host:port"). Transport failures
// and 5xx/429 responses are retried with exponential backoff; other 4xx
// responses and unparsable bodies fail immediately as ProtocolError.
class JsonHttpClient {
 public:
  explicit JsonHttpClient(std::string endpoint, HttpOptions options = {})
      : endpoint_(std::move(endpoint)),
        options_(std::move(options)),
        in_flight_(std::make_unique<std::counting_semaphore<1024>>(
            std::clamp(options_.max_in_flight, 1, 1024))) {
    if (endpoint_.rfind("http://", 0) != 0 && endpoint_.rfind("https://", 0) != 0) {
      throw ConfigError("endpoint must start with http:// or https://, got \"" +
                        endpoint_ + "\"");
    }
    while (!endpoint_.empty() && endpoint_.back() == '/') endpoint_.pop_back();
  }

  const std::string& endpoint() const { return endpoint_; }

  nlohmann::json post(const std::string& path, const nlohmann::json& body) const {
    const std::string payload = body.dump();
    std::string last_error;
    auto backoff = options_.retry.initial_backoff;
    const int attempts = std::max(1, options_.retry.attempts);
    for (int attempt = 1; attempt <= attempts; ++attempt) {
      if (attempt > 1) {
        options_.sleep(backoff);
        backoff = std::chrono::milliseconds(static_cast<long long>(
            static_cast<double>(backoff.count()) * options_.retry.multiplier));
      }
      httplib::Result res = send(path, payload);
      if (!res) {
        last_error = "POST " + endpoint_ + path + ": " + httplib::to_string(res.error());
        continue;
      }
      if (res->status >= 500 || res->status == 429) {
        last_error = "POST " + endpoint_ + path + ": HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) {
        throw ProtocolError("POST " + endpoint_ + path + ": HTTP " +
                            std::to_string(res->status) + ": " + res->body);
      }
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::parse_error&) {
        throw ProtocolError("POST " + endpoint_ + path + ": response is not JSON");
      }
    }
    throw TransportError(last_error, attempts);
  }

 private:
  httplib::Result send(const std::string& path, const std::string& payload) const {
    in_flight_->acquire();
    struct Release {
      std::counting_semaphore<1024>* s;
      ~Release() { s->release(); }
    } release{in_flight_.get()};
    // One client per request: httplib clients are not shared across threads.
    httplib::Client client(endpoint_);
    client.set_connection_timeout(options_.connect_timeout);
    client.set_read_timeout(options_.read_timeout);
    client.set_write_timeout(options_.read_timeout);
    return client.Post(path, payload, "application/json");
  }

  std::string endpoint_;
  HttpOptions options_;
  std::unique_ptr<std::counting_semaphore<1024>> in_flight_;
};

// Validates one protocol score value.
inline double checked_score(const nlohmann::json& v) {
  if (!v.is_number()) throw ProtocolError("\"score\" is not a number");
  const double s = v.get<double>();
  if (!(s >= 0.0 && s <= 1.0)) throw ScoreRangeError(s);
  return s;
}

inline nlohmann::json triple_to_json(const PromptTriple& t) {
  return {{"premise", t.premise}, {"hypothesis", t.hypothesis}};
}

// Scores a prompt triple against POST /v1/score.
inline double remote_score(const PromptTriple& triple, const JsonHttpClient& client) {
  const nlohmann::json body = client.post("/v1/score", triple_to_json(triple));
  if (!body.is_object() || !body.contains("score")) {
    throw ProtocolError("response lacks \"score\"");
  }
  return checked_score(body["score"]);
}

// Scores triples through POST /v1/score_batch. Each item is checked on its
// own; item-level errors in the response become failed outcomes.
inline std::vector<ScoreOutcome> remote_score_batch(std::span<const PromptTriple> triples,
                                                    const JsonHttpClient& client) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& t : triples) items.push_back(triple_to_json(t));
  const nlohmann::json body = client.post("/v1/score_batch", {{"items", items}});
  if (!body.is_object() || !body.contains("scores") || !body["scores"].is_array()) {
    throw ProtocolError("response lacks \"scores\" array");
  }
  const auto& scores = body["scores"];
  if (scores.size() != triples.size()) {
    throw ProtocolError("batch returned " + std::to_string(scores.size()) +
                        " scores for " + std::to_string(triples.size()) + " items");
  }
  std::vector<ScoreOutcome> out;
  for (const auto& v : scores) {
    if (v.is_object() && v.contains("error")) {
      out.push_back({std::nullopt, "remote item error: " + v["error"].dump()});
      continue;
    }
    if (v.is_null()) {
      out.push_back({std::nullopt, "remote item error: null score"});
      continue;
    }
    try {
      out.push_back({checked_score(v), {}});
    } catch (const Error& e) {
      out.push_back({std::nullopt, e.what()});
    }
  }
  return out;
}

class RemoteScorer final : public Scorer {
 public:
  RemoteScorer(const ScorerSpec& spec, HttpOptions options = {})
      : name_(spec.name), template_id_(spec.template_id) {
    validate_scorer_spec(spec);
    client_ = std::make_unique<JsonHttpClient>(*spec.endpoint, std::move(options));
  }

  const std::string& name() const override { return name_; }

  double score(const Example& e, const Passage& p) const override {
    return remote_score(build_prompt(e, p, template_id_), *client_);
  }

  // One batch request. A malformed batch response falls back to per-item
  // calls; a transport failure fails every item with the same diagnostic.
  std::vector<ScoreOutcome> score_many(std::span<const ScoreItem> items) const override {
    std::vector<PromptTriple> triples;
    triples.reserve(items.size());
    for (const auto& it : items) {
      triples.push_back(build_prompt(*it.example, *it.passage, template_id_));
    }
    if (triples.empty()) return {};
    try {
      return remote_score_batch(triples, *client_);
    } catch (const TransportError& e) {
      return std::vector<ScoreOutcome>(items.size(), ScoreOutcome{std::nullopt, e.what()});
    } catch (const ProtocolError&) {
      return Scorer::score_many(items);
    }
  }

 private:
  std::string name_;
  std::string template_id_;
  std::unique_ptr<JsonHttpClient> client_;
};

}  // namespace xattr
