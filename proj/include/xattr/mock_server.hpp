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

// Deterministic in-process HTTP service speaking the scoring and translation
// protocol. Used by tests and by the xattr-mock-server tool.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "xattr/error.hpp"
#include "xattr/hash.hpp"
#include "xattr/scorer.hpp"
#include "xattr/text.hpp"

namespace xattr {

enum class MockFault {
  none,
  out_of_range,    // scores of 1.5
  malformed,       // non-JSON bodies on scoring routes
  batch_malformed  // /v1/score_batch answers non-JSON; /v1/score is healthy
};

struct MockServerConfig {
  std::uint64_t seed = 0;
  int fail_first = 0;  // the first N scoring/translation requests answer fail_status
  int fail_status = 503;
  MockFault fault = MockFault::none;
};

// Score in [0, 1]: above 0.6 when the normalized answer occurs in the
// normalized premise, below 0.4 otherwise, jittered by a hash of the triple.
inline double mock_entailment_score(const PromptTriple& t, std::uint64_t seed) {
  std::uint64_t h = fnv1a_field(t.premise, splitmix64(seed));
  h = splitmix64(fnv1a_field(t.hypothesis, h));
  const double u = unit_interval(h);
  auto inverted = invert_prompt(t);
  const bool found = inverted && !inverted->answer.empty() &&
                     normalize(t.premise).find(normalize(inverted->answer)) != std::string::npos;
  return found ? 0.6 + 0.4 * u : 0.4 * u;
}

class MockServer {
 public:
  explicit MockServer(MockServerConfig config = {}) : config_(config) { routes(); }

  ~MockServer() { stop(); }

  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  // Binds host:port (port 0 picks a free one) and serves on a background
  // thread. Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0) {
    port_ = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (port_ < 0) throw ConfigError("mock server cannot bind " + host + ":" + std::to_string(port));
    host_ = host;
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  // Serves on the calling thread until stop() is called from elsewhere.
  void listen(const std::string& host, int port) {
    host_ = host;
    port_ = port;
    if (!server_.listen(host, port)) {
      throw ConfigError("mock server cannot listen on " + host + ":" + std::to_string(port));
    }
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }
  std::string endpoint() const { return "http://" + host_ + ":" + std::to_string(port_); }
  long requests() const { return requests_.load(); }

 private:
  bool inject_failure(httplib::Response& res) {
    const long n = requests_.fetch_add(1);
    if (n < config_.fail_first) {
      res.status = config_.fail_status;
      res.set_content("{\"error\":\"injected failure\"}", "application/json");
      return true;
    }
    return false;
  }

  static bool parse_body(const httplib::Request& req, httplib::Response& res,
                         nlohmann::json& out) {
    try {
      out = nlohmann::json::parse(req.body);
      return true;
    } catch (const nlohmann::json::parse_error&) {
      res.status = 400;
      res.set_content("{\"error\":\"body is not JSON\"}", "application/json");
      return false;
    }
  }

  static std::optional<PromptTriple> triple_from(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("premise") || !j.contains("hypothesis") ||
        !j["premise"].is_string() || !j["hypothesis"].is_string()) {
      return std::nullopt;
    }
    return PromptTriple{j["premise"].get<std::string>(), j["hypothesis"].get<std::string>()};
  }

  double score_of(const PromptTriple& t) const {
    return config_.fault == MockFault::out_of_range ? 1.5
                                                    : mock_entailment_score(t, config_.seed);
  }

  void routes() {
    server_.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("{\"status\":\"ok\",\"model\":\"mock\"}", "application/json");
    });
    server_.Post("/v1/score", [this](const httplib::Request& req, httplib::Response& res) {
      if (inject_failure(res)) return;
      if (config_.fault == MockFault::malformed) {
        res.set_content("not json", "text/plain");
        return;
      }
      nlohmann::json body;
      if (!parse_body(req, res, body)) return;
      auto t = triple_from(body);
      if (!t) {
        res.status = 400;
        res.set_content("{\"error\":\"expected premise and hypothesis\"}", "application/json");
        return;
      }
      res.set_content(nlohmann::json{{"score", score_of(*t)}}.dump(), "application/json");
    });
    server_.Post("/v1/score_batch", [this](const httplib::Request& req, httplib::Response& res) {
      if (inject_failure(res)) return;
      if (config_.fault == MockFault::malformed || config_.fault == MockFault::batch_malformed) {
        res.set_content("not json", "text/plain");
        return;
      }
      nlohmann::json body;
      if (!parse_body(req, res, body)) return;
      if (!body.is_object() || !body.contains("items") || !body["items"].is_array()) {
        res.status = 400;
        res.set_content("{\"error\":\"expected items array\"}", "application/json");
        return;
      }
      nlohmann::json scores = nlohmann::json::array();
      for (const auto& item : body["items"]) {
        auto t = triple_from(item);
        if (t) {
          scores.push_back(score_of(*t));
        } else {
          scores.push_back({{"error", "expected premise and hypothesis"}});
        }
      }
      res.set_content(nlohmann::json{{"scores", scores}}.dump(), "application/json");
    });
    server_.Post("/v1/translate", [this](const httplib::Request& req, httplib::Response& res) {
      if (inject_failure(res)) return;
      nlohmann::json body;
      if (!parse_body(req, res, body)) return;
      if (!body.is_object() || !body.contains("text") || !body["text"].is_string() ||
          !body.contains("target") || !body["target"].is_string()) {
        res.status = 400;
        res.set_content("{\"error\":\"expected text and target\"}", "application/json");
        return;
      }
      const std::string text =
          "[" + body["target"].get<std::string>() + "] " + body["text"].get<std::string>();
      res.set_content(nlohmann::json{{"text", text}}.dump(), "application/json");
    });
  }

  MockServerConfig config_;
  httplib::Server server_;
  std::thread thread_;
  std::string host_ = "127.0.0.1";
  int port_ = -1;
  std::atomic<long> requests_{0};
};

}  // namespace xattr
