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

// Serves the deterministic scoring/translation protocol until SIGINT/SIGTERM.

#include <chrono>
#include <csignal>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "xattr/mock_server.hpp"

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic mock of the scorer and translation services",
               "xattr-mock-server"};
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string fault = "none";
  xattr::MockServerConfig config;
  app.add_option("--host", host, "Bind address");
  app.add_option("--port", port, "Port (0 picks a free one)");
  app.add_option("--seed", config.seed, "Score jitter seed");
  app.add_option("--fail-first", config.fail_first,
                 "Answer the first N requests with --fail-status");
  app.add_option("--fail-status", config.fail_status, "HTTP status for injected failures");
  app.add_option("--fault", fault, "none|out-of-range|malformed|batch-malformed")
      ->check(CLI::IsMember({"none", "out-of-range", "malformed", "batch-malformed"}));
  CLI11_PARSE(app, argc, argv);

  if (fault == "out-of-range") config.fault = xattr::MockFault::out_of_range;
  if (fault == "malformed") config.fault = xattr::MockFault::malformed;
  if (fault == "batch-malformed") config.fault = xattr::MockFault::batch_malformed;

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  try {
    xattr::MockServer server(config);
    server.start(host, port);
    std::cout << server.endpoint() << std::endl;
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
  } catch (const xattr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
