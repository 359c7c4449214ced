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

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "support.hpp"
#include "xattr/cli.hpp"
#include "xattr/mock_server.hpp"

namespace xattr {
namespace {

namespace fs = std::filesystem;
using testing::read_file;
using testing::TempDir;
using testing::write_file;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "xattr");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) {
  return (testing::source_dir() / "data" / "fixture" / name).string();
}

std::vector<std::string> eval_args(const TempDir& dir) {
  return {"evaluate", "--examples", fixture("examples.jsonl"), "--ratings",
          fixture("ratings.jsonl"), "--out", dir.path().string()};
}

// Sets an environment variable for the lifetime of the guard.
class EnvGuard {
 public:
  EnvGuard(const char* name, const std::string& value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    ::setenv(name, value.c_str(), 1);
  }
  ~EnvGuard() {
    if (old_) {
      ::setenv(name_, old_->c_str(), 1);
    } else {
      ::unsetenv(name_);
    }
  }

 private:
  const char* name_;
  std::optional<std::string> old_;
};

TEST(Cli, EvaluateOnBundledFixture) {
  TempDir dir;
  auto args = eval_args(dir);
  args.insert(args.end(), {"--threshold", "0.5"});
  const CliResult r = run_cli(args);
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"scores.jsonl", "eval_report.json", "report.md"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_NE(r.out.find("## Reranking"), std::string::npos);
  EXPECT_NE(r.out.find("## Attribution detection"), std::string::npos);
  const auto report = report_from_json(json::parse(read_file(dir / "eval_report.json")));
  EXPECT_EQ(report.scorer, "string-match");
  EXPECT_EQ(report.languages.size(), 5u);
  EXPECT_EQ(read_file(dir / "report.md"), render_report(report, ReportFormat::markdown));
}

TEST(Cli, ReportCommandRendersBothFormats) {
  TempDir dir;
  ASSERT_EQ(run_cli(eval_args(dir)).code, 0);
  const std::string json_path = (dir / "eval_report.json").string();
  const auto report = report_from_json(json::parse(read_file(json_path)));
  const CliResult tsv = run_cli({"report", "--report", json_path, "--format", "tsv"});
  const CliResult md = run_cli({"report", "--report", json_path, "--format", "md"});
  ASSERT_EQ(tsv.code, 0);
  ASSERT_EQ(md.code, 0);
  EXPECT_EQ(tsv.out, render_report(report, ReportFormat::tsv));
  EXPECT_EQ(md.out, render_report(report, ReportFormat::markdown));
  TempDir out;
  ASSERT_EQ(run_cli({"report", "--report", json_path, "--format", "tsv", "--out",
                     out.path().string()}).code, 0);
  EXPECT_EQ(read_file(out / "report.tsv"), tsv.out);
}

TEST(Cli, UnreachableRemoteScorerExitsWithTransportDiagnostic) {
  MockServer probe;
  probe.start();
  const std::string endpoint = probe.endpoint();
  probe.stop();
  TempDir dir;
  const CliResult r = run_cli({"score", "--examples", fixture("examples.jsonl"), "--scorer",
                               "remote", "--endpoint", endpoint, "--out", dir.path().string()});
  EXPECT_EQ(r.code, cli::kRemote);
  EXPECT_NE(r.err.find("error: remote:"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("after 3 attempts"), std::string::npos) << r.err;

  const CliResult eval = run_cli({"evaluate", "--examples", fixture("examples.jsonl"), "--ratings",
                                  fixture("ratings.jsonl"), "--scorer", "remote", "--endpoint",
                                  endpoint, "--batch-size", "64", "--out", dir.path().string()});
  EXPECT_EQ(eval.code, cli::kRemote);
  EXPECT_NE(eval.err.find("error: transport:"), std::string::npos) << eval.err;
}

TEST(Cli, RemoteScorerAgainstMockServer) {
  MockServer server({4});
  server.start();
  TempDir dir;
  const CliResult r = run_cli({"score", "--examples", fixture("examples.jsonl"), "--scorer",
                               "remote", "--endpoint", server.endpoint(), "--out",
                               dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& rec : load_scores(dir / "scores.jsonl")) {
    EXPECT_GE(rec.scored.score, 0.0);
    EXPECT_LE(rec.scored.score, 1.0);
  }
}

TEST(Cli, FlagsBeatConfigBeatsEnvironment) {
  MockServer server({4});
  server.start();
  TempDir dir;
  const auto cfg = dir / "config.json";
  write_file(cfg, R"({"scorer": "mock", "seed": 3, "mock_mode": "constant", "out": ")" +
                      (dir / "from-config").string() + "\"}");
  const std::string examples = fixture("examples.jsonl");

  ASSERT_EQ(run_cli({"score", "--config", cfg.string(), "--examples", examples}).code, 0);
  for (const auto& rec : load_scores(dir / "from-config" / "scores.jsonl")) {
    EXPECT_EQ(rec.scored.scorer_name, "mock-constant");
    EXPECT_EQ(rec.scored.score, 0.5);
  }

  ASSERT_EQ(run_cli({"score", "--config", cfg.string(), "--examples", examples, "--scorer",
                     "string-match", "--out", (dir / "from-flag").string()}).code, 0);
  for (const auto& rec : load_scores(dir / "from-flag" / "scores.jsonl")) {
    EXPECT_EQ(rec.scored.scorer_name, "string-match");
  }

  const EnvGuard env("XATTR_SCORER_ENDPOINT", server.endpoint());
  const long before = server.requests();
  const CliResult via_env = run_cli({"score", "--examples", examples, "--scorer", "remote",
                                     "--out", (dir / "env").string()});
  ASSERT_EQ(via_env.code, 0) << via_env.err;
  EXPECT_GT(server.requests(), before);

  MockServer down;
  down.start();
  const std::string down_endpoint = down.endpoint();
  down.stop();
  const auto cfg2 = dir / "remote.json";
  write_file(cfg2, R"({"scorer": "remote", "endpoint": ")" + down_endpoint + "\"}");
  const CliResult config_wins = run_cli({"score", "--config", cfg2.string(), "--examples",
                                         examples, "--out", (dir / "cfg").string()});
  EXPECT_EQ(config_wins.code, cli::kRemote);
}

TEST(Cli, UsageAndInputErrors) {
  TempDir dir;
  EXPECT_EQ(run_cli({}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"evaluate", "--no-such-flag"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"evaluate", "--format", "csv"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"score", "--examples", fixture("examples.jsonl"), "--scorer", "mock",
                     "--out", dir.path().string()}).code,
            cli::kUsage);
  EXPECT_EQ(run_cli({"score", "--examples", fixture("examples.jsonl"), "--scorer", "remote",
                     "--out", dir.path().string()}).code,
            cli::kUsage);

  const auto cfg = dir / "bad.json";
  write_file(cfg, R"({"colour": "blue"})");
  const CliResult unknown_key = run_cli({"evaluate", "--config", cfg.string()});
  EXPECT_EQ(unknown_key.code, cli::kUsage);
  EXPECT_NE(unknown_key.err.find("colour"), std::string::npos);
  EXPECT_EQ(run_cli({"evaluate", "--config", (dir / "absent.json").string()}).code, cli::kUsage);

  const CliResult missing = run_cli({"evaluate", "--examples", (dir / "absent.jsonl").string(),
                                     "--ratings", fixture("ratings.jsonl"), "--out",
                                     dir.path().string()});
  EXPECT_EQ(missing.code, cli::kInput);
  EXPECT_NE(missing.err.find("absent.jsonl"), std::string::npos);

  write_file(dir / "broken.jsonl", "{\"example_id\": \"x\"}\n");
  const CliResult invalid = run_cli({"ingest", "--examples", (dir / "broken.jsonl").string(),
                                     "--out", dir.path().string()});
  EXPECT_EQ(invalid.code, cli::kInput);
  EXPECT_NE(invalid.err.find("line 1"), std::string::npos) << invalid.err;
}

TEST(Cli, HelpExitsCleanly) {
  const CliResult r = run_cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("evaluate"), std::string::npos);
}

TEST(Cli, JobCountDoesNotChangeOutput) {
  MockServer server({9});
  server.start();
  std::map<std::string, std::string> outputs;
  for (const char* scorer : {"mock", "remote"}) {
    for (const char* jobs : {"1", "4"}) {
      TempDir dir;
      auto args = eval_args(dir);
      args.insert(args.end(), {"--scorer", scorer, "--seed", "5", "--endpoint", server.endpoint(),
                               "--jobs", jobs, "--batch-size", "3", "--threshold", "0.5"});
      const CliResult r = run_cli(args);
      ASSERT_EQ(r.code, 0) << r.err;
      const std::string all = read_file(dir / "scores.jsonl") + read_file(dir / "eval_report.json") +
                              read_file(dir / "report.md") + r.out;
      auto [it, fresh] = outputs.emplace(scorer, all);
      if (!fresh) {
        EXPECT_EQ(it->second, all) << scorer;
      }
    }
  }
}

TEST(Cli, CalibrateThenEvaluateWithThresholds) {
  TempDir dir;
  const CliResult cal = run_cli({"calibrate", "--examples", fixture("examples.jsonl"), "--ratings",
                                 fixture("ratings.jsonl"), "--scorer", "mock", "--seed", "2",
                                 "--out", dir.path().string()});
  ASSERT_EQ(cal.code, 0) << cal.err;
  const json thresholds = json::parse(read_file(dir / "thresholds.json"));
  ASSERT_TRUE(thresholds.contains("all"));
  // Languages whose judged pairs share one label are reported, not calibrated.
  EXPECT_NE(cal.err.find("warning: "), std::string::npos);
  auto args = eval_args(dir);
  args.insert(args.end(), {"--scorer", "mock", "--seed", "2", "--thresholds",
                           (dir / "thresholds.json").string()});
  ASSERT_EQ(run_cli(args).code, 0);
  const auto report = report_from_json(json::parse(read_file(dir / "eval_report.json")));
  for (const auto& l : report.languages) {
    if (!thresholds.contains(l.language)) {
      EXPECT_EQ(l.threshold, thresholds["all"]["threshold"].get<double>()) << l.language;
      continue;
    }
    EXPECT_EQ(l.threshold, thresholds[l.language]["threshold"].get<double>());
    EXPECT_NEAR(*l.accuracy, thresholds[l.language]["accuracy"].get<double>(), 1e-9);
  }
}

TEST(Cli, RerankWritesOneChoicePerExample) {
  TempDir dir;
  const CliResult r = run_cli({"rerank", "--examples", fixture("examples.jsonl"), "--ratings",
                               fixture("ratings.jsonl"), "--out", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string body = read_file(dir / "reranked.jsonl");
  const auto examples = load_examples(fixture("examples.jsonl"));
  EXPECT_EQ(static_cast<std::size_t>(std::count(body.begin(), body.end(), '\n')), examples.size());
  EXPECT_NE(r.out.find("language\ttop-1\treranked"), std::string::npos);
}

TEST(Cli, IngestAndAggregate) {
  TempDir dir;
  const CliResult ing = run_cli({"ingest", "--examples", fixture("examples.jsonl"), "--ratings",
                                 fixture("ratings.jsonl"), "--out", dir.path().string()});
  ASSERT_EQ(ing.code, 0) << ing.err;
  EXPECT_EQ(load_examples(dir / "examples.jsonl").size(),
            load_examples(fixture("examples.jsonl")).size());
  const CliResult agg = run_cli({"aggregate", "--ratings", fixture("ratings.jsonl"), "--out",
                                 dir.path().string()});
  ASSERT_EQ(agg.code, 0) << agg.err;
  const auto judgments = load_judgments(dir / "judgments.jsonl");
  const auto ratings = load_ratings(fixture("ratings.jsonl"));
  EXPECT_EQ(judgments.size(), aggregate_all(ratings, Scenario::in_language).judgments.size() +
                                  aggregate_all(ratings, Scenario::in_english).judgments.size());

  // Judgments and ratings give the same AIS.
  TempDir a, b;
  ASSERT_EQ(run_cli({"evaluate", "--examples", fixture("examples.jsonl"), "--judgments",
                     (dir / "judgments.jsonl").string(), "--out", a.path().string()}).code, 0);
  ASSERT_EQ(run_cli(eval_args(b)).code, 0);
  const auto ra = report_from_json(json::parse(read_file(a / "eval_report.json")));
  const auto rb = report_from_json(json::parse(read_file(b / "eval_report.json")));
  ASSERT_EQ(ra.languages.size(), rb.languages.size());
  for (std::size_t i = 0; i < ra.languages.size(); ++i) {
    EXPECT_EQ(ra.languages[i].any, rb.languages[i].any);
    EXPECT_EQ(ra.languages[i].ais_reranked, rb.languages[i].ais_reranked);
  }
}

TEST(Cli, AgreementCommand) {
  TempDir dir;
  const CliResult r = run_cli({"agreement", "--examples", fixture("examples.jsonl"), "--ratings",
                               fixture("ratings.jsonl"), "--format", "tsv", "--out",
                               dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# Annotation agreement"), std::string::npos);
  EXPECT_EQ(read_file(dir / "agreement.tsv"), r.out);
}

TEST(Cli, MineMatchesLibraryOutput) {
  TempDir dir;
  const CliResult r = run_cli({"mine", "--documents", fixture("documents.jsonl"), "--seed", "7",
                               "--out", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("warning: document \"doc-te-single\""), std::string::npos);
  EXPECT_TRUE(testing::matches_golden("train.jsonl", read_file(dir / "train.jsonl")));
  EXPECT_EQ(run_cli({"mine", "--documents", fixture("documents.jsonl"), "--k", "0", "--out",
                     dir.path().string()}).code,
            cli::kUsage);
}

}  // namespace
}  // namespace xattr
