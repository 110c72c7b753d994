/*
 * Copyright 2026 The driftshap Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "driftshap/bench.h"
#include "driftshap/csv.h"
#include "test_support.h"

namespace driftshap {
namespace {

using testing::Slurp;
using testing::TempDir;

int RunWithEnv(const std::string& env, const std::string& args) {
  const std::string cmd = env + " " + std::string(DRIFTSHAP_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int Cli(const std::string& args) { return RunWithEnv("", args); }

std::string Q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

std::filesystem::path WriteToy(const std::string& name, ToyScenario scenario) {
  const auto dir = TempDir(name);
  const auto [b, t] = ToyTables(scenario);
  WriteCsvFile(b, (dir / "baseline.csv").string());
  WriteCsvFile(t, (dir / "target.csv").string());
  return dir;
}

std::string ToyArgs(const std::filesystem::path& dir) {
  return "attribute --baseline " + Q(dir / "baseline.csv") + " --target " +
         Q(dir / "target.csv") + " --categorical x1 x2 x3 --rule 'x1 and x2 and x3'";
}

TEST(CliTest, VersionAndBadOption) {
  EXPECT_EQ(Cli("--version"), 0);
  EXPECT_EQ(Cli("attribute --no-such-flag"), 2);
  EXPECT_EQ(Cli("attribute --baseline a.csv"), 2);
  EXPECT_EQ(Cli("generate --family nosuch"), 2);
}

TEST(CliTest, GenerateIsByteReproducible) {
  const auto a = TempDir("gen_a");
  const auto b = TempDir("gen_b");
  for (const auto& dir : {a, b}) {
    ASSERT_EQ(Cli("generate --family sea --concepts 8,9 --rows 10000 --seed 7 --out-dir " + Q(dir)),
              0);
  }
  for (const char* f : {"baseline.csv", "target.csv", "manifest.json"}) {
    EXPECT_EQ(Slurp(a / f), Slurp(b / f)) << f;
  }
  const auto base = ReadCsv(a / "baseline.csv");
  const auto target = ReadCsv(a / "target.csv");
  EXPECT_EQ(base.columns, target.columns);
  EXPECT_EQ(base.rows.size(), 10000u);
  const auto manifest = nlohmann::json::parse(Slurp(a / "manifest.json"));
  EXPECT_FALSE(manifest.contains("timestamp"));
}

TEST(CliTest, GenerateScenarioErrorsExitSix) {
  const auto dir = TempDir("gen_err");
  EXPECT_EQ(Cli("generate --family stagger --perturb size --mult 0,2 --out-dir " + Q(dir)), 6);
  EXPECT_EQ(Cli("generate --family sea --concepts 3,9 --out-dir " + Q(dir)), 6);
  EXPECT_EQ(Cli("generate --family stagger --perturb size --reweight 0.7,0.15,0.15 --rows 500 "
                "--out-dir " + Q(dir)),
            0);
}

TEST(CliTest, AttributeToyReport) {
  const auto dir = WriteToy("cli_toy", ToyScenario::kCombined);
  ASSERT_EQ(Cli(ToyArgs(dir) + " --factorization two-player --estimator exact -o " +
                Q(dir / "report.json")),
            0);
  const auto doc = nlohmann::json::parse(Slurp(dir / "report.json"));
  EXPECT_NEAR(doc.at("attribution").at("phi").at("conditional").get<double>(), 0.765, 1e-9);
  EXPECT_NEAR(doc.at("attribution").at("phi").at("input").get<double>(), 0.015, 1e-9);
  EXPECT_FALSE(Slurp(dir / "report.json.txt").empty());
}

TEST(CliTest, AttributeIsByteReproducibleWithFixedEpoch) {
  const auto dir = WriteToy("cli_repro", ToyScenario::kCombined);
  const std::string args = ToyArgs(dir) +
                           " --factorization per-feature --estimator monte-carlo "
                           "--permutations 300 --seed 5 -o ";
  ASSERT_EQ(RunWithEnv("SOURCE_DATE_EPOCH=1", args + Q(dir / "one.json")), 0);
  ASSERT_EQ(RunWithEnv("SOURCE_DATE_EPOCH=1", args + Q(dir / "two.json")), 0);
  ASSERT_EQ(Cli(args + Q(dir / "three.json")), 0);
  EXPECT_EQ(Slurp(dir / "one.json"), Slurp(dir / "two.json"));
  auto strip = [](nlohmann::json j) {
    j["provenance"].erase("timestamp");
    return j.dump();
  };
  const auto two = nlohmann::json::parse(Slurp(dir / "two.json"));
  const auto three = nlohmann::json::parse(Slurp(dir / "three.json"));
  EXPECT_EQ(strip(two), strip(three));
  EXPECT_EQ(Slurp(dir / "two.json.txt"), Slurp(dir / "three.json.txt"));
}

TEST(CliTest, AttributeErrorExitCodes) {
  const auto dir = WriteToy("cli_errors", ToyScenario::kCombined);
  EXPECT_EQ(Cli("attribute --baseline " + Q(dir / "missing.csv") + " --target " +
                Q(dir / "target.csv") + " --rule x1"),
            3);
  EXPECT_EQ(Cli(ToyArgs(dir) + " --label outcome -o " + Q(dir / "r.json")), 4);
  EXPECT_EQ(Cli(ToyArgs(dir) + " --factorization per-feature --estimator exact --exact-limit 2 -o " +
                Q(dir / "r.json")),
            5);
  EXPECT_EQ(Cli(ToyArgs(dir) + " --estimator monte-carlo --permutations 0 -o " + Q(dir / "r.json")),
            2);
}

TEST(CliTest, ConfigFileAndOutputDirEnvironment) {
  const auto dir = WriteToy("cli_config", ToyScenario::kRealDrift);
  std::ofstream(dir / "run.toml") << "[attribute]\n"
                                  << "baseline = \"" << (dir / "baseline.csv").string() << "\"\n"
                                  << "target = \"" << (dir / "target.csv").string() << "\"\n"
                                  << "categorical = [\"x1\", \"x2\", \"x3\"]\n"
                                  << "rule = \"x1 and x2 and x3\"\n"
                                  << "estimator = \"exact\"\n";
  const auto out = dir / "out";
  ASSERT_EQ(RunWithEnv("DRIFTSHAP_OUTPUT_DIR=" + Q(out), "--config " + Q(dir / "run.toml") + " attribute"),
            0);
  const auto doc = nlohmann::json::parse(Slurp(out / "report.json"));
  EXPECT_NEAR(doc.at("attribution").at("phi").at("conditional").get<double>(), 0.75, 1e-9);
}

TEST(CliTest, BenchToySuite) {
  const auto dir = TempDir("cli_bench");
  ASSERT_EQ(Cli("bench --suite toy --out-dir " + Q(dir)), 0);
  const auto doc = nlohmann::json::parse(Slurp(dir / "bench_toy.json"));
  EXPECT_FALSE(Slurp(dir / "bench_toy.txt").empty());
  EXPECT_FALSE(doc.dump().empty());
}

}  // namespace
}  // namespace driftshap
