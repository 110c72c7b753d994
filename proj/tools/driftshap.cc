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

// driftshap command line: attribute, generate and bench.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "driftshap/bench.h"
#include "driftshap/generators.h"
#include "driftshap/numeric.h"
#include "driftshap/pipeline.h"

namespace {

using driftshap::Error;
using driftshap::ErrorCode;
using driftshap::Stage;

constexpr const char* kOutputDirEnv = "DRIFTSHAP_OUTPUT_DIR";

std::string DefaultOutputDir() {
  const char* dir = std::getenv(kOutputDirEnv);
  return dir != nullptr ? dir : "";
}

std::filesystem::path OutputDir(const std::string& flag) {
  if (!flag.empty()) return flag;
  const std::string env = DefaultOutputDir();
  return env.empty() ? std::filesystem::path(".") : std::filesystem::path(env);
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
}

struct AttributeArgs {
  driftshap::RunConfig config;
  std::string schema_path;
  std::string bin_strategy = "equal-width";
  std::string out_of_range = "clamp";
  std::string unknown_category = "reject";
  std::string hypothesis;
  std::string factorization = "two-player";
  std::string estimator = "auto";
  std::string risk_method = "auto";
  bool print_text = false;
};

void AddAttribute(CLI::App& app, AttributeArgs& a) {
  auto* cmd = app.add_subcommand("attribute", "attribute a risk change to real and virtual drift");
  auto& c = a.config;
  cmd->add_option("--baseline", c.baseline_path, "baseline CSV")->required();
  cmd->add_option("--target", c.target_path, "target CSV")->required();
  cmd->add_option("--schema", a.schema_path, "feature schema JSON (inferred when absent)");
  cmd->add_option("--label", c.label_column, "label column")->capture_default_str();
  cmd->add_option("--categorical", c.categorical, "columns to treat as categorical")
      ->delimiter(',');
  cmd->add_option("--bins", c.default_binning.bin_count, "default bin count")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--bin-strategy", a.bin_strategy)
      ->check(CLI::IsMember({"equal-width", "quantile"}))
      ->capture_default_str();
  cmd->add_option("--out-of-range", a.out_of_range)
      ->check(CLI::IsMember({"clamp", "reject"}))
      ->capture_default_str();
  cmd->add_option("--unknown-category", a.unknown_category)
      ->check(CLI::IsMember({"reject", "other"}))
      ->capture_default_str();
  cmd->add_option("--hypothesis", a.hypothesis,
                  "rule | tree | prediction-map | json (default: rule when --rule is set, "
                  "else tree)")
      ->check(CLI::IsMember({"rule", "tree", "prediction-map", "json"}));
  cmd->add_option("--rule", c.hypothesis.rule, "boolean rule, e.g. \"x1 and (x2 or not x3)\"");
  cmd->add_option("--true-label", c.hypothesis.true_label, "class predicted when the rule holds");
  cmd->add_option("--false-label", c.hypothesis.false_label, "class predicted otherwise");
  cmd->add_option("--max-depth", c.hypothesis.max_depth, "tree depth")->capture_default_str();
  cmd->add_option("--hypothesis-path", c.hypothesis.path, "prediction-map CSV or hypothesis JSON");
  cmd->add_option("--default-label", c.hypothesis.default_label,
                  "prediction-map class for unlisted cells");
  cmd->add_option("--cost-matrix", c.loss.cost_matrix_path,
                  "cost matrix CSV/JSON (misclassification when absent)");
  cmd->add_option("--factorization", a.factorization)
      ->check(CLI::IsMember({"two-player", "per-feature"}))
      ->capture_default_str();
  cmd->add_option("--estimator", a.estimator)
      ->check(CLI::IsMember({"auto", "exact", "two-player", "monte-carlo"}))
      ->capture_default_str();
  cmd->add_option("--permutations", c.estimator.n_permutations, "Monte-Carlo permutations")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.estimator.seed, "Monte-Carlo seed")->capture_default_str();
  cmd->add_option("--exact-limit", c.estimator.exact_k_limit, "largest k for exact enumeration")
      ->capture_default_str();
  cmd->add_option("--threads", c.estimator.threads)->capture_default_str();
  cmd->add_option("--smoothing", c.smoothing, "Laplace pseudo-count")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--risk-method", a.risk_method)
      ->check(CLI::IsMember({"auto", "enumerate", "sampled"}))
      ->capture_default_str();
  cmd->add_option("--cell-budget", c.risk.cell_budget)->capture_default_str();
  cmd->add_option("--risk-samples", c.risk.samples)->capture_default_str();
  cmd->add_option("--output,-o", c.output_path,
                  std::string("report JSON path (default: $") + kOutputDirEnv +
                      "/report.json, else stdout)");
  cmd->add_flag("--text", a.print_text, "print the text rendering to stdout");
}

int RunAttributeCommand(AttributeArgs& a) {
  auto& c = a.config;
  try {
    if (!a.schema_path.empty()) {
      std::ifstream in(a.schema_path);
      if (!in) throw Error(ErrorCode::kIo, "cannot open schema '" + a.schema_path + "'");
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kParse, std::string("schema: ") + e.what());
      }
      c.schema = driftshap::SchemaFromJson(doc);
    }
    c.default_binning.strategy = driftshap::ParseBinStrategy(a.bin_strategy);
    c.default_binning.out_of_range = a.out_of_range == "clamp"
                                         ? driftshap::OutOfRangePolicy::kClamp
                                         : driftshap::OutOfRangePolicy::kReject;
    c.unknown_category = a.unknown_category == "other" ? driftshap::UnknownCategoryPolicy::kOther
                                                       : driftshap::UnknownCategoryPolicy::kReject;
    std::string kind = a.hypothesis;
    if (kind.empty()) kind = c.hypothesis.rule.empty() ? "tree" : "rule";
    const std::map<std::string, driftshap::HypothesisKind> kinds = {
        {"rule", driftshap::HypothesisKind::kRule},
        {"tree", driftshap::HypothesisKind::kTree},
        {"prediction-map", driftshap::HypothesisKind::kPredictionMap},
        {"json", driftshap::HypothesisKind::kJson}};
    c.hypothesis.kind = kinds.at(kind);
    if (kind == "rule" && c.hypothesis.rule.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "--hypothesis rule needs --rule");
    }
    if ((kind == "prediction-map" || kind == "json") && c.hypothesis.path.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "--hypothesis " + kind + " needs --hypothesis-path");
    }
    c.factorization = a.factorization == "two-player" ? driftshap::PlanKind::kTwoPlayer
                                                      : driftshap::PlanKind::kPerFeature;
    const std::map<std::string, driftshap::EstimatorChoice> estimators = {
        {"auto", driftshap::EstimatorChoice::kAuto},
        {"exact", driftshap::EstimatorChoice::kExact},
        {"two-player", driftshap::EstimatorChoice::kTwoPlayer},
        {"monte-carlo", driftshap::EstimatorChoice::kMonteCarlo}};
    c.estimator.choice = estimators.at(a.estimator);
    const std::map<std::string, driftshap::RiskMethod> methods = {
        {"auto", driftshap::RiskMethod::kAuto},
        {"enumerate", driftshap::RiskMethod::kEnumerate},
        {"sampled", driftshap::RiskMethod::kSampled}};
    c.risk.method = methods.at(a.risk_method);
    c.risk.seed = c.estimator.seed;
  } catch (const Error& e) {
    throw driftshap::PipelineError(Stage::kConfig, e);
  }

  std::string output = c.output_path;
  if (output.empty() && !DefaultOutputDir().empty()) {
    output = (std::filesystem::path(DefaultOutputDir()) / "report.json").string();
  }
  const driftshap::ReportDocument doc = driftshap::RunAttribute(c);
  driftshap::WriteReport(doc, output);
  if (a.print_text) std::cout << driftshap::RenderText(doc);
  return 0;
}

struct GenerateArgs {
  std::string family;
  std::vector<double> concepts;
  std::size_t rows = 1000;
  std::uint64_t seed = 0;
  double noise = 0.0;
  std::string perturb;
  std::vector<double> mult = {0.0, 2.0};
  std::vector<double> reweight;
  std::size_t features = 10;
  std::size_t centroids = 50;
  int classes = 2;
  std::string out_dir;
};

void AddGenerate(CLI::App& app, GenerateArgs& g) {
  auto* cmd = app.add_subcommand("generate", "write a synthetic baseline/target pair");
  cmd->add_option("--family", g.family)
      ->required()
      ->check(CLI::IsMember({"stagger", "sea", "sine", "circle", "rbf"}));
  cmd->add_option("--concepts", g.concepts,
                  "baseline[,target] concept ids (default: 8 for sea, else 1)")
      ->delimiter(',')
      ->expected(1, 2);
  cmd->add_option("--rows", g.rows, "rows per population")->capture_default_str();
  cmd->add_option("--seed", g.seed)->capture_default_str();
  cmd->add_option("--noise", g.noise, "label flip probability")->capture_default_str();
  cmd->add_option("--perturb", g.perturb, "target feature to perturb");
  cmd->add_option("--mult", g.mult, "uniform multiplier bounds low,high")
      ->delimiter(',')
      ->expected(2)
      ->capture_default_str();
  cmd->add_option("--reweight", g.reweight, "category weights for a categorical --perturb")
      ->delimiter(',');
  cmd->add_option("--features", g.features, "rbf feature count")->capture_default_str();
  cmd->add_option("--centroids", g.centroids, "rbf centroid count")->capture_default_str();
  cmd->add_option("--classes", g.classes, "rbf class count")->capture_default_str();
  cmd->add_option("--out-dir", g.out_dir,
                  std::string("output directory (default: $") + kOutputDirEnv + ", else .)");
}

int RunGenerateCommand(const GenerateArgs& g) {
  driftshap::DriftScenario scenario;
  auto& b = scenario.baseline;
  b.family = driftshap::ParseFamily(g.family);
  b.concept_id = g.concepts.empty() ? (b.family == driftshap::Family::kSea ? 8 : 1)
                                    : g.concepts[0];
  b.n_rows = g.rows;
  b.seed = driftshap::DeriveSeed(g.seed, 0);
  b.noise_rate = g.noise;
  b.n_features = g.features;
  b.n_centroids = g.centroids;
  b.n_classes = g.classes;
  scenario.target = b;
  scenario.target.seed = driftshap::DeriveSeed(g.seed, 1);
  if (g.concepts.size() > 1) scenario.target.concept_id = g.concepts[1];
  if (!g.perturb.empty()) {
    const std::uint64_t seed = driftshap::DeriveSeed(g.seed, 2);
    if (!g.reweight.empty()) {
      scenario.perturbation = driftshap::CategoryReweight{g.perturb, g.reweight, seed};
    } else {
      scenario.perturbation = driftshap::UniformMultiplier{g.perturb, g.mult[0], g.mult[1], seed};
    }
  }
  const driftshap::ScenarioData data = driftshap::ApplyScenario(scenario);

  const auto dir = OutputDir(g.out_dir);
  std::filesystem::create_directories(dir);
  driftshap::WriteCsvFile(data.baseline.table, dir / "baseline.csv");
  driftshap::WriteCsvFile(data.target.table, dir / "target.csv");
  const nlohmann::json manifest = {
      {"tool", {{"name", driftshap::kToolName}, {"version", driftshap::kToolVersion}}},
      {"scenario", driftshap::ScenarioToJson(scenario)},
      {"seed", g.seed},
      {"schema", driftshap::SchemaToJson(data.baseline.draft)},
      {"files", {{"baseline", "baseline.csv"}, {"target", "target.csv"}}}};
  WriteText(dir / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "wrote " << (dir / "baseline.csv").string() << ", "
            << (dir / "target.csv").string() << ", " << (dir / "manifest.json").string() << "\n";
  return 0;
}

struct BenchArgs {
  std::string suite = "toy";
  std::vector<std::string> families;
  std::vector<std::string> scenarios;
  std::string feature;
  std::size_t seeds = 10;
  std::size_t rows = 10000;
  double noise = 0.05;
  int threads = 1;
  std::string out_dir;
  std::string plot_dir;
};

void AddBench(CLI::App& app, BenchArgs& b) {
  auto* cmd = app.add_subcommand("bench", "run the toy or synthetic benchmark suite");
  cmd->add_option("--suite", b.suite)
      ->check(CLI::IsMember({"toy", "synthetic"}))
      ->capture_default_str();
  cmd->add_option("--family", b.families, "synthetic families (default: all four)")
      ->delimiter(',')
      ->check(CLI::IsMember({"stagger", "sea", "sine", "circle"}));
  cmd->add_option("--scenario", b.scenarios, "concept-change and/or feature-perturb")
      ->delimiter(',')
      ->check(CLI::IsMember({"concept-change", "feature-perturb"}));
  cmd->add_option("--feature", b.feature, "perturbed feature override");
  cmd->add_option("--seeds", b.seeds, "seeds 1..N per scenario")->capture_default_str();
  cmd->add_option("--rows", b.rows, "rows per population")->capture_default_str();
  cmd->add_option("--noise", b.noise, "label flip probability")->capture_default_str();
  cmd->add_option("--threads", b.threads)->capture_default_str();
  cmd->add_option("--out-dir", b.out_dir, "write results JSON and text table here");
  cmd->add_option("--plot-dir", b.plot_dir, "write player,phi CSVs per scenario here");
}

int RunBenchCommand(const BenchArgs& b) {
  std::string out_dir = b.out_dir.empty() ? DefaultOutputDir() : b.out_dir;
  if (b.suite == "toy") {
    const auto rows = driftshap::RunToySuite();
    const std::string table = driftshap::RenderToyTable(rows);
    std::cout << table;
    if (!out_dir.empty()) {
      WriteText(std::filesystem::path(out_dir) / "bench_toy.json",
                driftshap::ToyResultsToJson(rows).dump(2) + "\n");
      WriteText(std::filesystem::path(out_dir) / "bench_toy.txt", table);
    }
    if (!b.plot_dir.empty()) {
      for (const auto& row : rows) {
        driftshap::WritePlotData(
            row.report.report,
            (std::filesystem::path(b.plot_dir) /
             ("toy_" + std::string(driftshap::ToyScenarioName(row.scenario)) + ".csv"))
                .string());
      }
    }
    for (const auto& row : rows) {
      if (!row.pass) return driftshap::ExitCodeFor(Stage::kBench);
    }
    return 0;
  }

  driftshap::SyntheticOptions options;
  if (!b.families.empty()) {
    options.families.clear();
    for (const auto& f : b.families) options.families.push_back(driftshap::ParseFamily(f));
  }
  if (!b.scenarios.empty()) {
    options.scenarios.clear();
    for (const auto& s : b.scenarios) {
      options.scenarios.push_back(driftshap::ParseSyntheticScenario(s));
    }
  }
  options.seeds.clear();
  for (std::size_t s = 1; s <= b.seeds; ++s) options.seeds.push_back(s);
  options.n_rows = b.rows;
  options.noise_rate = b.noise;
  options.feature = b.feature;
  options.threads = b.threads;
  const auto result = driftshap::RunSyntheticSuite(options);
  const std::string table = driftshap::RenderSyntheticTable(result);
  std::cout << table;
  if (!out_dir.empty()) {
    WriteText(std::filesystem::path(out_dir) / "bench_synthetic.json",
              driftshap::SyntheticResultToJson(result).dump(2) + "\n");
    WriteText(std::filesystem::path(out_dir) / "bench_synthetic.txt", table);
  }
  if (!b.plot_dir.empty()) {
    for (const auto& run : result.runs) {
      const std::string name = std::string(driftshap::FamilyName(run.family)) + "_" +
                               std::string(driftshap::SyntheticScenarioName(run.scenario)) +
                               "_seed" + std::to_string(run.seed) + ".csv";
      driftshap::WritePlotData(run.report.report,
                               (std::filesystem::path(b.plot_dir) / name).string());
    }
  }
  return result.ok() ? 0 : driftshap::ExitCodeFor(Stage::kBench);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attribute model risk changes to real and virtual drift", "driftshap"};
  app.set_version_flag("--version", std::string(driftshap::kToolVersion));
  app.set_config("--config", "", "TOML/INI configuration file");
  app.require_subcommand(1);

  AttributeArgs attribute;
  GenerateArgs generate;
  BenchArgs bench;
  AddAttribute(app, attribute);
  AddGenerate(app, generate);
  AddBench(app, bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : driftshap::ExitCodeFor(Stage::kConfig);
  }

  Stage context = Stage::kOther;
  try {
    if (app.got_subcommand("attribute")) return RunAttributeCommand(attribute);
    if (app.got_subcommand("generate")) {
      context = Stage::kScenario;
      return RunGenerateCommand(generate);
    }
    context = Stage::kConfig;
    return RunBenchCommand(bench);
  } catch (const driftshap::PipelineError& e) {
    std::cerr << "driftshap: " << e.what() << "\n";
    return driftshap::ExitCodeFor(e.stage());
  } catch (const Error& e) {
    std::cerr << "driftshap: " << e.what() << "\n";
    if (e.code() == ErrorCode::kIo) return 1;
    return driftshap::ExitCodeFor(driftshap::StageOf(e, context));
  } catch (const std::exception& e) {
    std::cerr << "driftshap: " << e.what() << "\n";
    return 1;
  }
}
