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

#include "driftshap/pipeline.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "driftshap/distributions.h"
#include "driftshap/hypothesis.h"
#include "driftshap/numeric.h"

namespace driftshap {
namespace {

using nlohmann::json;

template <typename Fn>
auto Staged(Stage stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    throw PipelineError(StageOf(e, stage), e);
  }
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json ReadJsonFile(const std::string& path) {
  const std::string text = ReadText(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, "'" + path + "': " + e.what());
  }
}

int ClassOf(const FeatureSchema& schema, const std::string& label, int fallback) {
  if (label.empty()) return fallback;
  const auto index = schema.ClassIndex(label);
  if (!index) throw Error(ErrorCode::kSchemaMismatch, "unknown class label '" + label + "'");
  return *index;
}

Hypothesis LoadPredictionMap(const std::string& path, const FeatureSchema& schema,
                             const std::string& default_label) {
  const RawTable table = ReadCsv(path);
  const std::size_t column = table.ColumnIndex("prediction");
  const auto cells = EncodeCells(table, schema);
  PredictionMap map;
  map.default_class = ClassOf(schema, default_label, 0);
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    const int label = ClassOf(schema, table.rows[r][column], 0);
    const auto [it, inserted] = map.entries.emplace(cells[r], label);
    if (!inserted && it->second != label) {
      throw Error(ErrorCode::kParse, "prediction map assigns two classes to cell " +
                                         CellKey(cells[r]));
    }
  }
  return Hypothesis::Map(std::move(map));
}

Hypothesis BuildHypothesis(const HypothesisConfig& config, const FeatureSchema& schema,
                           const BinnedDataset& baseline) {
  switch (config.kind) {
    case HypothesisKind::kRule:
      return Hypothesis::Rule(ParseRule(config.rule, schema), ClassOf(schema, config.true_label, 1),
                              ClassOf(schema, config.false_label, 0));
    case HypothesisKind::kTree:
      return Hypothesis::Tree(TrainTree(baseline, config.max_depth));
    case HypothesisKind::kPredictionMap:
      return LoadPredictionMap(config.path, schema, config.default_label);
    case HypothesisKind::kJson:
      return Hypothesis::FromJson(ReadJsonFile(config.path), schema);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown hypothesis kind");
}

// CSV layout: header `actual,<class>,<class>,...`, then one row per actual
// class starting with its label.
LossFunction LoadCostMatrix(const std::string& path, const FeatureSchema& schema) {
  if (std::filesystem::path(path).extension() == ".json") {
    return LossFunction::FromJson(ReadJsonFile(path));
  }
  const RawTable table = ReadCsv(path);
  const std::size_t n = static_cast<std::size_t>(schema.num_classes());
  if (table.columns.size() != n + 1 || table.num_rows() != n) {
    throw Error(ErrorCode::kSchemaMismatch,
                "cost matrix must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  std::vector<int> predicted(n);
  for (std::size_t j = 0; j < n; ++j) predicted[j] = ClassOf(schema, table.columns[j + 1], 0);
  std::vector<std::vector<double>> costs(n, std::vector<double>(n, 0.0));
  std::vector<bool> seen(n, false);
  for (const auto& row : table.rows) {
    const int actual = ClassOf(schema, row[0], 0);
    if (seen[actual]) throw Error(ErrorCode::kParse, "duplicate cost row '" + row[0] + "'");
    seen[actual] = true;
    for (std::size_t j = 0; j < n; ++j) {
      double value;
      if (!ParseDouble(row[j + 1], &value)) {
        throw Error(ErrorCode::kParse, "cost '" + row[j + 1] + "' is not a number");
      }
      costs[actual][predicted[j]] = value;
    }
  }
  return LossFunction::CostMatrix(std::move(costs));
}

json HypothesisConfigToJson(const HypothesisConfig& h) {
  switch (h.kind) {
    case HypothesisKind::kRule:
      return {{"kind", "rule"},
              {"rule", h.rule},
              {"true_label", h.true_label},
              {"false_label", h.false_label}};
    case HypothesisKind::kTree:
      return {{"kind", "tree"}, {"max_depth", h.max_depth}};
    case HypothesisKind::kPredictionMap:
      return {{"kind", "prediction-map"}, {"path", h.path}, {"default_label", h.default_label}};
    case HypothesisKind::kJson:
      return {{"kind", "json"}, {"path", h.path}};
  }
  return {};
}

std::string_view RiskMethodName(RiskMethod m) {
  switch (m) {
    case RiskMethod::kAuto:
      return "auto";
    case RiskMethod::kEnumerate:
      return "enumerate";
    case RiskMethod::kSampled:
      return "sampled";
  }
  return "auto";
}

PlanKind ParsePlanKind(const std::string& name) {
  if (name == "two-player") return PlanKind::kTwoPlayer;
  if (name == "per-feature") return PlanKind::kPerFeature;
  throw Error(ErrorCode::kParse, "unknown factorization '" + name + "'");
}

}  // namespace

int ExitCodeFor(Stage stage) {
  switch (stage) {
    case Stage::kConfig:
      return 2;
    case Stage::kIngest:
      return 3;
    case Stage::kSchema:
      return 4;
    case Stage::kEstimator:
      return 5;
    case Stage::kScenario:
      return 6;
    case Stage::kBench:
      return 7;
    case Stage::kOther:
      return 1;
  }
  return 1;
}

std::string PipelineError::StripPrefix(const Error& e) {
  const std::string what = e.what();
  const std::string prefix = std::string(ErrorCodeName(e.code())) + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

Stage StageOf(const std::exception& e, Stage context) {
  if (const auto* p = dynamic_cast<const PipelineError*>(&e)) return p->stage();
  const auto* error = dynamic_cast<const Error*>(&e);
  if (error == nullptr) return context;
  switch (error->code()) {
    case ErrorCode::kSchemaMismatch:
      return Stage::kSchema;
    case ErrorCode::kPlanMismatch:
    case ErrorCode::kEnumerationOverflow:
    case ErrorCode::kTooManyPlayers:
      return Stage::kEstimator;
    case ErrorCode::kInvalidConcept:
    case ErrorCode::kPerturbCategorical:
      return Stage::kScenario;
    default:
      return context;
  }
}

std::string_view PlanKindName(PlanKind kind) {
  return kind == PlanKind::kTwoPlayer ? "two-player" : "per-feature";
}

std::string_view EstimatorChoiceName(EstimatorChoice choice) {
  switch (choice) {
    case EstimatorChoice::kAuto:
      return "auto";
    case EstimatorChoice::kExact:
      return "exact";
    case EstimatorChoice::kTwoPlayer:
      return "two-player";
    case EstimatorChoice::kMonteCarlo:
      return "monte-carlo";
  }
  return "auto";
}

json RunConfigToJson(const RunConfig& c) {
  json doc;
  doc["baseline_path"] = c.baseline_path;
  doc["target_path"] = c.target_path;
  doc["schema"] = c.schema ? SchemaToJson(*c.schema) : json(nullptr);
  doc["label_column"] = c.label_column;
  doc["categorical"] = c.categorical;
  doc["default_binning"] = BinSpecToJson(c.default_binning);
  doc["unknown_category"] =
      c.unknown_category == UnknownCategoryPolicy::kOther ? "other" : "reject";
  doc["hypothesis"] = HypothesisConfigToJson(c.hypothesis);
  doc["loss"] = c.loss.cost_matrix_path.empty()
                    ? json{{"kind", "misclassification"}}
                    : json{{"kind", "cost-matrix"}, {"path", c.loss.cost_matrix_path}};
  doc["factorization"] = PlanKindName(c.factorization);
  doc["estimator"] = {{"choice", EstimatorChoiceName(c.estimator.choice)},
                      {"n_permutations", c.estimator.n_permutations},
                      {"seed", c.estimator.seed},
                      {"exact_k_limit", c.estimator.exact_k_limit}};
  doc["smoothing"] = c.smoothing;
  doc["risk"] = {{"method", RiskMethodName(c.risk.method)},
                 {"cell_budget", c.risk.cell_budget},
                 {"sampling_fallback", c.risk.sampling_fallback},
                 {"samples", c.risk.samples},
                 {"seed", c.risk.seed}};
  return doc;
}

std::string ConfigHash(const json& config) {
  // 64-bit FNV-1a over the canonical (sorted-key) dump.
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config.dump()) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  static const char* kHex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = kHex[hash & 0xf];
    hash >>= 4;
  }
  return out;
}

std::string CurrentTimestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long value = std::strtoll(epoch, &end, 10);
    if (end != epoch && *end == '\0') now = static_cast<std::time_t>(value);
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

ReportDocument AttributeTables(const RawTable& baseline_raw, const RawTable& target_raw,
                               const RunConfig& config) {
  FeatureSchema draft = Staged(Stage::kIngest, [&] {
    if (config.schema) return *config.schema;
    InferOptions options;
    options.categorical = config.categorical;
    options.default_binning = config.default_binning;
    options.unknown_category = config.unknown_category;
    return InferSchema(baseline_raw, &target_raw, config.label_column, options);
  });
  FitResult fitted = Staged(Stage::kIngest, [&] { return FitBins(baseline_raw, draft); });
  auto schema = std::make_shared<const FeatureSchema>(std::move(fitted.schema));

  const BinnedDataset baseline = Staged(
      Stage::kIngest, [&] { return Encode(baseline_raw, schema, PopulationTag::kBaseline); });
  const BinnedDataset target = Staged(
      Stage::kIngest, [&] { return Encode(target_raw, schema, PopulationTag::kTarget); });

  const std::size_t d = schema->num_features();
  const FactorizationPlan plan = config.factorization == PlanKind::kTwoPlayer
                                     ? FactorizationPlan::TwoPlayer(d)
                                     : FactorizationPlan::PerFeature(d);

  Hypothesis q = Staged(Stage::kConfig,
                        [&] { return BuildHypothesis(config.hypothesis, *schema, baseline); });
  LossFunction loss = Staged(Stage::kConfig, [&] {
    return config.loss.cost_matrix_path.empty()
               ? LossFunction::Misclassification(schema->num_classes())
               : LoadCostMatrix(config.loss.cost_matrix_path, *schema);
  });

  ReportDocument doc;
  doc.report = Staged(Stage::kEstimator, [&] {
    PopulationDistributions base = EstimatePopulation(baseline, plan, config.smoothing);
    PopulationDistributions targ = EstimatePopulation(target, plan, config.smoothing);
    base.conditional.SetCoverage(PopulationTag::kTarget, base.conditional.CoverageOf(target));
    targ.conditional.SetCoverage(PopulationTag::kBaseline, targ.conditional.CoverageOf(baseline));
    const DistributionValueFunction f(schema, q, loss, std::move(base), std::move(targ), plan,
                                      config.risk);
    const EstimatorConfig& est = config.estimator;
    switch (est.choice) {
      case EstimatorChoice::kAuto:
        if (f.k() <= est.exact_k_limit) return ShapleyExact(f, est.exact_k_limit, est.threads);
        return ShapleyMonteCarlo(f, est.n_permutations, est.seed, est.threads);
      case EstimatorChoice::kExact:
        return ShapleyExact(f, est.exact_k_limit, est.threads);
      case EstimatorChoice::kTwoPlayer:
        return ShapleyTwoPlayer(f);
      case EstimatorChoice::kMonteCarlo:
        break;
    }
    return ShapleyMonteCarlo(f, est.n_permutations, est.seed, est.threads);
  });

  doc.hypothesis = q.ToJson(*schema);
  doc.loss = loss.ToJson();
  doc.factorization = config.factorization;
  Provenance& p = doc.provenance;
  p.config = RunConfigToJson(config);
  p.config_hash = ConfigHash(p.config);
  p.baseline_rows = baseline.num_rows();
  p.target_rows = target.num_rows();
  p.baseline_weight = baseline.TotalWeight();
  p.target_weight = target.TotalWeight();
  p.schema = SchemaToJson(*schema);
  p.warnings = fitted.warnings;
  p.timestamp = CurrentTimestamp();
  return doc;
}

ReportDocument RunAttribute(const RunConfig& config) {
  const RawTable baseline = Staged(Stage::kIngest, [&] { return ReadCsv(config.baseline_path); });
  const RawTable target = Staged(Stage::kIngest, [&] { return ReadCsv(config.target_path); });
  return AttributeTables(baseline, target, config);
}

json ReportDocumentToJson(const ReportDocument& doc) {
  const Provenance& p = doc.provenance;
  json provenance = {{"config", p.config},
                     {"config_hash", p.config_hash},
                     {"rows", {{"baseline", p.baseline_rows}, {"target", p.target_rows}}},
                     {"total_weight", {{"baseline", p.baseline_weight}, {"target", p.target_weight}}},
                     {"schema", p.schema},
                     {"warnings", p.warnings},
                     {"timestamp", p.timestamp},
                     {"tool", {{"name", kToolName}, {"version", p.tool_version}}}};
  return {{"schema_version", kReportSchemaVersion},
          {"attribution", ReportToJson(doc.report)},
          {"hypothesis", doc.hypothesis},
          {"loss", doc.loss},
          {"factorization", PlanKindName(doc.factorization)},
          {"provenance", provenance}};
}

ReportDocument ReportDocumentFromJson(const json& j) {
  try {
    if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
      throw Error(ErrorCode::kParse, "unsupported report schema_version");
    }
    ReportDocument doc;
    doc.report = ReportFromJson(j.at("attribution"));
    doc.hypothesis = j.at("hypothesis");
    doc.loss = j.at("loss");
    doc.factorization = ParsePlanKind(j.at("factorization").get<std::string>());
    const json& p = j.at("provenance");
    doc.provenance.config = p.at("config");
    doc.provenance.config_hash = p.at("config_hash").get<std::string>();
    doc.provenance.baseline_rows = p.at("rows").at("baseline").get<std::size_t>();
    doc.provenance.target_rows = p.at("rows").at("target").get<std::size_t>();
    doc.provenance.baseline_weight = p.at("total_weight").at("baseline").get<double>();
    doc.provenance.target_weight = p.at("total_weight").at("target").get<double>();
    doc.provenance.schema = p.at("schema");
    doc.provenance.warnings = p.at("warnings").get<std::vector<std::string>>();
    doc.provenance.timestamp = p.at("timestamp").get<std::string>();
    doc.provenance.tool_version = p.at("tool").at("version").get<std::string>();
    return doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("report document: ") + e.what());
  }
}

std::string RenderText(const ReportDocument& doc) {
  const AttributionReport& r = doc.report;
  std::ostringstream out;
  out << "estimator      " << EstimatorName(r.estimator.kind);
  if (r.estimator.kind == EstimatorKind::kMonteCarlo) {
    out << " (n=" << r.estimator.n_permutations << ", seed=" << r.estimator.seed << ")";
  }
  out << "\nfactorization  " << PlanKindName(doc.factorization) << "\n";
  out << "risk baseline  " << FormatDouble(r.risk_baseline.value) << "\n";
  out << "risk target    " << FormatDouble(r.risk_target.value) << "\n";
  out << "risk change    " << FormatDouble(r.risk_target.value - r.risk_baseline.value) << "\n";
  out << "residual       " << FormatDouble(r.efficiency_residual) << "\n";
  out << "fallback mass  " << FormatDouble(r.diagnostics.max_fallback_mass) << "\n\n";

  std::vector<const PlayerAttribution*> players;
  std::size_t width = 6;
  for (const auto& p : r.players) {
    players.push_back(&p);
    width = std::max(width, p.key.size());
  }
  std::stable_sort(players.begin(), players.end(), [](const auto* a, const auto* b) {
    return std::fabs(a->phi) > std::fabs(b->phi);
  });
  out << "player" << std::string(width - 6 + 2, ' ') << "phi";
  if (r.estimator.kind == EstimatorKind::kMonteCarlo) out << "  (stderr)";
  out << "\n";
  for (const auto* p : players) {
    out << p->key << std::string(width - p->key.size() + 2, ' ') << FormatDouble(p->phi);
    if (r.estimator.kind == EstimatorKind::kMonteCarlo) {
      out << "  (" << FormatDouble(p->standard_error) << ")";
    }
    out << "\n";
  }
  return out.str();
}

void WriteReport(const ReportDocument& doc, const std::string& output_path) {
  const std::string text = ReportDocumentToJson(doc).dump(2) + "\n";
  if (output_path.empty()) {
    std::cout << text;
    return;
  }
  const std::filesystem::path path(output_path);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream json_out(path, std::ios::binary);
  std::ofstream text_out(path.string() + ".txt", std::ios::binary);
  if (!json_out || !text_out) {
    throw Error(ErrorCode::kIo, "cannot write report '" + output_path + "'");
  }
  json_out << text;
  text_out << RenderText(doc);
}

}  // namespace driftshap
