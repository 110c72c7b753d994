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

#ifndef DRIFTSHAP_PIPELINE_H_
#define DRIFTSHAP_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "driftshap/csv.h"
#include "driftshap/error.h"
#include "driftshap/schema.h"
#include "driftshap/shapley.h"
#include "json.hpp"

namespace driftshap {

inline constexpr std::string_view kToolName = "driftshap";
inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

// Where a failure happened; the CLI turns this into its exit code.
enum class Stage { kConfig, kIngest, kSchema, kEstimator, kScenario, kBench, kOther };

int ExitCodeFor(Stage stage);

class PipelineError : public Error {
 public:
  PipelineError(Stage stage, const Error& cause)
      : Error(cause.code(), StripPrefix(cause)), stage_(stage) {}
  Stage stage() const { return stage_; }

 private:
  static std::string StripPrefix(const Error& e);
  Stage stage_;
};

// Stage of an error raised while `context` was running. Schema, estimator
// and scenario errors keep their own stage wherever they occur.
Stage StageOf(const std::exception& e, Stage context);

enum class HypothesisKind { kRule, kTree, kPredictionMap, kJson };

struct HypothesisConfig {
  HypothesisKind kind = HypothesisKind::kTree;
  std::string rule;
  // Class labels predicted when the rule holds / fails. Empty means class
  // index 1 / 0.
  std::string true_label;
  std::string false_label;
  int max_depth = 3;
  // Prediction-map CSV (feature columns plus `prediction`) or hypothesis JSON.
  std::string path;
  // Map prediction for cells absent from the file; empty means class 0.
  std::string default_label;
};

struct LossConfig {
  // Empty: misclassification. Otherwise a cost matrix as JSON or CSV.
  std::string cost_matrix_path;
};

enum class PlanKind { kTwoPlayer, kPerFeature };
enum class EstimatorChoice { kAuto, kExact, kTwoPlayer, kMonteCarlo };

std::string_view PlanKindName(PlanKind kind);
std::string_view EstimatorChoiceName(EstimatorChoice choice);

struct EstimatorConfig {
  EstimatorChoice choice = EstimatorChoice::kAuto;
  std::size_t n_permutations = 1000;
  std::uint64_t seed = 0;
  std::size_t exact_k_limit = kDefaultExactLimit;
  int threads = 1;
};

struct RunConfig {
  std::string baseline_path;
  std::string target_path;
  // Explicit schema; inferred from the data when absent.
  std::optional<FeatureSchema> schema;
  std::string label_column = "y";
  std::vector<std::string> categorical;
  BinSpec default_binning;
  UnknownCategoryPolicy unknown_category = UnknownCategoryPolicy::kReject;
  HypothesisConfig hypothesis;
  LossConfig loss;
  PlanKind factorization = PlanKind::kTwoPlayer;
  EstimatorConfig estimator;
  double smoothing = 0.0;
  RiskConfig risk;
  std::string output_path;
};

// Every field that affects the result; the output path is left out so the
// same run written to two places hashes identically.
nlohmann::json RunConfigToJson(const RunConfig& config);
std::string ConfigHash(const nlohmann::json& config);

struct Provenance {
  std::string config_hash;
  nlohmann::json config;
  std::size_t baseline_rows = 0;
  std::size_t target_rows = 0;
  double baseline_weight = 0.0;
  double target_weight = 0.0;
  // Fitted schema including frozen bin edges.
  nlohmann::json schema;
  std::vector<std::string> warnings;
  // Excluded from the config hash. Honours SOURCE_DATE_EPOCH.
  std::string timestamp;
  std::string tool_version = std::string(kToolVersion);
};

struct ReportDocument {
  AttributionReport report;
  nlohmann::json hypothesis;
  nlohmann::json loss;
  PlanKind factorization = PlanKind::kTwoPlayer;
  Provenance provenance;
};

nlohmann::json ReportDocumentToJson(const ReportDocument& doc);
ReportDocument ReportDocumentFromJson(const nlohmann::json& doc);
std::string RenderText(const ReportDocument& doc);

// Reads both CSVs and runs AttributeTables. Errors are PipelineErrors.
ReportDocument RunAttribute(const RunConfig& config);

// Fit bins on the baseline, encode both populations, estimate the
// distributions, build the hypothesis and loss, then run the estimator.
ReportDocument AttributeTables(const RawTable& baseline, const RawTable& target,
                               const RunConfig& config);

// Writes `doc` as JSON to config.output_path (stdout when empty) and the
// text rendering next to it with a .txt suffix.
void WriteReport(const ReportDocument& doc, const std::string& output_path);

std::string CurrentTimestamp();

}  // namespace driftshap

#endif  // DRIFTSHAP_PIPELINE_H_
