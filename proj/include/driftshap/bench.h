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

#ifndef DRIFTSHAP_BENCH_H_
#define DRIFTSHAP_BENCH_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "driftshap/generators.h"
#include "driftshap/pipeline.h"
#include "json.hpp"

namespace driftshap {

// Three-bit toy populations with q = x1 and x2 and x3.
enum class ToyScenario { kRealDrift, kVirtualDrift, kCombined };

std::string_view ToyScenarioName(ToyScenario scenario);

// Exhaustively weighted 8-row tables (columns x1, x2, x3, y, __weight).
std::pair<RawTable, RawTable> ToyTables(ToyScenario scenario);
RunConfig ToyConfig(PlanKind factorization = PlanKind::kTwoPlayer);

struct ToyRow {
  ToyScenario scenario;
  ReportDocument report;
  double expected_risk_baseline;
  double expected_risk_target;
  double expected_phi_conditional;
  double expected_phi_input;
  bool pass;
};

inline constexpr double kToyTolerance = 1e-9;

std::vector<ToyRow> RunToySuite();

enum class SyntheticScenario { kConceptChange, kFeaturePerturb };

std::string_view SyntheticScenarioName(SyntheticScenario scenario);
SyntheticScenario ParseSyntheticScenario(std::string_view name);

struct SyntheticOptions {
  std::vector<Family> families = {Family::kStagger, Family::kSea, Family::kSine,
                                  Family::kCircle};
  std::vector<SyntheticScenario> scenarios = {SyntheticScenario::kConceptChange,
                                              SyntheticScenario::kFeaturePerturb};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::size_t n_rows = 10000;
  double noise_rate = 0.05;
  // Overrides the family's default perturbed feature when non-empty.
  std::string feature;
  // Fraction of seeds an assertion must hold on.
  double required_fraction = 0.9;
  int threads = 1;
};

// Default perturbed feature: size for stagger, x1 otherwise.
std::string DefaultPerturbedFeature(Family family);
// Concept pair used for concept change, e.g. sea 8 -> 9.
std::pair<double, double> ConceptPair(Family family);
int SyntheticTreeDepth(Family family);

// Baseline and target are the two halves of one seeded stream: they share
// the family and row count and draw from seed streams 0 and 1 of `seed`.
DriftScenario MakeSyntheticScenario(Family family, SyntheticScenario scenario,
                                    std::uint64_t seed, std::size_t n_rows, double noise_rate,
                                    const std::string& feature);

struct SyntheticRun {
  Family family;
  SyntheticScenario scenario;
  std::uint64_t seed;
  std::string feature;
  ReportDocument report;
};

struct SyntheticAssertion {
  Family family;
  std::string name;
  std::size_t passes = 0;
  std::size_t total = 0;
  bool ok = false;
};

struct SyntheticResult {
  std::vector<SyntheticRun> runs;
  std::vector<SyntheticAssertion> assertions;
  bool ok() const;
};

// Assertions per family:
//   real-dominates      concept change: |phi_conditional| > max_i |phi_i|
//   perturbed-is-top    feature perturbation: argmax_i |phi_i| is the feature
//   perturbed-grows     |phi_feature| is larger under perturbation than under
//                       concept change for the same seed
// Each needs the scenarios it compares.
SyntheticResult RunSyntheticSuite(const SyntheticOptions& options);

nlohmann::json ToyResultsToJson(const std::vector<ToyRow>& rows);
nlohmann::json SyntheticResultToJson(const SyntheticResult& result);
std::string RenderToyTable(const std::vector<ToyRow>& rows);
std::string RenderSyntheticTable(const SyntheticResult& result);

// player,phi CSV for external plotting.
void WritePlotData(const AttributionReport& report, const std::string& path);

}  // namespace driftshap

#endif  // DRIFTSHAP_BENCH_H_
