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

#ifndef DRIFTSHAP_SHAPLEY_H_
#define DRIFTSHAP_SHAPLEY_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "driftshap/distributions.h"
#include "driftshap/hypothesis.h"
#include "driftshap/risk.h"
#include "json.hpp"

namespace driftshap {

inline constexpr std::size_t kDefaultExactLimit = 12;

// f'(s): the risk of q under the hybrid distributions selected by s.
// Evaluations are memoized per assignment for the lifetime of the object and
// may be requested concurrently.
class DistributionValueFunction {
 public:
  DistributionValueFunction(std::shared_ptr<const FeatureSchema> schema, Hypothesis q,
                            LossFunction loss, PopulationDistributions base,
                            PopulationDistributions target, FactorizationPlan plan,
                            RiskConfig risk = {});

  std::size_t k() const { return plan_.k(); }
  const FactorizationPlan& plan() const { return plan_; }
  const FeatureSchema& schema() const { return *schema_; }
  const Hypothesis& hypothesis() const { return q_; }
  const LossFunction& loss() const { return loss_; }
  const PopulationDistributions& base() const { return base_; }
  const PopulationDistributions& target() const { return target_; }
  const RiskConfig& risk_config() const { return risk_; }

  RiskValue Evaluate(const SurrogateAssignment& s) const;
  double Value(const SurrogateAssignment& s) const { return Evaluate(s).value; }
  // Distinct assignments evaluated so far.
  std::size_t memo_size() const;

  // Incremental evaluator for permutation walks; null when the plan or risk
  // configuration does not allow one.
  std::unique_ptr<FactoredRiskWalker> MakeWalker() const;

  std::vector<std::string> PlayerKeys() const;

 private:
  std::shared_ptr<const FeatureSchema> schema_;
  Hypothesis q_;
  LossFunction loss_;
  PopulationDistributions base_;
  PopulationDistributions target_;
  FactorizationPlan plan_;
  RiskConfig risk_;

  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, RiskValue> memo_;
};

enum class EstimatorKind { kExact, kTwoPlayerClosedForm, kMonteCarlo };

std::string_view EstimatorName(EstimatorKind kind);

struct EstimatorInfo {
  EstimatorKind kind = EstimatorKind::kExact;
  std::size_t n_permutations = 0;
  std::uint64_t seed = 0;
};

struct PlayerAttribution {
  DistributionComponent component;
  std::string key;
  double phi = 0.0;
  double standard_error = 0.0;  // Monte-Carlo only
};

struct AttributionDiagnostics {
  // Largest prior-fallback mass over every evaluated coalition.
  double max_fallback_mass = 0.0;
  std::size_t evaluations = 0;
  // table ("baseline"/"target" conditional) -> population -> coverage
  std::map<std::string, std::map<std::string, double>> coverage;
};

struct AttributionReport {
  std::vector<PlayerAttribution> players;
  RiskValue risk_baseline;
  RiskValue risk_target;
  // (risk_target - risk_baseline) - sum(phi)
  double efficiency_residual = 0.0;
  EstimatorInfo estimator;
  AttributionDiagnostics diagnostics;

  // Throws kInvalidArgument for an unknown key.
  double Phi(std::string_view key) const;
  double SumPhi() const;
};

// Full subset enumeration, one evaluation per distinct assignment.
// Throws kTooManyPlayers when k exceeds `exact_k_limit`.
AttributionReport ShapleyExact(const DistributionValueFunction& f,
                               std::size_t exact_k_limit = kDefaultExactLimit,
                               int threads = 1);

// Closed form for k = 2; throws kPlanMismatch otherwise.
AttributionReport ShapleyTwoPlayer(const DistributionValueFunction& f);

// Uniform permutation sampling. Each permutation walks from all-zeros to
// all-ones and credits every player its marginal change, so the credits of a
// walk telescope to f'(1..1) - f'(0..0). Permutation p draws from its own
// seed stream, so results do not depend on `threads`.
AttributionReport ShapleyMonteCarlo(const DistributionValueFunction& f,
                                    std::size_t n_permutations, std::uint64_t seed,
                                    int threads = 1);

nlohmann::json RiskToJson(const RiskValue& risk);
nlohmann::json ReportToJson(const AttributionReport& report);
AttributionReport ReportFromJson(const nlohmann::json& doc);

}  // namespace driftshap

#endif  // DRIFTSHAP_SHAPLEY_H_
