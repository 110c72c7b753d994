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

#ifndef DRIFTSHAP_RISK_H_
#define DRIFTSHAP_RISK_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "driftshap/distributions.h"
#include "driftshap/hypothesis.h"

namespace driftshap {

enum class RiskMethod {
  // Joint inputs: exact sum over the support. Factored inputs: exact
  // decomposition over the conditional table's cells plus the hypothesis'
  // prediction distribution (no product-domain enumeration).
  kAuto,
  // Factored inputs: brute-force sum over the full product domain when it
  // fits `cell_budget`, otherwise sampling (or kEnumerationOverflow).
  kEnumerate,
  // Factored inputs: Monte-Carlo estimate.
  kSampled,
};

enum class RiskRoute { kJointSupport, kDecomposed, kEnumerated, kSampled };

std::string_view RiskRouteName(RiskRoute route);

struct RiskConfig {
  RiskMethod method = RiskMethod::kAuto;
  std::uint64_t cell_budget = 1'000'000;
  bool sampling_fallback = true;
  std::size_t samples = 100'000;
  std::uint64_t seed = 0;
};

struct RiskValue {
  double value = 0.0;
  // Probability mass of the input distribution covered by the evaluation.
  double support_mass = 1.0;
  // Mass on cells whose conditional came from the class-prior fallback.
  double fallback_mass = 0.0;
  // Set only for sampled estimates.
  std::optional<double> standard_error;
  RiskRoute route = RiskRoute::kJointSupport;
};

// R(q) = sum_x P(x) sum_y L(q(x), y) P(y | x).
RiskValue EvaluateRisk(const Hypothesis& q, const LossFunction& loss,
                       const ConditionalTable& conditional,
                       const InputDistribution& input, const RiskConfig& config = {});

RiskValue EvaluateRiskDecomposed(const Hypothesis& q, const LossFunction& loss,
                                 const ConditionalTable& conditional,
                                 const FactoredInput& input);

// Throws kEnumerationOverflow when the product domain exceeds `cell_budget`.
RiskValue EvaluateRiskEnumerated(const Hypothesis& q, const LossFunction& loss,
                                 const ConditionalTable& conditional,
                                 const FactoredInput& input, std::uint64_t cell_budget);

// Draws x feature-by-feature from the marginals and averages the expected
// loss under P(y | x). Bit-identical for a fixed seed.
RiskValue EvaluateRiskSampled(const Hypothesis& q, const LossFunction& loss,
                              const ConditionalTable& conditional,
                              const InputDistribution& input, std::size_t n_samples,
                              std::uint64_t seed);

// Decomposed risk under a factored hybrid that changes one component at a
// time. Each feature switch costs O(cells) instead of O(cells * features).
class FactoredRiskWalker {
 public:
  FactoredRiskWalker(const Hypothesis& q, const LossFunction& loss,
                     const ConditionalTable& base_conditional,
                     const ConditionalTable& target_conditional,
                     const FactoredInput& base_input, const FactoredInput& target_input);

  void Reset(bool target_conditional, const std::vector<std::uint8_t>& target_features);
  void SetConditional(bool target);
  void SetFeature(std::size_t feature, bool target);

  double Value() const;
  double FallbackMass() const;

 private:
  struct TableTerms {
    const ConditionalTable* table;
    std::vector<double> expected_loss;  // sum_y L(q(c), y) P(y | c)
    std::vector<int> prediction;        // q(c)
    std::vector<double> prior_loss;     // sum_y L(a, y) prior(y), per class a
    std::vector<std::vector<std::int32_t>> columns;  // columns[f][i] = cell i, feature f
  };

  void RebuildProducts();
  void Recompute();

  const Hypothesis& q_;
  int num_classes_;
  TableTerms terms_[2];
  const FactoredInput* inputs_[2];
  bool conditional_ = false;
  std::vector<std::uint8_t> features_;
  std::vector<std::vector<double>> current_;
  std::vector<double> product_;
  std::vector<int> zeros_;
  double value_ = 0.0;
  double fallback_ = 0.0;
  // State with every component at the baseline, restored by Reset.
  std::vector<double> start_product_;
  std::vector<int> start_zeros_;
  double start_value_ = 0.0;
  double start_fallback_ = 0.0;
};

}  // namespace driftshap

#endif  // DRIFTSHAP_RISK_H_
