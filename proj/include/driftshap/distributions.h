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

#ifndef DRIFTSHAP_DISTRIBUTIONS_H_
#define DRIFTSHAP_DISTRIBUTIONS_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "driftshap/schema.h"
#include "json.hpp"

namespace driftshap {

// Empirical P(y | cell) over the cells seen during estimation. Queries for
// unseen cells are answered by `prior()`.
class ConditionalTable {
 public:
  ConditionalTable() = default;
  // `probabilities` is row-major, one row of `prior.size()` entries per cell.
  // Cells are stored sorted, so iteration order depends only on content.
  ConditionalTable(std::vector<Cell> cells, std::vector<double> probabilities,
                   std::vector<double> prior);

  std::size_t num_cells() const { return cells_.size(); }
  int num_classes() const { return static_cast<int>(prior_.size()); }
  const std::vector<Cell>& cells() const { return cells_; }
  std::span<const double> row(std::size_t i) const {
    return {probabilities_.data() + i * prior_.size(), prior_.size()};
  }
  std::span<const double> prior() const { return prior_; }

  std::optional<std::size_t> Find(const Cell& cell) const;
  // P(. | cell), falling back to the prior; `used_prior` reports which.
  std::span<const double> Lookup(const Cell& cell, bool* used_prior = nullptr) const;

  // Weighted fraction of `data`'s rows whose cell has an entry.
  double CoverageOf(const BinnedDataset& data) const;
  const std::map<PopulationTag, double>& coverage() const { return coverage_; }
  void SetCoverage(PopulationTag tag, double fraction) { coverage_[tag] = fraction; }

  bool operator==(const ConditionalTable& other) const {
    return cells_ == other.cells_ && probabilities_ == other.probabilities_ &&
           prior_ == other.prior_;
  }

 private:
  std::vector<Cell> cells_;
  std::vector<double> probabilities_;
  std::vector<double> prior_;
  std::unordered_map<Cell, std::size_t, CellHash> index_;
  std::map<PopulationTag, double> coverage_;
};

// Joint P(x) over an explicit support, sorted by cell.
struct JointInput {
  std::vector<Cell> cells;
  std::vector<double> probabilities;
  bool operator==(const JointInput&) const = default;
};

// Product of independent per-feature marginals over each full domain.
struct FactoredInput {
  std::vector<std::vector<double>> marginals;
  bool operator==(const FactoredInput&) const = default;
};

struct InputDistribution {
  std::variant<JointInput, FactoredInput> form;

  bool is_joint() const { return std::holds_alternative<JointInput>(form); }
  const JointInput& joint() const { return std::get<JointInput>(form); }
  const FactoredInput& factored() const { return std::get<FactoredInput>(form); }
  bool operator==(const InputDistribution&) const = default;

  // Builds and validates (non-negative, sums to 1 within 1e-12). Joint cells
  // are sorted and duplicates rejected.
  static InputDistribution Joint(std::vector<Cell> cells,
                                 std::vector<double> probabilities);
  static InputDistribution Factored(std::vector<std::vector<double>> marginals);
};

enum class ComponentKind { kConditional, kInputJoint, kInputMarginal };

struct DistributionComponent {
  ComponentKind kind = ComponentKind::kConditional;
  std::size_t feature = 0;  // meaningful for kInputMarginal only
  bool operator==(const DistributionComponent&) const = default;
};

// Which factors of P(y, x) act as Shapley players.
class FactorizationPlan {
 public:
  FactorizationPlan(std::vector<DistributionComponent> players,
                    std::size_t num_features);

  // (conditional, joint input)
  static FactorizationPlan TwoPlayer(std::size_t num_features);
  // (conditional, marginal 0, ..., marginal d-1)
  static FactorizationPlan PerFeature(std::size_t num_features);

  const std::vector<DistributionComponent>& players() const { return players_; }
  std::size_t k() const { return players_.size(); }
  std::size_t num_features() const { return num_features_; }
  bool factored() const { return factored_; }
  std::size_t conditional_player() const { return conditional_player_; }
  // Player index owning feature f's marginal (factored plans only).
  std::size_t marginal_player(std::size_t f) const { return marginal_player_[f]; }

 private:
  std::vector<DistributionComponent> players_;
  std::size_t num_features_;
  bool factored_ = false;
  std::size_t conditional_player_ = 0;
  std::vector<std::size_t> marginal_player_;
};

// Report key of a player: "conditional", "input" or the feature name.
std::string ComponentKey(const DistributionComponent& component,
                         const FeatureSchema& schema);

// s_i = 0 selects the baseline component, 1 the target component.
struct SurrogateAssignment {
  std::vector<std::uint8_t> bits;

  static SurrogateAssignment AllZeros(std::size_t k) { return {std::vector<std::uint8_t>(k, 0)}; }
  static SurrogateAssignment AllOnes(std::size_t k) { return {std::vector<std::uint8_t>(k, 1)}; }
  static SurrogateAssignment FromMask(std::uint64_t mask, std::size_t k);

  std::size_t size() const { return bits.size(); }
  bool operator[](std::size_t i) const { return bits[i] != 0; }
  std::string Key() const;
  bool operator==(const SurrogateAssignment&) const = default;
};

struct PopulationDistributions {
  PopulationTag tag = PopulationTag::kBaseline;
  ConditionalTable conditional;
  InputDistribution input;
};

ConditionalTable EstimateConditional(const BinnedDataset& data, double smoothing);

// Joint form: cell frequencies over observed cells (smoothing unused).
// Factored form: smoothed frequencies over each feature's declared domain.
InputDistribution EstimateInput(const BinnedDataset& data,
                                const FactorizationPlan& plan, double smoothing);

PopulationDistributions EstimatePopulation(const BinnedDataset& data,
                                           const FactorizationPlan& plan,
                                           double smoothing);

struct HybridDistributions {
  const ConditionalTable* conditional = nullptr;
  InputDistribution input;
};

// Composes the distributions selected by `s` (no mixing: every component is
// taken whole from one population).
HybridDistributions AssembleHybrid(const PopulationDistributions& base,
                                   const PopulationDistributions& targ,
                                   const FactorizationPlan& plan,
                                   const SurrogateAssignment& s);

nlohmann::json ConditionalToJson(const ConditionalTable& table);
nlohmann::json InputToJson(const InputDistribution& input);

}  // namespace driftshap

#endif  // DRIFTSHAP_DISTRIBUTIONS_H_
