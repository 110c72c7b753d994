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

#include "driftshap/distributions.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "driftshap/error.h"

namespace driftshap {
namespace {

using nlohmann::json;

constexpr double kNormTolerance = 1e-9;

void CheckDistribution(std::span<const double> p, const std::string& what) {
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, what + " has a negative or non-finite entry");
    }
    total += v;
  }
  if (std::fabs(total - 1.0) > kNormTolerance) {
    throw Error(ErrorCode::kInvalidArgument, what + " does not sum to 1");
  }
}

std::vector<double> Normalized(std::vector<double> counts, double total) {
  for (double& c : counts) c /= total;
  return counts;
}

}  // namespace

ConditionalTable::ConditionalTable(std::vector<Cell> cells,
                                   std::vector<double> probabilities,
                                   std::vector<double> prior)
    : prior_(std::move(prior)) {
  const std::size_t c = prior_.size();
  if (c == 0) throw Error(ErrorCode::kInvalidArgument, "conditional table needs classes");
  if (probabilities.size() != cells.size() * c) {
    throw Error(ErrorCode::kInvalidArgument, "conditional table shape mismatch");
  }
  CheckDistribution(prior_, "class prior");
  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return cells[a] < cells[b]; });
  cells_.reserve(cells.size());
  probabilities_.reserve(probabilities.size());
  for (std::size_t i : order) {
    if (!index_.emplace(cells[i], cells_.size()).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate cell in conditional table");
    }
    cells_.push_back(std::move(cells[i]));
    const std::span<const double> row(probabilities.data() + i * c, c);
    CheckDistribution(row, "conditional row " + CellKey(cells_.back()));
    probabilities_.insert(probabilities_.end(), row.begin(), row.end());
  }
}

std::optional<std::size_t> ConditionalTable::Find(const Cell& cell) const {
  const auto it = index_.find(cell);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const double> ConditionalTable::Lookup(const Cell& cell,
                                                 bool* used_prior) const {
  const auto i = Find(cell);
  if (used_prior != nullptr) *used_prior = !i.has_value();
  return i ? row(*i) : prior();
}

double ConditionalTable::CoverageOf(const BinnedDataset& data) const {
  double covered = 0.0;
  double total = 0.0;
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    total += data.weights[r];
    if (Find(data.cells[r])) covered += data.weights[r];
  }
  return total > 0.0 ? covered / total : 0.0;
}

InputDistribution InputDistribution::Joint(std::vector<Cell> cells,
                                           std::vector<double> probabilities) {
  if (cells.size() != probabilities.size()) {
    throw Error(ErrorCode::kInvalidArgument, "joint input shape mismatch");
  }
  CheckDistribution(probabilities, "joint input");
  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return cells[a] < cells[b]; });
  JointInput joint;
  for (std::size_t i : order) {
    if (!joint.cells.empty() && joint.cells.back() == cells[i]) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate cell in joint input");
    }
    joint.cells.push_back(std::move(cells[i]));
    joint.probabilities.push_back(probabilities[i]);
  }
  return {std::move(joint)};
}

InputDistribution InputDistribution::Factored(std::vector<std::vector<double>> marginals) {
  for (std::size_t f = 0; f < marginals.size(); ++f) {
    CheckDistribution(marginals[f], "marginal " + std::to_string(f));
  }
  return {FactoredInput{std::move(marginals)}};
}

FactorizationPlan::FactorizationPlan(std::vector<DistributionComponent> players,
                                     std::size_t num_features)
    : players_(std::move(players)), num_features_(num_features) {
  if (players_.size() < 2) {
    throw Error(ErrorCode::kPlanMismatch, "a plan needs at least two players");
  }
  std::size_t conditionals = 0;
  std::size_t joints = 0;
  marginal_player_.assign(num_features_, SIZE_MAX);
  for (std::size_t i = 0; i < players_.size(); ++i) {
    const auto& p = players_[i];
    switch (p.kind) {
      case ComponentKind::kConditional:
        ++conditionals;
        conditional_player_ = i;
        break;
      case ComponentKind::kInputJoint:
        ++joints;
        break;
      case ComponentKind::kInputMarginal:
        if (p.feature >= num_features_ || marginal_player_[p.feature] != SIZE_MAX) {
          throw Error(ErrorCode::kPlanMismatch, "marginal players must cover each feature once");
        }
        marginal_player_[p.feature] = i;
        break;
    }
  }
  factored_ = joints == 0;
  const bool partition =
      joints == 1 ? players_.size() == 2
                  : std::none_of(marginal_player_.begin(), marginal_player_.end(),
                                 [](std::size_t v) { return v == SIZE_MAX; });
  if (conditionals != 1 || joints > 1 || !partition) {
    throw Error(ErrorCode::kPlanMismatch,
                "plan needs one conditional plus one joint input or one marginal per feature");
  }
  if (!factored_) marginal_player_.clear();
}

FactorizationPlan FactorizationPlan::TwoPlayer(std::size_t num_features) {
  return FactorizationPlan({{ComponentKind::kConditional, 0}, {ComponentKind::kInputJoint, 0}},
                           num_features);
}

FactorizationPlan FactorizationPlan::PerFeature(std::size_t num_features) {
  std::vector<DistributionComponent> players{{ComponentKind::kConditional, 0}};
  for (std::size_t f = 0; f < num_features; ++f) {
    players.push_back({ComponentKind::kInputMarginal, f});
  }
  return FactorizationPlan(std::move(players), num_features);
}

std::string ComponentKey(const DistributionComponent& component,
                         const FeatureSchema& schema) {
  switch (component.kind) {
    case ComponentKind::kConditional:
      return "conditional";
    case ComponentKind::kInputJoint:
      return "input";
    case ComponentKind::kInputMarginal:
      return schema.features.at(component.feature).name;
  }
  return "";
}

SurrogateAssignment SurrogateAssignment::FromMask(std::uint64_t mask, std::size_t k) {
  SurrogateAssignment s;
  s.bits.resize(k);
  for (std::size_t i = 0; i < k; ++i) s.bits[i] = (mask >> i) & 1U;
  return s;
}

std::string SurrogateAssignment::Key() const {
  std::string key(bits.size(), '0');
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) key[i] = '1';
  }
  return key;
}

ConditionalTable EstimateConditional(const BinnedDataset& data, double smoothing) {
  if (data.num_rows() == 0) throw Error(ErrorCode::kEmptyData, "no rows");
  if (!(smoothing >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "smoothing must be non-negative");
  }
  const std::size_t c = data.schema->label.classes.size();
  std::unordered_map<Cell, std::vector<double>, CellHash> counts;
  std::vector<double> class_counts(c, 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    const double w = data.weights[r];
    if (w <= 0.0) continue;
    auto& row = counts[data.cells[r]];
    if (row.empty()) row.assign(c, 0.0);
    row[data.labels[r]] += w;
    class_counts[data.labels[r]] += w;
    total += w;
  }
  std::vector<Cell> cells;
  std::vector<double> probabilities;
  cells.reserve(counts.size());
  probabilities.reserve(counts.size() * c);
  for (auto& [cell, row] : counts) {
    const double cell_total = std::accumulate(row.begin(), row.end(), 0.0);
    const double denom = cell_total + smoothing * static_cast<double>(c);
    cells.push_back(cell);
    for (double v : row) probabilities.push_back((v + smoothing) / denom);
  }
  std::vector<double> prior(c);
  const double prior_denom = total + smoothing * static_cast<double>(c);
  for (std::size_t y = 0; y < c; ++y) prior[y] = (class_counts[y] + smoothing) / prior_denom;
  ConditionalTable table(std::move(cells), std::move(probabilities), std::move(prior));
  table.SetCoverage(data.tag, table.CoverageOf(data));
  return table;
}

InputDistribution EstimateInput(const BinnedDataset& data,
                                const FactorizationPlan& plan, double smoothing) {
  if (data.num_rows() == 0) throw Error(ErrorCode::kEmptyData, "no rows");
  if (plan.num_features() != data.schema->num_features()) {
    throw Error(ErrorCode::kPlanMismatch, "plan and schema disagree on feature count");
  }
  const double total = data.TotalWeight();
  if (!plan.factored()) {
    std::unordered_map<Cell, double, CellHash> mass;
    for (std::size_t r = 0; r < data.num_rows(); ++r) {
      if (data.weights[r] > 0.0) mass[data.cells[r]] += data.weights[r];
    }
    std::vector<Cell> cells;
    std::vector<double> probabilities;
    for (auto& [cell, w] : mass) {
      cells.push_back(cell);
      probabilities.push_back(w / total);
    }
    return InputDistribution::Joint(std::move(cells), std::move(probabilities));
  }
  const auto cards = data.schema->Cardinalities();
  std::vector<std::vector<double>> marginals(cards.size());
  for (std::size_t f = 0; f < cards.size(); ++f) {
    marginals[f].assign(cards[f], smoothing);
  }
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    for (std::size_t f = 0; f < cards.size(); ++f) {
      marginals[f][data.cells[r][f]] += data.weights[r];
    }
  }
  for (std::size_t f = 0; f < cards.size(); ++f) {
    marginals[f] = Normalized(std::move(marginals[f]),
                              total + smoothing * static_cast<double>(cards[f]));
  }
  return InputDistribution::Factored(std::move(marginals));
}

PopulationDistributions EstimatePopulation(const BinnedDataset& data,
                                           const FactorizationPlan& plan,
                                           double smoothing) {
  return {data.tag, EstimateConditional(data, smoothing),
          EstimateInput(data, plan, smoothing)};
}

HybridDistributions AssembleHybrid(const PopulationDistributions& base,
                                   const PopulationDistributions& targ,
                                   const FactorizationPlan& plan,
                                   const SurrogateAssignment& s) {
  if (s.size() != plan.k()) {
    throw Error(ErrorCode::kPlanMismatch, "assignment has " + std::to_string(s.size()) +
                                              " bits, plan has " +
                                              std::to_string(plan.k()) + " players");
  }
  if (base.input.is_joint() == plan.factored() || targ.input.is_joint() == plan.factored()) {
    throw Error(ErrorCode::kPlanMismatch, "input distributions do not match the plan");
  }
  HybridDistributions hybrid;
  hybrid.conditional =
      s[plan.conditional_player()] ? &targ.conditional : &base.conditional;
  if (!plan.factored()) {
    const std::size_t joint_player = plan.conditional_player() == 0 ? 1 : 0;
    hybrid.input = s[joint_player] ? targ.input : base.input;
    return hybrid;
  }
  const auto& b = base.input.factored().marginals;
  const auto& t = targ.input.factored().marginals;
  if (b.size() != plan.num_features() || t.size() != plan.num_features()) {
    throw Error(ErrorCode::kPlanMismatch, "marginal count does not match the plan");
  }
  FactoredInput mixed;
  mixed.marginals.reserve(b.size());
  for (std::size_t f = 0; f < b.size(); ++f) {
    mixed.marginals.push_back(s[plan.marginal_player(f)] ? t[f] : b[f]);
  }
  hybrid.input.form = std::move(mixed);
  return hybrid;
}

json ConditionalToJson(const ConditionalTable& table) {
  json entries = json::object();
  for (std::size_t i = 0; i < table.num_cells(); ++i) {
    const auto row = table.row(i);
    entries[CellKey(table.cells()[i])] = std::vector<double>(row.begin(), row.end());
  }
  json coverage = json::object();
  for (const auto& [tag, fraction] : table.coverage()) {
    coverage[std::string(PopulationName(tag))] = fraction;
  }
  const auto prior = table.prior();
  return {{"entries", entries},
          {"class_prior", std::vector<double>(prior.begin(), prior.end())},
          {"coverage", coverage}};
}

json InputToJson(const InputDistribution& input) {
  if (input.is_joint()) {
    json table = json::object();
    const auto& joint = input.joint();
    for (std::size_t i = 0; i < joint.cells.size(); ++i) {
      table[CellKey(joint.cells[i])] = joint.probabilities[i];
    }
    return {{"form", "joint"}, {"table", table}};
  }
  return {{"form", "factored"}, {"marginals", input.factored().marginals}};
}

}  // namespace driftshap
