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

#include "driftshap/risk.h"

#include <algorithm>
#include <cmath>

#include "driftshap/error.h"
#include "driftshap/numeric.h"

namespace driftshap {
namespace {

double ExpectedLoss(const LossFunction& loss, int predicted, std::span<const double> p_y) {
  double total = 0.0;
  for (std::size_t y = 0; y < p_y.size(); ++y) {
    if (p_y[y] != 0.0) total += loss(predicted, static_cast<int>(y)) * p_y[y];
  }
  return total;
}

std::vector<double> PriorLoss(const LossFunction& loss, const ConditionalTable& table) {
  std::vector<double> out(static_cast<std::size_t>(loss.num_classes()));
  for (int a = 0; a < loss.num_classes(); ++a) out[a] = ExpectedLoss(loss, a, table.prior());
  return out;
}

void CheckShapes(const Hypothesis& q, const LossFunction& loss,
                 const ConditionalTable& conditional) {
  if (loss.num_classes() != conditional.num_classes()) {
    throw Error(ErrorCode::kSchemaMismatch, "loss and conditional table disagree on classes");
  }
  if (q.MaxClass() >= loss.num_classes()) {
    throw Error(ErrorCode::kSchemaMismatch, "hypothesis predicts a class outside the label set");
  }
}

double ProductProbability(const FactoredInput& input, const Cell& cell) {
  double p = 1.0;
  for (std::size_t f = 0; f < cell.size() && p != 0.0; ++f) p *= input.marginals[f][cell[f]];
  return p;
}

// Combines the seen-cell part with the fallback part of the decomposition:
// the prior answers every cell outside the table, whose mass per predicted
// class is P(q = a) minus the table cells predicting a.
void FinishDecomposition(std::span<const double> predicted_mass,
                         std::span<const double> seen_mass,
                         std::span<const double> prior_loss, double seen_value,
                         double* value, double* fallback) {
  double unseen_total = 0.0;
  double unseen_value = 0.0;
  for (std::size_t a = 0; a < predicted_mass.size(); ++a) {
    const double unseen = std::max(0.0, predicted_mass[a] - seen_mass[a]);
    unseen_total += unseen;
    unseen_value += unseen * prior_loss[a];
  }
  *value = seen_value + unseen_value;
  *fallback = std::clamp(unseen_total, 0.0, 1.0);
}

}  // namespace

std::string_view RiskRouteName(RiskRoute route) {
  switch (route) {
    case RiskRoute::kJointSupport:
      return "joint-support";
    case RiskRoute::kDecomposed:
      return "decomposed";
    case RiskRoute::kEnumerated:
      return "enumerated";
    case RiskRoute::kSampled:
      return "sampled";
  }
  return "";
}

RiskValue EvaluateRisk(const Hypothesis& q, const LossFunction& loss,
                       const ConditionalTable& conditional,
                       const InputDistribution& input, const RiskConfig& config) {
  CheckShapes(q, loss, conditional);
  if (input.is_joint()) {
    const auto& joint = input.joint();
    RiskValue risk;
    risk.support_mass = 0.0;
    for (std::size_t i = 0; i < joint.cells.size(); ++i) {
      const double p = joint.probabilities[i];
      if (p == 0.0) continue;
      bool used_prior = false;
      const auto p_y = conditional.Lookup(joint.cells[i], &used_prior);
      risk.value += p * ExpectedLoss(loss, q.Predict(joint.cells[i]), p_y);
      risk.support_mass += p;
      if (used_prior) risk.fallback_mass += p;
    }
    risk.route = RiskRoute::kJointSupport;
    return risk;
  }
  const auto& factored = input.factored();
  switch (config.method) {
    case RiskMethod::kAuto:
      try {
        return EvaluateRiskDecomposed(q, loss, conditional, factored);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kEnumerationOverflow) throw;
      }
      [[fallthrough]];
    case RiskMethod::kEnumerate:
      try {
        return EvaluateRiskEnumerated(q, loss, conditional, factored, config.cell_budget);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kEnumerationOverflow || !config.sampling_fallback) throw;
      }
      return EvaluateRiskSampled(q, loss, conditional, input, config.samples, config.seed);
    case RiskMethod::kSampled:
      return EvaluateRiskSampled(q, loss, conditional, input, config.samples, config.seed);
  }
  return {};
}

RiskValue EvaluateRiskDecomposed(const Hypothesis& q, const LossFunction& loss,
                                 const ConditionalTable& conditional,
                                 const FactoredInput& input) {
  CheckShapes(q, loss, conditional);
  const std::size_t classes = static_cast<std::size_t>(loss.num_classes());
  const auto predicted = q.PredictionDistribution(input.marginals, loss.num_classes());
  std::vector<double> seen(classes, 0.0);
  double seen_value = 0.0;
  for (std::size_t i = 0; i < conditional.num_cells(); ++i) {
    const Cell& cell = conditional.cells()[i];
    const double p = ProductProbability(input, cell);
    if (p == 0.0) continue;
    const int a = q.Predict(cell);
    seen[a] += p;
    seen_value += p * ExpectedLoss(loss, a, conditional.row(i));
  }
  RiskValue risk;
  risk.route = RiskRoute::kDecomposed;
  FinishDecomposition(predicted, seen, PriorLoss(loss, conditional), seen_value, &risk.value,
                      &risk.fallback_mass);
  return risk;
}

RiskValue EvaluateRiskEnumerated(const Hypothesis& q, const LossFunction& loss,
                                 const ConditionalTable& conditional,
                                 const FactoredInput& input, std::uint64_t cell_budget) {
  CheckShapes(q, loss, conditional);
  const auto& m = input.marginals;
  double domain = 1.0;
  for (const auto& marginal : m) domain *= static_cast<double>(marginal.size());
  if (domain > static_cast<double>(cell_budget)) {
    throw Error(ErrorCode::kEnumerationOverflow,
                "product domain of " + FormatDouble(domain) + " cells exceeds budget " +
                    std::to_string(cell_budget));
  }
  RiskValue risk;
  risk.route = RiskRoute::kEnumerated;
  risk.support_mass = 0.0;
  Cell cell(m.size(), 0);
  while (true) {
    const double p = ProductProbability(input, cell);
    if (p != 0.0) {
      bool used_prior = false;
      const auto p_y = conditional.Lookup(cell, &used_prior);
      risk.value += p * ExpectedLoss(loss, q.Predict(cell), p_y);
      risk.support_mass += p;
      if (used_prior) risk.fallback_mass += p;
    }
    std::size_t f = 0;
    while (f < m.size()) {
      if (++cell[f] < static_cast<std::int32_t>(m[f].size())) break;
      cell[f] = 0;
      ++f;
    }
    if (f == m.size()) break;
  }
  return risk;
}

RiskValue EvaluateRiskSampled(const Hypothesis& q, const LossFunction& loss,
                              const ConditionalTable& conditional,
                              const InputDistribution& input, std::size_t n_samples,
                              std::uint64_t seed) {
  if (input.is_joint()) {
    throw Error(ErrorCode::kInvalidArgument, "sampled risk needs a factored input");
  }
  if (n_samples == 0) throw Error(ErrorCode::kInvalidArgument, "n_samples must be positive");
  CheckShapes(q, loss, conditional);
  const auto& m = input.factored().marginals;
  std::vector<std::vector<double>> cumulative(m.size());
  for (std::size_t f = 0; f < m.size(); ++f) {
    cumulative[f].resize(m[f].size());
    double acc = 0.0;
    for (std::size_t v = 0; v < m[f].size(); ++v) cumulative[f][v] = acc += m[f][v];
  }
  Rng rng(seed);
  Cell cell(m.size());
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t fallback_hits = 0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    for (std::size_t f = 0; f < m.size(); ++f) {
      const auto& cdf = cumulative[f];
      const double u = rng.Uniform01() * cdf.back();
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      if (it == cdf.end()) --it;
      // Skip zero-probability values that share a cumulative boundary.
      auto index = static_cast<std::size_t>(it - cdf.begin());
      while (m[f][index] == 0.0 && index + 1 < cdf.size()) ++index;
      cell[f] = static_cast<std::int32_t>(index);
    }
    bool used_prior = false;
    const auto p_y = conditional.Lookup(cell, &used_prior);
    if (used_prior) ++fallback_hits;
    const double x = ExpectedLoss(loss, q.Predict(cell), p_y);
    const double delta = x - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (x - mean);
  }
  RiskValue risk;
  risk.route = RiskRoute::kSampled;
  risk.value = mean;
  const double n = static_cast<double>(n_samples);
  risk.standard_error = n_samples > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
  risk.fallback_mass = static_cast<double>(fallback_hits) / n;
  return risk;
}

FactoredRiskWalker::FactoredRiskWalker(const Hypothesis& q, const LossFunction& loss,
                                       const ConditionalTable& base_conditional,
                                       const ConditionalTable& target_conditional,
                                       const FactoredInput& base_input,
                                       const FactoredInput& target_input)
    : q_(q), num_classes_(loss.num_classes()), inputs_{&base_input, &target_input} {
  CheckShapes(q, loss, base_conditional);
  CheckShapes(q, loss, target_conditional);
  if (base_input.marginals.size() != target_input.marginals.size()) {
    throw Error(ErrorCode::kPlanMismatch, "marginal counts differ");
  }
  const ConditionalTable* tables[2] = {&base_conditional, &target_conditional};
  for (int t = 0; t < 2; ++t) {
    auto& terms = terms_[t];
    terms.table = tables[t];
    terms.prior_loss = PriorLoss(loss, *tables[t]);
    const std::size_t n = tables[t]->num_cells();
    terms.expected_loss.resize(n);
    terms.prediction.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const int a = q.Predict(tables[t]->cells()[i]);
      terms.prediction[i] = a;
      terms.expected_loss[i] = ExpectedLoss(loss, a, tables[t]->row(i));
    }
    terms.columns.assign(base_input.marginals.size(), std::vector<std::int32_t>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const Cell& cell = tables[t]->cells()[i];
      for (std::size_t f = 0; f < cell.size(); ++f) terms.columns[f][i] = cell[f];
    }
  }
  features_.assign(base_input.marginals.size(), 0);
  current_ = base_input.marginals;
  RebuildProducts();
  Recompute();
  start_product_ = product_;
  start_zeros_ = zeros_;
  start_value_ = value_;
  start_fallback_ = fallback_;
}

void FactoredRiskWalker::Reset(bool target_conditional,
                               const std::vector<std::uint8_t>& target_features) {
  conditional_ = target_conditional;
  features_ = target_features;
  for (std::size_t f = 0; f < features_.size(); ++f) {
    current_[f] = inputs_[features_[f] ? 1 : 0]->marginals[f];
  }
  if (!conditional_ && std::none_of(features_.begin(), features_.end(),
                                    [](std::uint8_t bit) { return bit != 0; })) {
    product_ = start_product_;
    zeros_ = start_zeros_;
    value_ = start_value_;
    fallback_ = start_fallback_;
    return;
  }
  RebuildProducts();
  Recompute();
}

void FactoredRiskWalker::SetConditional(bool target) {
  if (target == conditional_) return;
  conditional_ = target;
  RebuildProducts();
  Recompute();
}

void FactoredRiskWalker::SetFeature(std::size_t f, bool target) {
  if ((features_[f] != 0) == target) return;
  const auto& old_m = current_[f];
  const auto& new_m = inputs_[target ? 1 : 0]->marginals[f];
  const auto& column = terms_[conditional_ ? 1 : 0].columns[f];
  for (std::size_t i = 0; i < column.size(); ++i) {
    const std::int32_t v = column[i];
    const double before = old_m[v];
    const double after = new_m[v];
    if (before == 0.0) {
      --zeros_[i];
    } else {
      product_[i] /= before;
    }
    if (after == 0.0) {
      ++zeros_[i];
    } else {
      product_[i] *= after;
    }
  }
  features_[f] = target ? 1 : 0;
  current_[f] = new_m;
  Recompute();
}

void FactoredRiskWalker::RebuildProducts() {
  const auto& columns = terms_[conditional_ ? 1 : 0].columns;
  const std::size_t n = terms_[conditional_ ? 1 : 0].table->num_cells();
  product_.assign(n, 1.0);
  zeros_.assign(n, 0);
  for (std::size_t f = 0; f < columns.size(); ++f) {
    const auto& marginal = current_[f];
    const auto& column = columns[f];
    for (std::size_t i = 0; i < n; ++i) {
      const double p = marginal[column[i]];
      if (p == 0.0) {
        ++zeros_[i];
      } else {
        product_[i] *= p;
      }
    }
  }
}

void FactoredRiskWalker::Recompute() {
  const auto& terms = terms_[conditional_ ? 1 : 0];
  std::vector<double> seen(static_cast<std::size_t>(num_classes_), 0.0);
  double seen_value = 0.0;
  for (std::size_t i = 0; i < product_.size(); ++i) {
    if (zeros_[i] != 0) continue;
    seen[terms.prediction[i]] += product_[i];
    seen_value += product_[i] * terms.expected_loss[i];
  }
  const auto predicted = q_.PredictionDistribution(current_, num_classes_);
  FinishDecomposition(predicted, seen, terms.prior_loss, seen_value, &value_, &fallback_);
}

double FactoredRiskWalker::Value() const { return value_; }

double FactoredRiskWalker::FallbackMass() const { return fallback_; }

}  // namespace driftshap
