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

#include "driftshap/shapley.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <thread>

#include "driftshap/error.h"
#include "driftshap/numeric.h"

namespace driftshap {
namespace {

using nlohmann::json;

// |S|! (k - |S| - 1)! / k!  ==  1 / (k * C(k - 1, |S|))
std::vector<double> ShapleyWeights(std::size_t k) {
  std::vector<double> weights(k);
  double binom = 1.0;  // C(k-1, s)
  for (std::size_t s = 0; s < k; ++s) {
    weights[s] = 1.0 / (static_cast<double>(k) * binom);
    binom = binom * static_cast<double>(k - 1 - s) / static_cast<double>(s + 1);
  }
  return weights;
}

template <typename Fn>
void ParallelFor(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n));
  if (workers == 1) {
    fn(0, n, 0);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end, w] { fn(begin, end, w); });
  }
  for (auto& t : pool) t.join();
}

AttributionReport BaseReport(const DistributionValueFunction& f, EstimatorInfo estimator) {
  AttributionReport report;
  report.estimator = estimator;
  const std::size_t k = f.k();
  report.risk_baseline = f.Evaluate(SurrogateAssignment::AllZeros(k));
  report.risk_target = f.Evaluate(SurrogateAssignment::AllOnes(k));
  const auto keys = f.PlayerKeys();
  for (std::size_t i = 0; i < k; ++i) {
    report.players.push_back({f.plan().players()[i], keys[i], 0.0, 0.0});
  }
  auto add_coverage = [&](const char* name, const ConditionalTable& table) {
    for (const auto& [tag, fraction] : table.coverage()) {
      report.diagnostics.coverage[name][std::string(PopulationName(tag))] = fraction;
    }
  };
  add_coverage("baseline_conditional", f.base().conditional);
  add_coverage("target_conditional", f.target().conditional);
  report.diagnostics.max_fallback_mass =
      std::max(report.risk_baseline.fallback_mass, report.risk_target.fallback_mass);
  return report;
}

void FinishReport(AttributionReport* report) {
  report->efficiency_residual =
      (report->risk_target.value - report->risk_baseline.value) - report->SumPhi();
}

std::string_view ComponentKindName(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::kConditional:
      return "conditional";
    case ComponentKind::kInputJoint:
      return "input-joint";
    case ComponentKind::kInputMarginal:
      return "input-marginal";
  }
  return "";
}

}  // namespace

DistributionValueFunction::DistributionValueFunction(
    std::shared_ptr<const FeatureSchema> schema, Hypothesis q, LossFunction loss,
    PopulationDistributions base, PopulationDistributions target, FactorizationPlan plan,
    RiskConfig risk)
    : schema_(std::move(schema)),
      q_(std::move(q)),
      loss_(std::move(loss)),
      base_(std::move(base)),
      target_(std::move(target)),
      plan_(std::move(plan)),
      risk_(risk) {
  if (plan_.num_features() != schema_->num_features()) {
    throw Error(ErrorCode::kPlanMismatch, "plan and schema disagree on feature count");
  }
  if (base_.input.is_joint() == plan_.factored() ||
      target_.input.is_joint() == plan_.factored()) {
    throw Error(ErrorCode::kPlanMismatch, "input distributions do not match the plan");
  }
}

RiskValue DistributionValueFunction::Evaluate(const SurrogateAssignment& s) const {
  const std::string key = s.Key();
  {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  const auto hybrid = AssembleHybrid(base_, target_, plan_, s);
  const RiskValue risk = EvaluateRisk(q_, loss_, *hybrid.conditional, hybrid.input, risk_);
  std::lock_guard<std::mutex> lock(mutex_);
  return memo_.emplace(key, risk).first->second;
}

std::size_t DistributionValueFunction::memo_size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return memo_.size();
}

std::unique_ptr<FactoredRiskWalker> DistributionValueFunction::MakeWalker() const {
  if (!plan_.factored() || risk_.method != RiskMethod::kAuto) return nullptr;
  try {
    return std::make_unique<FactoredRiskWalker>(q_, loss_, base_.conditional,
                                                target_.conditional, base_.input.factored(),
                                                target_.input.factored());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kEnumerationOverflow) return nullptr;
    throw;
  }
}

std::vector<std::string> DistributionValueFunction::PlayerKeys() const {
  std::vector<std::string> keys;
  for (const auto& p : plan_.players()) keys.push_back(ComponentKey(p, *schema_));
  return keys;
}

std::string_view EstimatorName(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kExact:
      return "exact";
    case EstimatorKind::kTwoPlayerClosedForm:
      return "two-player-closed-form";
    case EstimatorKind::kMonteCarlo:
      return "monte-carlo";
  }
  return "";
}

double AttributionReport::Phi(std::string_view key) const {
  for (const auto& p : players) {
    if (p.key == key) return p.phi;
  }
  throw Error(ErrorCode::kInvalidArgument, "no player '" + std::string(key) + "'");
}

double AttributionReport::SumPhi() const {
  double total = 0.0;
  for (const auto& p : players) total += p.phi;
  return total;
}

AttributionReport ShapleyExact(const DistributionValueFunction& f, std::size_t exact_k_limit,
                               int threads) {
  const std::size_t k = f.k();
  if (k > exact_k_limit || k >= 63) {
    throw Error(ErrorCode::kTooManyPlayers,
                std::to_string(k) + " players exceed the exact limit of " +
                    std::to_string(exact_k_limit) + "; use the monte-carlo estimator");
  }
  AttributionReport report = BaseReport(f, {EstimatorKind::kExact, 0, 0});
  const std::uint64_t subsets = std::uint64_t{1} << k;
  std::vector<double> values(subsets);
  std::vector<double> fallback(subsets);
  ParallelFor(subsets, threads, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t mask = begin; mask < end; ++mask) {
      const RiskValue r = f.Evaluate(SurrogateAssignment::FromMask(mask, k));
      values[mask] = r.value;
      fallback[mask] = r.fallback_mass;
    }
  });
  const auto weights = ShapleyWeights(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    ExactSum phi;
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
      if (mask & bit) continue;
      phi.Add(weights[std::popcount(mask)] * (values[mask | bit] - values[mask]));
    }
    report.players[i].phi = phi.Value();
  }
  report.diagnostics.max_fallback_mass = *std::max_element(fallback.begin(), fallback.end());
  report.diagnostics.evaluations = subsets;
  FinishReport(&report);
  return report;
}

AttributionReport ShapleyTwoPlayer(const DistributionValueFunction& f) {
  if (f.k() != 2) {
    throw Error(ErrorCode::kPlanMismatch, "closed form needs exactly two players, plan has " +
                                              std::to_string(f.k()));
  }
  AttributionReport report = BaseReport(f, {EstimatorKind::kTwoPlayerClosedForm, 0, 0});
  const std::size_t c = f.plan().conditional_player();
  const std::size_t x = 1 - c;
  // R(conditional bit, input bit)
  auto risk = [&](int cond, int input) {
    SurrogateAssignment s = SurrogateAssignment::AllZeros(2);
    s.bits[c] = static_cast<std::uint8_t>(cond);
    s.bits[x] = static_cast<std::uint8_t>(input);
    return f.Evaluate(s);
  };
  const RiskValue bb = risk(0, 0);
  const RiskValue tb = risk(1, 0);
  const RiskValue bt = risk(0, 1);
  const RiskValue tt = risk(1, 1);
  report.players[c].phi = 0.5 * ((tb.value - bb.value) + (tt.value - bt.value));
  report.players[x].phi = 0.5 * ((bt.value - bb.value) + (tt.value - tb.value));
  report.diagnostics.max_fallback_mass =
      std::max({bb.fallback_mass, tb.fallback_mass, bt.fallback_mass, tt.fallback_mass});
  report.diagnostics.evaluations = 4;
  FinishReport(&report);
  return report;
}

AttributionReport ShapleyMonteCarlo(const DistributionValueFunction& f,
                                    std::size_t n_permutations, std::uint64_t seed,
                                    int threads) {
  const std::size_t k = f.k();
  if (n_permutations == 0) {
    throw Error(ErrorCode::kInvalidArgument, "n_permutations must be positive");
  }
  AttributionReport report =
      BaseReport(f, {EstimatorKind::kMonteCarlo, n_permutations, seed});
  const double start = report.risk_baseline.value;
  const double finish = report.risk_target.value;
  const std::size_t cond = f.plan().conditional_player();

  std::vector<double> credits(n_permutations * k);
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::max(threads, 1), n_permutations));
  std::vector<double> max_fallback(workers, 0.0);

  ParallelFor(n_permutations, threads, [&](std::size_t begin, std::size_t end, std::size_t w) {
    auto walker = f.MakeWalker();
    std::vector<std::size_t> order(k);
    SurrogateAssignment s = SurrogateAssignment::AllZeros(k);
    std::vector<std::uint8_t> features(f.plan().factored() ? f.plan().num_features() : 0);
    for (std::size_t p = begin; p < end; ++p) {
      Rng rng(DeriveSeed(seed, p));
      std::iota(order.begin(), order.end(), 0);
      for (std::size_t i = k - 1; i > 0; --i) {
        std::swap(order[i], order[rng.UniformInt(i + 1)]);
      }
      std::fill(s.bits.begin(), s.bits.end(), 0);
      if (walker) {
        std::fill(features.begin(), features.end(), 0);
        walker->Reset(false, features);
      }
      double previous = start;
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t player = order[j];
        s.bits[player] = 1;
        double current;
        if (j + 1 == k) {
          current = finish;
        } else if (walker) {
          if (player == cond) {
            walker->SetConditional(true);
          } else {
            walker->SetFeature(f.plan().players()[player].feature, true);
          }
          current = walker->Value();
          max_fallback[w] = std::max(max_fallback[w], walker->FallbackMass());
        } else {
          const RiskValue r = f.Evaluate(s);
          current = r.value;
          max_fallback[w] = std::max(max_fallback[w], r.fallback_mass);
        }
        credits[p * k + player] = current - previous;
        previous = current;
      }
    }
  });

  const double n = static_cast<double>(n_permutations);
  std::vector<double> column(n_permutations);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t p = 0; p < n_permutations; ++p) column[p] = credits[p * k + i];
    const double mean = SumExact(column) / n;
    double ss = 0.0;
    for (double c : column) ss += (c - mean) * (c - mean);
    report.players[i].phi = mean;
    report.players[i].standard_error =
        n_permutations > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  }
  for (double m : max_fallback) {
    report.diagnostics.max_fallback_mass = std::max(report.diagnostics.max_fallback_mass, m);
  }
  report.diagnostics.evaluations = n_permutations * (k > 1 ? k - 1 : 0) + 2;
  FinishReport(&report);
  return report;
}

json RiskToJson(const RiskValue& risk) {
  json doc = {{"value", risk.value},
              {"support_mass", risk.support_mass},
              {"fallback_mass", risk.fallback_mass},
              {"route", RiskRouteName(risk.route)}};
  if (risk.standard_error) doc["standard_error"] = *risk.standard_error;
  return doc;
}

json ReportToJson(const AttributionReport& report) {
  json phi = json::object();
  json players = json::array();
  std::vector<const PlayerAttribution*> inputs;
  for (const auto& p : report.players) {
    phi[p.key] = p.phi;
    json item = {{"key", p.key},
                 {"component", ComponentKindName(p.component.kind)},
                 {"phi", p.phi}};
    if (p.component.kind == ComponentKind::kInputMarginal) {
      item["feature_index"] = p.component.feature;
    }
    if (report.estimator.kind == EstimatorKind::kMonteCarlo) {
      item["standard_error"] = p.standard_error;
    }
    players.push_back(item);
    if (p.component.kind != ComponentKind::kConditional) inputs.push_back(&p);
  }
  std::stable_sort(inputs.begin(), inputs.end(), [](const auto* a, const auto* b) {
    return std::fabs(a->phi) > std::fabs(b->phi);
  });
  json ranking = json::array();
  for (const auto* p : inputs) ranking.push_back({{"key", p->key}, {"phi", p->phi}});

  json estimator = {{"kind", EstimatorName(report.estimator.kind)}};
  if (report.estimator.kind == EstimatorKind::kMonteCarlo) {
    estimator["n_permutations"] = report.estimator.n_permutations;
    estimator["seed"] = report.estimator.seed;
  }
  return {{"phi", phi},
          {"players", players},
          {"virtual_drift_ranking", ranking},
          {"risk_baseline", RiskToJson(report.risk_baseline)},
          {"risk_target", RiskToJson(report.risk_target)},
          {"risk_change", report.risk_target.value - report.risk_baseline.value},
          {"efficiency_residual", report.efficiency_residual},
          {"estimator", estimator},
          {"diagnostics",
           {{"max_fallback_mass", report.diagnostics.max_fallback_mass},
            {"evaluations", report.diagnostics.evaluations},
            {"coverage", report.diagnostics.coverage}}}};
}

namespace {

RiskValue RiskFromJson(const json& doc) {
  RiskValue risk;
  risk.value = doc.at("value").get<double>();
  risk.support_mass = doc.at("support_mass").get<double>();
  risk.fallback_mass = doc.at("fallback_mass").get<double>();
  if (doc.contains("standard_error")) risk.standard_error = doc.at("standard_error").get<double>();
  const std::string route = doc.value("route", "joint-support");
  for (RiskRoute r : {RiskRoute::kJointSupport, RiskRoute::kDecomposed, RiskRoute::kEnumerated,
                      RiskRoute::kSampled}) {
    if (RiskRouteName(r) == route) risk.route = r;
  }
  return risk;
}

}  // namespace

AttributionReport ReportFromJson(const json& doc) {
  try {
    AttributionReport report;
    for (const auto& item : doc.at("players")) {
      PlayerAttribution p;
      p.key = item.at("key").get<std::string>();
      const std::string kind = item.at("component").get<std::string>();
      if (kind == "conditional") {
        p.component.kind = ComponentKind::kConditional;
      } else if (kind == "input-joint") {
        p.component.kind = ComponentKind::kInputJoint;
      } else {
        p.component.kind = ComponentKind::kInputMarginal;
        p.component.feature = item.at("feature_index").get<std::size_t>();
      }
      p.phi = item.at("phi").get<double>();
      p.standard_error = item.value("standard_error", 0.0);
      report.players.push_back(p);
    }
    report.risk_baseline = RiskFromJson(doc.at("risk_baseline"));
    report.risk_target = RiskFromJson(doc.at("risk_target"));
    report.efficiency_residual = doc.at("efficiency_residual").get<double>();
    const auto& est = doc.at("estimator");
    const std::string kind = est.at("kind").get<std::string>();
    for (EstimatorKind e : {EstimatorKind::kExact, EstimatorKind::kTwoPlayerClosedForm,
                            EstimatorKind::kMonteCarlo}) {
      if (EstimatorName(e) == kind) report.estimator.kind = e;
    }
    report.estimator.n_permutations = est.value("n_permutations", std::size_t{0});
    report.estimator.seed = est.value("seed", std::uint64_t{0});
    const auto& diag = doc.at("diagnostics");
    report.diagnostics.max_fallback_mass = diag.at("max_fallback_mass").get<double>();
    report.diagnostics.evaluations = diag.at("evaluations").get<std::size_t>();
    report.diagnostics.coverage =
        diag.at("coverage").get<std::map<std::string, std::map<std::string, double>>>();
    return report;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("report document: ") + e.what());
  }
}

}  // namespace driftshap
