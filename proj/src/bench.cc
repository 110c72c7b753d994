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

#include "driftshap/bench.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "driftshap/numeric.h"

namespace driftshap {
namespace {

using nlohmann::json;

// Target input of the virtual and combined toys: 0.13 on each of the six
// cells where the conjunction and the disjunction disagree, 0.11 on the two
// where they agree.
double ShiftedWeight(int x1, int x2, int x3) {
  const int ones = x1 + x2 + x3;
  return ones == 0 || ones == 3 ? 0.11 : 0.13;
}

RawTable ToyTable(bool disjunction, bool shifted) {
  RawTable table;
  table.columns = {"x1", "x2", "x3", "y"};
  table.weighted = true;
  for (int x1 = 0; x1 <= 1; ++x1) {
    for (int x2 = 0; x2 <= 1; ++x2) {
      for (int x3 = 0; x3 <= 1; ++x3) {
        const int y = disjunction ? (x1 | x2 | x3) : (x1 & x2 & x3);
        table.AddRow({std::to_string(x1), std::to_string(x2), std::to_string(x3),
                      std::to_string(y)},
                     shifted ? ShiftedWeight(x1, x2, x3) : 0.125);
      }
    }
  }
  return table;
}

const PlayerAttribution* FindPlayer(const AttributionReport& report, const std::string& key) {
  for (const auto& p : report.players) {
    if (p.key == key) return &p;
  }
  return nullptr;
}

bool RealDominates(const AttributionReport& r) {
  double max_virtual = 0.0;
  double real = 0.0;
  for (const auto& p : r.players) {
    if (p.component.kind == ComponentKind::kConditional) {
      real = std::fabs(p.phi);
    } else {
      max_virtual = std::max(max_virtual, std::fabs(p.phi));
    }
  }
  return real > max_virtual;
}

bool PerturbedIsTop(const AttributionReport& r, const std::string& feature) {
  const PlayerAttribution* target = FindPlayer(r, feature);
  if (target == nullptr) return false;
  for (const auto& p : r.players) {
    if (p.component.kind == ComponentKind::kConditional || &p == target) continue;
    if (!(std::fabs(target->phi) > std::fabs(p.phi))) return false;
  }
  return true;
}

double AbsPhi(const AttributionReport& r, const std::string& feature) {
  const PlayerAttribution* p = FindPlayer(r, feature);
  return p == nullptr ? 0.0 : std::fabs(p->phi);
}

std::string Fixed(double value, int precision = 6) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(precision);
  out << value;
  return out.str();
}

}  // namespace

std::string_view ToyScenarioName(ToyScenario scenario) {
  switch (scenario) {
    case ToyScenario::kRealDrift:
      return "real-drift";
    case ToyScenario::kVirtualDrift:
      return "virtual-drift";
    case ToyScenario::kCombined:
      return "combined";
  }
  return "";
}

std::pair<RawTable, RawTable> ToyTables(ToyScenario scenario) {
  switch (scenario) {
    case ToyScenario::kRealDrift:
      return {ToyTable(false, false), ToyTable(true, false)};
    case ToyScenario::kVirtualDrift:
      return {ToyTable(true, false), ToyTable(true, true)};
    case ToyScenario::kCombined:
      break;
  }
  return {ToyTable(false, false), ToyTable(true, true)};
}

RunConfig ToyConfig(PlanKind factorization) {
  RunConfig config;
  config.label_column = "y";
  config.categorical = {"x1", "x2", "x3"};
  config.hypothesis.kind = HypothesisKind::kRule;
  config.hypothesis.rule = "x1 and x2 and x3";
  config.factorization = factorization;
  config.estimator.choice = EstimatorChoice::kExact;
  return config;
}

std::vector<ToyRow> RunToySuite() {
  struct Expected {
    ToyScenario scenario;
    double rb, rt, cond, input;
  };
  const Expected expected[] = {{ToyScenario::kRealDrift, 0.0, 0.75, 0.75, 0.0},
                               {ToyScenario::kVirtualDrift, 0.75, 0.78, 0.0, 0.03},
                               {ToyScenario::kCombined, 0.0, 0.78, 0.765, 0.015}};
  std::vector<ToyRow> rows;
  for (const auto& e : expected) {
    const auto [baseline, target] = ToyTables(e.scenario);
    ToyRow row{e.scenario, AttributeTables(baseline, target, ToyConfig()), e.rb, e.rt, e.cond,
               e.input, false};
    const AttributionReport& r = row.report.report;
    row.pass = std::fabs(r.risk_baseline.value - e.rb) <= kToyTolerance &&
               std::fabs(r.risk_target.value - e.rt) <= kToyTolerance &&
               std::fabs(r.Phi("conditional") - e.cond) <= kToyTolerance &&
               std::fabs(r.Phi("input") - e.input) <= kToyTolerance;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string_view SyntheticScenarioName(SyntheticScenario scenario) {
  return scenario == SyntheticScenario::kConceptChange ? "concept-change" : "feature-perturb";
}

SyntheticScenario ParseSyntheticScenario(std::string_view name) {
  if (name == "concept-change") return SyntheticScenario::kConceptChange;
  if (name == "feature-perturb") return SyntheticScenario::kFeaturePerturb;
  throw Error(ErrorCode::kInvalidArgument, "unknown scenario '" + std::string(name) + "'");
}

std::string DefaultPerturbedFeature(Family family) {
  return family == Family::kStagger ? "size" : "x1";
}

std::pair<double, double> ConceptPair(Family family) {
  if (family == Family::kSea) return {8, 9};
  return {1, 2};
}

int SyntheticTreeDepth(Family family) { return family == Family::kStagger ? 1 : 3; }

DriftScenario MakeSyntheticScenario(Family family, SyntheticScenario scenario,
                                    std::uint64_t seed, std::size_t n_rows, double noise_rate,
                                    const std::string& feature) {
  DriftScenario out;
  const auto [before, after] = ConceptPair(family);
  out.baseline.family = family;
  out.baseline.concept_id = before;
  out.baseline.n_rows = n_rows;
  out.baseline.seed = DeriveSeed(seed, 0);
  out.baseline.noise_rate = noise_rate;
  out.target = out.baseline;
  out.target.seed = DeriveSeed(seed, 1);
  if (scenario == SyntheticScenario::kConceptChange) {
    out.target.concept_id = after;
    return out;
  }
  if (family == Family::kStagger) {
    // Shift mass towards the first category of the chosen feature.
    out.perturbation = CategoryReweight{feature, {0.7, 0.15, 0.15}, DeriveSeed(seed, 2)};
  } else {
    out.perturbation = UniformMultiplier{feature, 0.0, 2.0, DeriveSeed(seed, 2)};
  }
  return out;
}

bool SyntheticResult::ok() const {
  return std::all_of(assertions.begin(), assertions.end(),
                     [](const SyntheticAssertion& a) { return a.ok; });
}

SyntheticResult RunSyntheticSuite(const SyntheticOptions& options) {
  SyntheticResult result;
  for (Family family : options.families) {
    const std::string feature =
        options.feature.empty() ? DefaultPerturbedFeature(family) : options.feature;
    for (SyntheticScenario scenario : options.scenarios) {
      for (std::uint64_t seed : options.seeds) {
        const DriftScenario spec = MakeSyntheticScenario(family, scenario, seed, options.n_rows,
                                                         options.noise_rate, feature);
        const ScenarioData data = ApplyScenario(spec);
        RunConfig config;
        config.schema = data.baseline.draft;
        config.label_column = std::string(kGeneratedLabel);
        config.hypothesis.kind = HypothesisKind::kTree;
        config.hypothesis.max_depth = SyntheticTreeDepth(family);
        config.factorization = PlanKind::kPerFeature;
        config.estimator.choice = EstimatorChoice::kExact;
        config.estimator.threads = options.threads;
        result.runs.push_back({family, scenario, seed, feature,
                               AttributeTables(data.baseline.table, data.target.table, config)});
      }
    }

    auto find = [&](SyntheticScenario s, std::uint64_t seed) -> const AttributionReport* {
      for (const auto& run : result.runs) {
        if (run.family == family && run.scenario == s && run.seed == seed) {
          return &run.report.report;
        }
      }
      return nullptr;
    };
    SyntheticAssertion dominates{family, "real-dominates"};
    SyntheticAssertion top{family, "perturbed-is-top"};
    SyntheticAssertion grows{family, "perturbed-grows"};
    for (std::uint64_t seed : options.seeds) {
      const AttributionReport* concept_run = find(SyntheticScenario::kConceptChange, seed);
      const AttributionReport* perturb = find(SyntheticScenario::kFeaturePerturb, seed);
      if (concept_run != nullptr) {
        ++dominates.total;
        dominates.passes += RealDominates(*concept_run);
      }
      if (perturb != nullptr) {
        ++top.total;
        top.passes += PerturbedIsTop(*perturb, feature);
      }
      if (concept_run != nullptr && perturb != nullptr) {
        ++grows.total;
        grows.passes += AbsPhi(*perturb, feature) > AbsPhi(*concept_run, feature);
      }
    }
    for (SyntheticAssertion* a : {&dominates, &top, &grows}) {
      if (a->total == 0) continue;
      const double needed = std::ceil(options.required_fraction * a->total - 1e-9);
      a->ok = static_cast<double>(a->passes) >= needed;
      result.assertions.push_back(*a);
    }
  }
  return result;
}

json ToyResultsToJson(const std::vector<ToyRow>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    const AttributionReport& r = row.report.report;
    out.push_back({{"scenario", ToyScenarioName(row.scenario)},
                   {"risk_baseline", r.risk_baseline.value},
                   {"risk_target", r.risk_target.value},
                   {"phi", {{"conditional", r.Phi("conditional")}, {"input", r.Phi("input")}}},
                   {"expected",
                    {{"risk_baseline", row.expected_risk_baseline},
                     {"risk_target", row.expected_risk_target},
                     {"conditional", row.expected_phi_conditional},
                     {"input", row.expected_phi_input}}},
                   {"pass", row.pass}});
  }
  return out;
}

json SyntheticResultToJson(const SyntheticResult& result) {
  json runs = json::array();
  for (const auto& run : result.runs) {
    json phi = json::object();
    for (const auto& p : run.report.report.players) phi[p.key] = p.phi;
    runs.push_back({{"family", FamilyName(run.family)},
                    {"scenario", SyntheticScenarioName(run.scenario)},
                    {"seed", run.seed},
                    {"feature", run.feature},
                    {"risk_baseline", run.report.report.risk_baseline.value},
                    {"risk_target", run.report.report.risk_target.value},
                    {"phi", phi}});
  }
  json assertions = json::array();
  for (const auto& a : result.assertions) {
    assertions.push_back({{"family", FamilyName(a.family)},
                          {"assertion", a.name},
                          {"passes", a.passes},
                          {"total", a.total},
                          {"ok", a.ok}});
  }
  return {{"runs", runs}, {"assertions", assertions}, {"ok", result.ok()}};
}

std::string RenderToyTable(const std::vector<ToyRow>& rows) {
  std::ostringstream out;
  out << "scenario        R_b       R_t       phi_cond  phi_input  status\n";
  for (const auto& row : rows) {
    const AttributionReport& r = row.report.report;
    std::string name(ToyScenarioName(row.scenario));
    name.resize(16, ' ');
    out << name << Fixed(r.risk_baseline.value, 6) << "  " << Fixed(r.risk_target.value, 6)
        << "  " << Fixed(r.Phi("conditional"), 6) << "  " << Fixed(r.Phi("input"), 6) << "   "
        << (row.pass ? "ok" : "FAIL") << "\n";
  }
  return out.str();
}

std::string RenderSyntheticTable(const SyntheticResult& result) {
  std::ostringstream out;
  out << "family   scenario         seed  R_b       R_t       phi_cond   top virtual\n";
  for (const auto& run : result.runs) {
    const AttributionReport& r = run.report.report;
    const PlayerAttribution* top = nullptr;
    for (const auto& p : r.players) {
      if (p.component.kind == ComponentKind::kConditional) continue;
      if (top == nullptr || std::fabs(p.phi) > std::fabs(top->phi)) top = &p;
    }
    std::string family(FamilyName(run.family));
    family.resize(9, ' ');
    std::string scenario(SyntheticScenarioName(run.scenario));
    scenario.resize(17, ' ');
    std::string seed = std::to_string(run.seed);
    seed.resize(6, ' ');
    out << family << scenario << seed << Fixed(r.risk_baseline.value) << "  "
        << Fixed(r.risk_target.value) << "  " << Fixed(r.Phi("conditional")) << "  "
        << (top ? top->key + "=" + Fixed(top->phi) : "-") << "\n";
  }
  out << "\n";
  for (const auto& a : result.assertions) {
    std::string family(FamilyName(a.family));
    family.resize(9, ' ');
    std::string name = a.name;
    name.resize(18, ' ');
    out << family << name << a.passes << "/" << a.total << "  " << (a.ok ? "ok" : "FAIL")
        << "\n";
  }
  return out.str();
}

void WritePlotData(const AttributionReport& report, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  RawTable table;
  table.columns = {"player", "phi"};
  for (const auto& player : report.players) {
    table.AddRow({player.key, FormatDouble(player.phi)});
  }
  WriteCsvFile(table, path);
}

}  // namespace driftshap
