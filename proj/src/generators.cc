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

#include "driftshap/generators.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "driftshap/error.h"
#include "driftshap/numeric.h"

namespace driftshap {
namespace {

using nlohmann::json;

constexpr std::uint64_t kInputStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kCentroidStream = 3;
constexpr std::uint64_t kPerturbStream = 4;

const std::array<std::vector<std::string>, 3> kStaggerCategories = {
    std::vector<std::string>{"small", "medium", "large"},
    std::vector<std::string>{"red", "green", "blue"},
    std::vector<std::string>{"square", "circle", "triangle"}};
const std::array<std::string, 3> kStaggerNames = {"size", "color", "shape"};

struct CircleConcept {
  double c1, c2, r;
};
constexpr std::array<CircleConcept, 4> kCircles = {
    {{0.2, 0.5, 0.15}, {0.4, 0.5, 0.2}, {0.6, 0.5, 0.25}, {0.8, 0.5, 0.3}}};

constexpr std::array<double, 4> kSeaThresholds = {8.0, 9.0, 7.0, 9.5};

struct Centroid {
  std::vector<double> centre;
  int label;
  double stddev;
};

std::vector<Centroid> RbfModel(const GeneratorSpec& spec, std::vector<double>* weights) {
  Rng rng(DeriveSeed(static_cast<std::uint64_t>(spec.concept_id), kCentroidStream));
  std::vector<Centroid> model(spec.n_centroids);
  weights->assign(spec.n_centroids, 0.0);
  for (std::size_t c = 0; c < spec.n_centroids; ++c) {
    model[c].centre.resize(spec.n_features);
    for (double& v : model[c].centre) v = rng.Uniform01();
    model[c].label = static_cast<int>(rng.UniformInt(static_cast<std::uint64_t>(spec.n_classes)));
    model[c].stddev = rng.Uniform01();
    (*weights)[c] = rng.Uniform01();
  }
  return model;
}

std::size_t NumFeatures(const GeneratorSpec& spec) {
  switch (spec.family) {
    case Family::kStagger:
    case Family::kSea:
      return 3;
    case Family::kSine:
    case Family::kCircle:
      return 2;
    case Family::kRbf:
      return spec.n_features;
  }
  return 0;
}

std::vector<std::string> FeatureNames(const GeneratorSpec& spec) {
  if (spec.family == Family::kStagger) {
    return {kStaggerNames.begin(), kStaggerNames.end()};
  }
  std::vector<std::string> names;
  for (std::size_t i = 0; i < NumFeatures(spec); ++i) names.push_back("x" + std::to_string(i + 1));
  return names;
}

// Draws unlabelled inputs; for rbf also the label of the generating centroid.
std::vector<std::vector<double>> SampleInputs(const GeneratorSpec& spec,
                                              std::vector<int>* centroid_labels) {
  Rng rng(DeriveSeed(spec.seed, kInputStream));
  const std::size_t d = NumFeatures(spec);
  std::vector<std::vector<double>> rows(spec.n_rows, std::vector<double>(d));
  std::vector<double> weights;
  std::vector<Centroid> model;
  if (spec.family == Family::kRbf) {
    model = RbfModel(spec, &weights);
    centroid_labels->resize(spec.n_rows);
  }
  for (std::size_t r = 0; r < spec.n_rows; ++r) {
    auto& x = rows[r];
    switch (spec.family) {
      case Family::kStagger:
        for (double& v : x) v = static_cast<double>(rng.UniformInt(3));
        break;
      case Family::kSea:
        for (double& v : x) v = rng.Uniform(0.0, 10.0);
        break;
      case Family::kSine:
        x[0] = rng.Uniform01();
        x[1] = rng.Uniform(-1.0, 1.0);
        break;
      case Family::kCircle:
        x[0] = rng.Uniform01();
        x[1] = rng.Uniform01();
        break;
      case Family::kRbf: {
        const Centroid& c = model[rng.Categorical(weights)];
        std::vector<double> direction(d);
        double norm = 0.0;
        for (double& v : direction) {
          v = rng.Uniform(-1.0, 1.0);
          norm += v * v;
        }
        norm = std::sqrt(norm);
        const double magnitude = rng.Normal() * c.stddev;
        for (std::size_t j = 0; j < d; ++j) {
          x[j] = c.centre[j] + (norm > 0.0 ? direction[j] / norm : 0.0) * magnitude;
        }
        (*centroid_labels)[r] = c.label;
        break;
      }
    }
  }
  return rows;
}

std::size_t FeatureIndex(const GeneratorSpec& spec, const std::string& name) {
  const auto names = FeatureNames(spec);
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw Error(ErrorCode::kSchemaMismatch, "generator " + std::string(FamilyName(spec.family)) +
                                                " has no feature '" + name + "'");
  }
  return static_cast<std::size_t>(it - names.begin());
}

void Perturb(const GeneratorSpec& spec, const Perturbation& perturbation,
             std::vector<std::vector<double>>* rows) {
  if (const auto* m = std::get_if<UniformMultiplier>(&perturbation)) {
    const std::size_t f = FeatureIndex(spec, m->feature);
    if (spec.family == Family::kStagger) {
      throw Error(ErrorCode::kPerturbCategorical,
                  "uniform multiplier on categorical feature '" + m->feature + "'");
    }
    if (!(m->low <= m->high) || !std::isfinite(m->low) || !std::isfinite(m->high)) {
      throw Error(ErrorCode::kInvalidArgument, "multiplier bounds must satisfy low <= high");
    }
    Rng rng(DeriveSeed(m->seed, kPerturbStream));
    for (auto& x : *rows) x[f] *= rng.Uniform(m->low, m->high);
  } else if (const auto* c = std::get_if<CategoryReweight>(&perturbation)) {
    const std::size_t f = FeatureIndex(spec, c->feature);
    if (spec.family != Family::kStagger) {
      throw Error(ErrorCode::kInvalidArgument,
                  "category reweight on continuous feature '" + c->feature + "'");
    }
    double total = 0.0;
    for (double w : c->weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw Error(ErrorCode::kInvalidArgument, "category weights must be non-negative");
      }
      total += w;
    }
    if (c->weights.size() != kStaggerCategories[f].size() || total <= 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "need one weight per category of '" + c->feature + "' with a positive sum");
    }
    Rng rng(DeriveSeed(c->seed, kPerturbStream));
    for (auto& x : *rows) x[f] = static_cast<double>(rng.Categorical(c->weights));
  }
}

GeneratedData Build(const GeneratorSpec& spec, const Perturbation& perturbation) {
  ValidateSpec(spec);
  std::vector<int> centroid_labels;
  auto rows = SampleInputs(spec, &centroid_labels);
  Perturb(spec, perturbation, &rows);

  GeneratedData out;
  out.draft = DraftSchema(spec);
  for (const auto& f : out.draft.features) out.table.columns.push_back(f.name);
  out.table.columns.emplace_back(kGeneratedLabel);

  Rng noise(DeriveSeed(spec.seed, kNoiseStream));
  const int classes = spec.family == Family::kRbf ? spec.n_classes : 2;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& x = rows[r];
    int label = spec.family == Family::kRbf ? centroid_labels[r] : ConceptLabel(spec, x);
    if (spec.noise_rate > 0.0 && noise.Uniform01() < spec.noise_rate) {
      // Flip to a different class, uniformly among the others.
      const int shift = 1 + static_cast<int>(noise.UniformInt(static_cast<std::uint64_t>(classes - 1)));
      label = (label + shift) % classes;
    }
    std::vector<std::string> cells;
    cells.reserve(x.size() + 1);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (spec.family == Family::kStagger) {
        cells.push_back(kStaggerCategories[j][static_cast<std::size_t>(x[j])]);
      } else {
        cells.push_back(FormatDouble(x[j]));
      }
    }
    cells.push_back(std::to_string(label));
    out.table.AddRow(std::move(cells));
  }
  return out;
}

json PerturbationToJson(const Perturbation& perturbation) {
  if (const auto* m = std::get_if<UniformMultiplier>(&perturbation)) {
    return {{"kind", "uniform-multiplier"},
            {"feature", m->feature},
            {"low", m->low},
            {"high", m->high},
            {"seed", m->seed}};
  }
  if (const auto* c = std::get_if<CategoryReweight>(&perturbation)) {
    return {{"kind", "category-reweight"},
            {"feature", c->feature},
            {"weights", c->weights},
            {"seed", c->seed}};
  }
  return {{"kind", "none"}};
}

}  // namespace

std::string_view FamilyName(Family family) {
  switch (family) {
    case Family::kStagger:
      return "stagger";
    case Family::kSea:
      return "sea";
    case Family::kSine:
      return "sine";
    case Family::kCircle:
      return "circle";
    case Family::kRbf:
      return "rbf";
  }
  return "";
}

Family ParseFamily(std::string_view name) {
  for (Family f : {Family::kStagger, Family::kSea, Family::kSine, Family::kCircle, Family::kRbf}) {
    if (FamilyName(f) == name) return f;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown generator family '" + std::string(name) + "'");
}

void ValidateSpec(const GeneratorSpec& spec) {
  const double id = spec.concept_id;
  bool valid = false;
  switch (spec.family) {
    case Family::kStagger:
      valid = id == 1 || id == 2 || id == 3;
      break;
    case Family::kSea:
      valid = std::find(kSeaThresholds.begin(), kSeaThresholds.end(), id) != kSeaThresholds.end();
      break;
    case Family::kSine:
      valid = id == 1 || id == 2;
      break;
    case Family::kCircle:
      valid = id == 1 || id == 2 || id == 3 || id == 4;
      break;
    case Family::kRbf:
      valid = id >= 0 && id == std::floor(id) && id < 9007199254740992.0;
      break;
  }
  if (!valid) {
    throw Error(ErrorCode::kInvalidConcept, "concept " + FormatDouble(id) + " is not defined for " +
                                                std::string(FamilyName(spec.family)));
  }
  if (spec.n_rows == 0) throw Error(ErrorCode::kInvalidArgument, "n_rows must be positive");
  if (!(spec.noise_rate >= 0.0 && spec.noise_rate < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "noise_rate must lie in [0, 1)");
  }
  if (spec.family == Family::kRbf &&
      (spec.n_features == 0 || spec.n_centroids == 0 || spec.n_classes < 2)) {
    throw Error(ErrorCode::kInvalidArgument,
                "rbf needs at least one feature, one centroid and two classes");
  }
}

int ConceptLabel(const GeneratorSpec& spec, const std::vector<double>& x) {
  switch (spec.family) {
    case Family::kStagger: {
      const int size = static_cast<int>(x[0]);
      const int color = static_cast<int>(x[1]);
      const int shape = static_cast<int>(x[2]);
      if (spec.concept_id == 1) return size == 0 && color == 0;
      if (spec.concept_id == 2) return color == 1 || shape == 1;
      return size == 1 || size == 2;
    }
    case Family::kSea:
      return x[0] + x[1] <= spec.concept_id;
    case Family::kSine: {
      const bool below = x[1] < std::sin(2.0 * std::numbers::pi * x[0]);
      return spec.concept_id == 1 ? below : !below;
    }
    case Family::kCircle: {
      const CircleConcept& c = kCircles[static_cast<std::size_t>(spec.concept_id) - 1];
      const double dx = x[0] - c.c1;
      const double dy = x[1] - c.c2;
      return dx * dx + dy * dy <= c.r * c.r;
    }
    case Family::kRbf:
      break;
  }
  throw Error(ErrorCode::kInvalidArgument, "rbf labels come from the centroid model");
}

FeatureSchema DraftSchema(const GeneratorSpec& spec) {
  FeatureSchema schema;
  const auto names = FeatureNames(spec);
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (spec.family == Family::kStagger) {
      schema.features.push_back(FeatureSpec::Categorical(names[j], kStaggerCategories[j]));
    } else {
      schema.features.push_back(FeatureSpec::Continuous(names[j]));
    }
  }
  schema.label.column = std::string(kGeneratedLabel);
  const int classes = spec.family == Family::kRbf ? spec.n_classes : 2;
  for (int c = 0; c < classes; ++c) schema.label.classes.push_back(std::to_string(c));
  return schema;
}

GeneratedData Generate(const GeneratorSpec& spec) { return Build(spec, std::monostate{}); }

ScenarioData ApplyScenario(const DriftScenario& scenario) {
  if (scenario.baseline.family != scenario.target.family) {
    throw Error(ErrorCode::kInvalidArgument, "baseline and target must use the same family");
  }
  if (scenario.baseline.family == Family::kRbf &&
      (scenario.baseline.n_features != scenario.target.n_features ||
       scenario.baseline.n_classes != scenario.target.n_classes)) {
    throw Error(ErrorCode::kInvalidArgument, "rbf baseline and target shapes differ");
  }
  ValidateSpec(scenario.baseline);
  ScenarioData data;
  data.target = Build(scenario.target, scenario.perturbation);
  data.baseline = Build(scenario.baseline, std::monostate{});
  return data;
}

json SpecToJson(const GeneratorSpec& spec) {
  json doc = {{"family", FamilyName(spec.family)},
              {"concept_id", spec.concept_id},
              {"n_rows", spec.n_rows},
              {"seed", spec.seed},
              {"noise_rate", spec.noise_rate}};
  if (spec.family == Family::kRbf) {
    doc["n_features"] = spec.n_features;
    doc["n_centroids"] = spec.n_centroids;
    doc["n_classes"] = spec.n_classes;
  }
  return doc;
}

json ScenarioToJson(const DriftScenario& scenario) {
  return {{"baseline", SpecToJson(scenario.baseline)},
          {"target", SpecToJson(scenario.target)},
          {"perturbation", PerturbationToJson(scenario.perturbation)}};
}

}  // namespace driftshap
