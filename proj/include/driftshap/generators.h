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

#ifndef DRIFTSHAP_GENERATORS_H_
#define DRIFTSHAP_GENERATORS_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "driftshap/csv.h"
#include "driftshap/schema.h"
#include "json.hpp"

namespace driftshap {

enum class Family { kStagger, kSea, kSine, kCircle, kRbf };

std::string_view FamilyName(Family family);
// Throws kInvalidArgument.
Family ParseFamily(std::string_view name);

inline constexpr std::string_view kGeneratedLabel = "y";

// concept_id meaning per family:
//   stagger  1: size=small and color=red
//            2: color=green or shape=circle
//            3: size=medium or size=large
//   sea      threshold theta in {8, 9, 7, 9.5}; y = x1 + x2 <= theta
//   sine     1: y = x2 < sin(2 pi x1); 2: the complement
//   circle   1..4: y = (x1-c1)^2 + (x2-c2)^2 <= r^2 with
//            (c1, c2, r) = (0.2,0.5,0.15) (0.4,0.5,0.2) (0.6,0.5,0.25) (0.8,0.5,0.3)
//   rbf      seed of the centroid model (any non-negative value)
struct GeneratorSpec {
  Family family = Family::kSea;
  double concept_id = 8;
  std::size_t n_rows = 1000;
  std::uint64_t seed = 0;
  double noise_rate = 0.0;
  // rbf only
  std::size_t n_features = 10;
  std::size_t n_centroids = 50;
  int n_classes = 2;
};

// Multiplies the target's values of one continuous feature by i.i.d.
// uniform(low, high) draws.
struct UniformMultiplier {
  std::string feature;
  double low = 0.0;
  double high = 2.0;
  std::uint64_t seed = 0;
};

// Redraws one categorical feature of the target from `weights` (one per
// category, normalised internally).
struct CategoryReweight {
  std::string feature;
  std::vector<double> weights;
  std::uint64_t seed = 0;
};

using Perturbation = std::variant<std::monostate, UniformMultiplier, CategoryReweight>;

struct DriftScenario {
  GeneratorSpec baseline;
  GeneratorSpec target;
  Perturbation perturbation;
};

struct GeneratedData {
  RawTable table;
  // Continuous features carry the default binning; categorical ones their
  // full category list.
  FeatureSchema draft;
};

struct ScenarioData {
  GeneratedData baseline;
  GeneratedData target;
};

// Throws kInvalidConcept.
void ValidateSpec(const GeneratorSpec& spec);

// Label of an input point under a family concept, before noise. Categorical
// STAGGER features are passed as category indices. Not defined for rbf.
int ConceptLabel(const GeneratorSpec& spec, const std::vector<double>& x);

FeatureSchema DraftSchema(const GeneratorSpec& spec);

GeneratedData Generate(const GeneratorSpec& spec);

// The perturbation is applied to the target inputs before labelling, so the
// target labels follow the unchanged concept on the perturbed values.
// Throws kInvalidConcept, kPerturbCategorical, kSchemaMismatch (unknown
// feature) and kInvalidArgument (baseline and target families differ).
ScenarioData ApplyScenario(const DriftScenario& scenario);

nlohmann::json SpecToJson(const GeneratorSpec& spec);
nlohmann::json ScenarioToJson(const DriftScenario& scenario);

}  // namespace driftshap

#endif  // DRIFTSHAP_GENERATORS_H_
