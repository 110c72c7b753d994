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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "driftshap/error.h"
#include "driftshap/generators.h"
#include "driftshap/numeric.h"

namespace driftshap {
namespace {

const std::vector<std::vector<std::string>> kStaggerValues = {
    {"small", "medium", "large"}, {"red", "green", "blue"}, {"square", "circle", "triangle"}};

// Row inputs as the numbers ConceptLabel expects.
std::vector<double> Inputs(const GeneratorSpec& spec, const std::vector<std::string>& row) {
  std::vector<double> x;
  for (std::size_t j = 0; j + 1 < row.size(); ++j) {
    if (spec.family == Family::kStagger) {
      const auto& values = kStaggerValues[j];
      x.push_back(static_cast<double>(std::find(values.begin(), values.end(), row[j]) -
                                      values.begin()));
    } else {
      double v = 0.0;
      EXPECT_TRUE(ParseDouble(row[j], &v));
      x.push_back(v);
    }
  }
  return x;
}

std::vector<double> Column(const RawTable& t, std::size_t c) {
  std::vector<double> out;
  for (const auto& row : t.rows) {
    double v = 0.0;
    ParseDouble(row[c], &v);
    out.push_back(v);
  }
  return out;
}

// Two-sample Kolmogorov-Smirnov statistic.
double KsStatistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / a.size() -
                              static_cast<double>(j) / b.size()));
  }
  return d;
}

GeneratorSpec Spec(Family family, double concept_id, std::size_t rows = 2000,
                   std::uint64_t seed = 1, double noise = 0.0) {
  GeneratorSpec s;
  s.family = family;
  s.concept_id = concept_id;
  s.n_rows = rows;
  s.seed = seed;
  s.noise_rate = noise;
  return s;
}

TEST(GeneratorTest, ConceptExamples) {
  EXPECT_EQ(ConceptLabel(Spec(Family::kSea, 8), {3, 4, 9.9}), 1);
  EXPECT_EQ(ConceptLabel(Spec(Family::kSea, 8), {5, 4, 0}), 0);
  EXPECT_EQ(ConceptLabel(Spec(Family::kSea, 9), {5, 4, 0}), 1);
  // size=small, color=red, any shape
  for (double shape : {0.0, 1.0, 2.0}) {
    EXPECT_EQ(ConceptLabel(Spec(Family::kStagger, 1), {0, 0, shape}), 1);
  }
  EXPECT_EQ(ConceptLabel(Spec(Family::kStagger, 1), {1, 0, 0}), 0);
  EXPECT_EQ(ConceptLabel(Spec(Family::kStagger, 2), {2, 2, 1}), 1);
  EXPECT_EQ(ConceptLabel(Spec(Family::kStagger, 3), {0, 1, 1}), 0);
  EXPECT_EQ(ConceptLabel(Spec(Family::kSine, 1), {0.25, 0.5}), 1);
  EXPECT_EQ(ConceptLabel(Spec(Family::kSine, 2), {0.25, 0.5}), 0);
  EXPECT_EQ(ConceptLabel(Spec(Family::kCircle, 1), {0.2, 0.5}), 1);
  EXPECT_EQ(ConceptLabel(Spec(Family::kCircle, 1), {0.6, 0.5}), 0);
  EXPECT_EQ(ConceptLabel(Spec(Family::kCircle, 4), {0.6, 0.5}), 1);
}

TEST(GeneratorTest, SameSeedSameTable) {
  for (Family f : {Family::kStagger, Family::kSea, Family::kSine, Family::kCircle, Family::kRbf}) {
    const auto spec = Spec(f, f == Family::kSea ? 8 : 1, 500, 9, 0.1);
    const auto a = Generate(spec);
    const auto b = Generate(spec);
    EXPECT_EQ(a.table.rows, b.table.rows);
    auto other = spec;
    other.seed = 10;
    EXPECT_NE(Generate(other).table.rows, a.table.rows);
  }
}

TEST(GeneratorTest, NoiselessLabelsFollowTheConcept) {
  const std::vector<std::pair<Family, std::vector<double>>> concepts = {
      {Family::kStagger, {1, 2, 3}},
      {Family::kSea, {8, 9, 7, 9.5}},
      {Family::kSine, {1, 2}},
      {Family::kCircle, {1, 2, 3, 4}}};
  for (const auto& [family, ids] : concepts) {
    for (double id : ids) {
      const auto spec = Spec(family, id, 3000, 4);
      const auto data = Generate(spec);
      for (const auto& row : data.table.rows) {
        ASSERT_EQ(std::stoi(row.back()), ConceptLabel(spec, Inputs(spec, row)))
            << FamilyName(family) << " " << id;
      }
    }
  }
}

TEST(GeneratorTest, FeatureShapesAndRanges) {
  const auto stagger = Generate(Spec(Family::kStagger, 1, 100));
  EXPECT_EQ(stagger.table.columns, (std::vector<std::string>{"size", "color", "shape", "y"}));
  EXPECT_EQ(stagger.draft.features[1].categories, kStaggerValues[1]);
  EXPECT_EQ(stagger.draft.features[0].kind, FeatureKind::kCategorical);

  const auto sea = Generate(Spec(Family::kSea, 8, 3000));
  EXPECT_EQ(sea.table.columns.size(), 4u);
  for (std::size_t c = 0; c < 3; ++c) {
    const auto v = Column(sea.table, c);
    EXPECT_GE(*std::min_element(v.begin(), v.end()), 0.0);
    EXPECT_LE(*std::max_element(v.begin(), v.end()), 10.0);
  }
  const auto sine = Generate(Spec(Family::kSine, 1, 3000));
  const auto x2 = Column(sine.table, 1);
  EXPECT_GE(*std::min_element(x2.begin(), x2.end()), -1.0);
  EXPECT_LE(*std::max_element(x2.begin(), x2.end()), 1.0);
  EXPECT_LT(*std::min_element(x2.begin(), x2.end()), -0.9);

  auto rbf = Spec(Family::kRbf, 3, 500);
  rbf.n_features = 15;
  rbf.n_classes = 3;
  const auto r = Generate(rbf);
  EXPECT_EQ(r.table.columns.size(), 16u);
  EXPECT_EQ(r.draft.label.classes.size(), 3u);
}

TEST(GeneratorTest, NoiseFlipsAboutTheRequestedFraction) {
  const auto spec = Spec(Family::kSea, 8, 20000, 3, 0.1);
  const auto data = Generate(spec);
  double flipped = 0.0;
  for (const auto& row : data.table.rows) {
    flipped += std::stoi(row.back()) != ConceptLabel(spec, Inputs(spec, row));
  }
  EXPECT_NEAR(flipped / 20000.0, 0.1, 0.01);
}

TEST(GeneratorTest, InvalidConcepts) {
  for (const auto& spec : {Spec(Family::kSea, 8.5), Spec(Family::kStagger, 4),
                           Spec(Family::kSine, 0), Spec(Family::kCircle, 5),
                           Spec(Family::kRbf, -1), Spec(Family::kRbf, 1.5)}) {
    try {
      Generate(spec);
      FAIL() << FamilyName(spec.family) << " " << spec.concept_id;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidConcept);
    }
  }
  EXPECT_THROW(Generate(Spec(Family::kSea, 8, 0)), Error);
  EXPECT_THROW(Generate(Spec(Family::kSea, 8, 10, 1, 1.0)), Error);
}

TEST(ScenarioTest, MultiplierOnCategoricalIsRejected) {
  DriftScenario s{Spec(Family::kStagger, 1), Spec(Family::kStagger, 1),
                  UniformMultiplier{"size", 0, 2, 1}};
  try {
    ApplyScenario(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPerturbCategorical);
  }
  s.perturbation = UniformMultiplier{"weight", 0, 2, 1};
  EXPECT_THROW(ApplyScenario(s), Error);
}

TEST(ScenarioTest, ConceptChangeKeepsInputsAndMovesTheBand) {
  DriftScenario s{Spec(Family::kSea, 8, 10000, DeriveSeed(7, 0)),
                  Spec(Family::kSea, 9, 10000, DeriveSeed(7, 1)), std::monostate{}};
  const auto data = ApplyScenario(s);
  // Equal in distribution: KS statistic below the alpha = 0.001 critical
  // value 1.95 * sqrt(2 / n).
  const double critical = 1.95 * std::sqrt(2.0 / 10000.0);
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_LT(KsStatistic(Column(data.baseline.table, c), Column(data.target.table, c)),
              critical);
  }
  // Under the same inputs, the two concepts disagree only in the band
  // 8 < x1 + x2 <= 9.
  for (const auto& row : data.target.table.rows) {
    const auto x = Inputs(s.target, row);
    const bool in_band = x[0] + x[1] > 8 && x[0] + x[1] <= 9;
    EXPECT_EQ(ConceptLabel(s.baseline, x) != ConceptLabel(s.target, x), in_band);
  }
}

TEST(ScenarioTest, PerturbationIsLabelledOnPerturbedValues) {
  DriftScenario s{Spec(Family::kSea, 8, 10000, DeriveSeed(3, 0)),
                  Spec(Family::kSea, 8, 10000, DeriveSeed(3, 1)),
                  UniformMultiplier{"x1", 0.0, 2.0, 99}};
  const auto data = ApplyScenario(s);
  const auto x1 = Column(data.target.table, 0);
  EXPECT_GE(*std::min_element(x1.begin(), x1.end()), 0.0);
  EXPECT_LE(*std::max_element(x1.begin(), x1.end()), 20.0);
  EXPECT_GT(*std::max_element(x1.begin(), x1.end()), 12.0);
  for (const auto& row : data.target.table.rows) {
    ASSERT_EQ(std::stoi(row.back()), ConceptLabel(s.target, Inputs(s.target, row)));
  }
  // Untouched features keep their distribution.
  const double critical = 1.95 * std::sqrt(2.0 / 10000.0);
  EXPECT_LT(KsStatistic(Column(data.baseline.table, 1), Column(data.target.table, 1)), critical);
  EXPECT_GT(KsStatistic(Column(data.baseline.table, 0), x1), critical);
}

TEST(ScenarioTest, CategoryReweight) {
  DriftScenario s{Spec(Family::kStagger, 1, 20000, 1), Spec(Family::kStagger, 1, 20000, 2),
                  CategoryReweight{"size", {0.7, 0.15, 0.15}, 5}};
  const auto data = ApplyScenario(s);
  double small = 0.0;
  for (const auto& row : data.target.table.rows) {
    small += row[0] == "small";
    ASSERT_EQ(std::stoi(row.back()), ConceptLabel(s.target, Inputs(s.target, row)));
  }
  EXPECT_NEAR(small / 20000.0, 0.7, 0.015);
  s.perturbation = CategoryReweight{"size", {1.0, 1.0}, 5};
  EXPECT_THROW(ApplyScenario(s), Error);
  s.baseline.family = s.target.family = Family::kSea;
  s.baseline.concept_id = s.target.concept_id = 8;
  s.perturbation = CategoryReweight{"x1", {1.0}, 5};
  EXPECT_THROW(ApplyScenario(s), Error);
}

TEST(ScenarioTest, ManifestRecordsTheScenario) {
  DriftScenario s{Spec(Family::kSea, 8), Spec(Family::kSea, 9),
                  UniformMultiplier{"x2", 0.5, 1.5, 4}};
  const auto doc = ScenarioToJson(s);
  EXPECT_EQ(doc.at("baseline").at("concept_id"), 8);
  EXPECT_EQ(doc.at("target").at("concept_id"), 9);
  EXPECT_EQ(doc.at("perturbation").at("kind"), "uniform-multiplier");
  EXPECT_EQ(doc.at("perturbation").at("low"), 0.5);
}

}  // namespace
}  // namespace driftshap
