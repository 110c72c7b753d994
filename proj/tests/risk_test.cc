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

#include <cmath>

#include "driftshap/error.h"
#include "driftshap/risk.h"
#include "test_support.h"

namespace driftshap {
namespace {

using testing::BruteForceRisk;

struct Problem {
  std::shared_ptr<FeatureSchema> schema;
  std::optional<Hypothesis> q;
  std::optional<LossFunction> loss;
  ConditionalTable conditional;
  InputDistribution input;
};

Problem RandomProblem(Rng& rng, bool joint, std::size_t max_features = 4) {
  Problem p;
  const std::size_t d = 1 + rng.UniformInt(max_features);
  std::vector<int> cards(d);
  for (int& c : cards) c = 2 + static_cast<int>(rng.UniformInt(3));
  const int classes = 2 + static_cast<int>(rng.UniformInt(2));
  p.schema = testing::CategoricalSchema(cards, classes);
  const double pick = rng.Uniform01();
  p.q = pick < 0.4   ? testing::RandomMap(rng, cards, classes)
        : pick < 0.7 ? testing::RandomRule(rng, *p.schema)
                     : testing::RandomTree(rng, p.schema, classes);
  p.loss = testing::RandomLoss(rng, classes);
  p.conditional = testing::RandomConditional(rng, cards, classes, 0.6);
  p.input = joint ? testing::RandomJoint(rng, cards) : testing::RandomFactored(rng, cards);
  return p;
}

TEST(RiskTest, JointInputMatchesDoubleSum) {
  Rng rng(100);
  for (int trial = 0; trial < 100; ++trial) {
    const Problem p = RandomProblem(rng, true);
    const RiskValue r = EvaluateRisk(*p.q, *p.loss, p.conditional, p.input);
    EXPECT_NEAR(r.value, BruteForceRisk(*p.q, *p.loss, p.conditional, p.input), 1e-12);
    EXPECT_EQ(r.route, RiskRoute::kJointSupport);
    EXPECT_NEAR(r.support_mass, 1.0, 1e-12);
  }
}

TEST(RiskTest, FactoredRoutesMatchDoubleSum) {
  Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const Problem p = RandomProblem(rng, false);
    const double oracle = BruteForceRisk(*p.q, *p.loss, p.conditional, p.input);
    const RiskValue decomposed = EvaluateRisk(*p.q, *p.loss, p.conditional, p.input);
    EXPECT_EQ(decomposed.route, RiskRoute::kDecomposed);
    EXPECT_NEAR(decomposed.value, oracle, 1e-12);
    RiskConfig enumerate;
    enumerate.method = RiskMethod::kEnumerate;
    const RiskValue full = EvaluateRisk(*p.q, *p.loss, p.conditional, p.input, enumerate);
    EXPECT_EQ(full.route, RiskRoute::kEnumerated);
    EXPECT_NEAR(full.value, oracle, 1e-12);
    EXPECT_NEAR(full.fallback_mass, decomposed.fallback_mass, 1e-12);
  }
}

TEST(RiskTest, FallbackMassCountsUnseenCells) {
  auto schema = testing::CategoricalSchema({3}, 2);
  const ConditionalTable table({{0}}, {1.0, 0.0}, {0.25, 0.75});
  const auto input = InputDistribution::Factored({{0.5, 0.3, 0.2}});
  PredictionMap map;
  map.default_class = 0;
  const auto q = Hypothesis::Map(map);
  const RiskValue r = EvaluateRisk(q, LossFunction::Misclassification(2), table, input);
  EXPECT_NEAR(r.fallback_mass, 0.5, 1e-15);
  // Seen cell: always right. Unseen: prior says class 1 with 0.75.
  EXPECT_NEAR(r.value, 0.5 * 0.75, 1e-15);
}

TEST(RiskTest, ScalingTheLossScalesTheRisk) {
  Rng rng(102);
  for (int trial = 0; trial < 40; ++trial) {
    const Problem p = RandomProblem(rng, trial % 2 == 0);
    const double base = EvaluateRisk(*p.q, *p.loss, p.conditional, p.input).value;
    const double scaled = EvaluateRisk(*p.q, p.loss->Scaled(3.5), p.conditional, p.input).value;
    EXPECT_NEAR(scaled, 3.5 * base, 1e-12);
  }
}

TEST(RiskTest, BoundedByMaxLoss) {
  Rng rng(103);
  for (int trial = 0; trial < 60; ++trial) {
    const Problem p = RandomProblem(rng, trial % 2 == 0);
    const double r = EvaluateRisk(*p.q, *p.loss, p.conditional, p.input).value;
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, p.loss->MaxLoss() + 1e-12);
  }
}

TEST(RiskTest, EnumerationBudget) {
  Rng rng(104);
  const std::vector<int> cards(6, 4);  // 4096 cells
  auto schema = testing::CategoricalSchema(cards, 2);
  const auto q = testing::RandomMap(rng, cards, 2);
  const auto table = testing::RandomConditional(rng, cards, 2);
  const auto input = testing::RandomFactored(rng, cards);
  const auto loss = LossFunction::Misclassification(2);
  RiskConfig config;
  config.method = RiskMethod::kEnumerate;
  config.cell_budget = 1000;
  config.sampling_fallback = false;
  try {
    EvaluateRisk(q, loss, table, input, config);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEnumerationOverflow);
  }
  config.sampling_fallback = true;
  config.samples = 20000;
  const RiskValue sampled = EvaluateRisk(q, loss, table, input, config);
  EXPECT_EQ(sampled.route, RiskRoute::kSampled);
  ASSERT_TRUE(sampled.standard_error.has_value());
  const double exact = EvaluateRiskDecomposed(q, loss, table, input.factored()).value;
  EXPECT_LE(std::fabs(sampled.value - exact), 5.0 * *sampled.standard_error + 1e-12);
}

TEST(RiskTest, SampledIsSeededAndUnbiased) {
  Rng rng(105);
  int within = 0;
  const int trials = 40;
  for (int trial = 0; trial < trials; ++trial) {
    const Problem p = RandomProblem(rng, false, 3);
    const double exact = EvaluateRisk(*p.q, *p.loss, p.conditional, p.input).value;
    const RiskValue a = EvaluateRiskSampled(*p.q, *p.loss, p.conditional, p.input, 4000, trial);
    const RiskValue b = EvaluateRiskSampled(*p.q, *p.loss, p.conditional, p.input, 4000, trial);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(*a.standard_error, *b.standard_error);
    within += std::fabs(a.value - exact) <= 3.0 * *a.standard_error + 1e-12;
  }
  // Under a normal approximation about 99.7% land within 3 standard errors.
  EXPECT_GE(within, trials - 3);
}

TEST(RiskTest, ShapeMismatchIsRejected) {
  auto schema = testing::CategoricalSchema({2}, 2);
  const ConditionalTable table({{0}}, {1.0, 0.0}, {0.5, 0.5});
  const auto input = InputDistribution::Factored({{0.5, 0.5}});
  PredictionMap map;
  const auto q = Hypothesis::Map(map);
  try {
    EvaluateRisk(q, LossFunction::Misclassification(3), table, input);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaMismatch);
  }
  map.default_class = 4;
  try {
    EvaluateRisk(Hypothesis::Map(map), LossFunction::Misclassification(2), table, input);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaMismatch);
  }
}

TEST(FactoredRiskWalkerTest, TracksDecomposedRiskUnderAnySwitchSequence) {
  Rng rng(106);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 1 + rng.UniformInt(5);
    std::vector<int> cards(d);
    for (int& c : cards) c = 2 + static_cast<int>(rng.UniformInt(3));
    const int classes = 2 + static_cast<int>(rng.UniformInt(2));
    auto schema = testing::CategoricalSchema(cards, classes);
    const Hypothesis q = trial % 2 ? testing::RandomMap(rng, cards, classes)
                                   : testing::RandomTree(rng, schema, classes);
    const auto loss = testing::RandomLoss(rng, classes);
    const auto bc = testing::RandomConditional(rng, cards, classes);
    const auto tc = testing::RandomConditional(rng, cards, classes);
    const auto bi = testing::RandomFactored(rng, cards).factored();
    const auto ti = testing::RandomFactored(rng, cards).factored();

    FactoredRiskWalker walker(q, loss, bc, tc, bi, ti);
    bool cond = false;
    std::vector<std::uint8_t> bits(d, 0);
    walker.Reset(cond, bits);
    for (int step = 0; step < 25; ++step) {
      const std::size_t which = rng.UniformInt(d + 1);
      if (which == d) {
        cond = !cond;
        walker.SetConditional(cond);
      } else {
        bits[which] ^= 1;
        walker.SetFeature(which, bits[which] != 0);
      }
      FactoredInput mixed;
      for (std::size_t f = 0; f < d; ++f) {
        mixed.marginals.push_back(bits[f] ? ti.marginals[f] : bi.marginals[f]);
      }
      const RiskValue want = EvaluateRiskDecomposed(q, loss, cond ? tc : bc, mixed);
      ASSERT_NEAR(walker.Value(), want.value, 1e-12) << "trial " << trial << " step " << step;
      ASSERT_NEAR(walker.FallbackMass(), want.fallback_mass, 1e-12);
    }
  }
}

}  // namespace
}  // namespace driftshap
