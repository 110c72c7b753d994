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

#include "driftshap/distributions.h"
#include "driftshap/error.h"
#include "test_support.h"

namespace driftshap {
namespace {

BinnedDataset Dataset(std::shared_ptr<const FeatureSchema> schema, std::vector<Cell> cells,
                      std::vector<int> labels, std::vector<double> weights,
                      PopulationTag tag = PopulationTag::kBaseline) {
  BinnedDataset d;
  d.schema = std::move(schema);
  d.cells = std::move(cells);
  d.labels = std::move(labels);
  d.weights = std::move(weights);
  d.tag = tag;
  return d;
}

TEST(ConditionalEstimateTest, WeightedFrequencies) {
  auto schema = testing::CategoricalSchema({2, 2}, 2);
  const auto data = Dataset(schema, {{0, 0}, {0, 0}, {0, 0}, {1, 1}}, {0, 1, 1, 0},
                            {1.0, 1.0, 2.0, 4.0});
  const ConditionalTable t = EstimateConditional(data, 0.0);
  ASSERT_EQ(t.num_cells(), 2u);
  const auto row = t.Lookup({0, 0});
  EXPECT_DOUBLE_EQ(row[0], 0.25);
  EXPECT_DOUBLE_EQ(row[1], 0.75);
  EXPECT_EQ(t.Lookup({1, 1})[0], 1.0);
  // prior = (1 + 4, 1 + 2) / 8
  EXPECT_DOUBLE_EQ(t.prior()[0], 5.0 / 8.0);
  EXPECT_DOUBLE_EQ(t.prior()[1], 3.0 / 8.0);
}

TEST(ConditionalEstimateTest, LaplaceSmoothing) {
  auto schema = testing::CategoricalSchema({2}, 3);
  const auto data = Dataset(schema, {{0}, {0}}, {2, 2}, {1.0, 1.0});
  const ConditionalTable t = EstimateConditional(data, 1.0);
  const auto row = t.Lookup({0});
  EXPECT_DOUBLE_EQ(row[0], 1.0 / 5.0);
  EXPECT_DOUBLE_EQ(row[2], 3.0 / 5.0);
}

TEST(ConditionalEstimateTest, UnseenCellsFallBackToPrior) {
  auto schema = testing::CategoricalSchema({3}, 2);
  const auto data = Dataset(schema, {{0}, {1}}, {0, 1}, {3.0, 1.0});
  const ConditionalTable t = EstimateConditional(data, 0.0);
  bool used_prior = false;
  const auto row = t.Lookup({2}, &used_prior);
  EXPECT_TRUE(used_prior);
  EXPECT_DOUBLE_EQ(row[0], 0.75);
  t.Lookup({1}, &used_prior);
  EXPECT_FALSE(used_prior);
}

TEST(ConditionalEstimateTest, CoverageIsWeightedFraction) {
  auto schema = testing::CategoricalSchema({3}, 2);
  const auto base = Dataset(schema, {{0}, {1}}, {0, 1}, {1.0, 1.0});
  const auto target =
      Dataset(schema, {{0}, {2}, {2}}, {0, 1, 1}, {1.0, 1.0, 2.0}, PopulationTag::kTarget);
  ConditionalTable t = EstimateConditional(base, 0.0);
  EXPECT_EQ(t.coverage().at(PopulationTag::kBaseline), 1.0);
  EXPECT_DOUBLE_EQ(t.CoverageOf(target), 0.25);
}

TEST(ConditionalTableTest, ValidatesRows) {
  EXPECT_THROW(ConditionalTable({{0}}, {0.5, 0.6}, {0.5, 0.5}), Error);
  EXPECT_THROW(ConditionalTable({{0}}, {-0.5, 1.5}, {0.5, 0.5}), Error);
  EXPECT_THROW(ConditionalTable({{0}}, {1.0}, {0.5, 0.5}), Error);
}

TEST(ConditionalTableTest, StorageOrderIgnoresInsertionOrder) {
  const ConditionalTable a({{1}, {0}}, {0.2, 0.8, 0.6, 0.4}, {0.5, 0.5});
  const ConditionalTable b({{0}, {1}}, {0.6, 0.4, 0.2, 0.8}, {0.5, 0.5});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.cells().front(), (Cell{0}));
}

TEST(InputEstimateTest, JointAndFactoredForms) {
  auto schema = testing::CategoricalSchema({2, 3}, 2);
  const auto data = Dataset(schema, {{0, 0}, {0, 2}, {1, 2}, {1, 2}}, {0, 0, 1, 1},
                            {1.0, 1.0, 1.0, 1.0});
  const auto joint = EstimateInput(data, FactorizationPlan::TwoPlayer(2), 0.0);
  ASSERT_TRUE(joint.is_joint());
  EXPECT_EQ(joint.joint().cells.size(), 3u);
  EXPECT_EQ(joint.joint().probabilities.back(), 0.5);

  const auto factored = EstimateInput(data, FactorizationPlan::PerFeature(2), 1.0);
  ASSERT_FALSE(factored.is_joint());
  const auto& m = factored.factored().marginals;
  EXPECT_DOUBLE_EQ(m[0][0], 3.0 / 6.0);
  EXPECT_DOUBLE_EQ(m[1][1], 1.0 / 7.0);
  EXPECT_DOUBLE_EQ(m[1][2], 4.0 / 7.0);
}

TEST(InputDistributionTest, ValidatesProbabilities) {
  EXPECT_THROW(InputDistribution::Joint({{0}, {1}}, {0.5, 0.6}), Error);
  EXPECT_THROW(InputDistribution::Joint({{0}, {0}}, {0.5, 0.5}), Error);
  EXPECT_THROW(InputDistribution::Factored({{0.5, 0.4}}), Error);
  EXPECT_NO_THROW(InputDistribution::Factored({{0.5, 0.5}, {1.0}}));
}

TEST(FactorizationPlanTest, BuiltInPlans) {
  const auto two = FactorizationPlan::TwoPlayer(3);
  EXPECT_EQ(two.k(), 2u);
  EXPECT_FALSE(two.factored());
  const auto per = FactorizationPlan::PerFeature(3);
  EXPECT_EQ(per.k(), 4u);
  EXPECT_TRUE(per.factored());
  EXPECT_EQ(per.conditional_player(), 0u);
  EXPECT_EQ(per.marginal_player(2), 3u);
}

TEST(FactorizationPlanTest, RejectsInvalidPlans) {
  const DistributionComponent cond{ComponentKind::kConditional, 0};
  const DistributionComponent m0{ComponentKind::kInputMarginal, 0};
  const DistributionComponent joint{ComponentKind::kInputJoint, 0};
  for (auto players : std::vector<std::vector<DistributionComponent>>{
           {cond},                     // too few
           {cond, m0},                 // feature 1 has no marginal
           {cond, m0, m0},             // duplicate
           {m0, joint},                // no conditional
           {cond, joint, m0}}) {       // mixed input forms
    try {
      FactorizationPlan(players, 2);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kPlanMismatch);
    }
  }
}

TEST(SurrogateAssignmentTest, MaskAndKey) {
  const auto s = SurrogateAssignment::FromMask(0b101, 4);
  EXPECT_EQ(s.Key(), "1010");
  EXPECT_TRUE(s[0]);
  EXPECT_FALSE(s[1]);
  EXPECT_EQ(SurrogateAssignment::AllOnes(3).Key(), "111");
}

TEST(HybridTest, SelectsComponentsPerBit) {
  Rng rng(5);
  const std::vector<int> cards = {2, 3};
  PopulationDistributions base{PopulationTag::kBaseline, testing::RandomConditional(rng, cards, 2),
                               testing::RandomFactored(rng, cards)};
  PopulationDistributions targ{PopulationTag::kTarget, testing::RandomConditional(rng, cards, 2),
                               testing::RandomFactored(rng, cards)};
  const auto plan = FactorizationPlan::PerFeature(2);
  const auto h = AssembleHybrid(base, targ, plan, SurrogateAssignment::FromMask(0b100, 3));
  EXPECT_EQ(h.conditional, &base.conditional);
  EXPECT_EQ(h.input.factored().marginals[0], base.input.factored().marginals[0]);
  EXPECT_EQ(h.input.factored().marginals[1], targ.input.factored().marginals[1]);
  const auto all = AssembleHybrid(base, targ, plan, SurrogateAssignment::AllOnes(3));
  EXPECT_EQ(all.conditional, &targ.conditional);
  EXPECT_EQ(all.input, targ.input);
  EXPECT_THROW(AssembleHybrid(base, targ, plan, SurrogateAssignment::AllOnes(2)), Error);
}

TEST(ComponentKeyTest, Names) {
  auto schema = testing::CategoricalSchema({2, 2}, 2);
  EXPECT_EQ(ComponentKey({ComponentKind::kConditional, 0}, *schema), "conditional");
  EXPECT_EQ(ComponentKey({ComponentKind::kInputJoint, 0}, *schema), "input");
  EXPECT_EQ(ComponentKey({ComponentKind::kInputMarginal, 1}, *schema), "f1");
}

}  // namespace
}  // namespace driftshap
