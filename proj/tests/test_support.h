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

#ifndef DRIFTSHAP_TESTS_TEST_SUPPORT_H_
#define DRIFTSHAP_TESTS_TEST_SUPPORT_H_

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "driftshap/distributions.h"
#include "driftshap/hypothesis.h"
#include "driftshap/numeric.h"
#include "driftshap/risk.h"
#include "driftshap/schema.h"
#include "driftshap/shapley.h"

namespace driftshap::testing {

inline std::vector<double> RandomSimplex(Rng& rng, std::size_t n, double zero_prob = 0.0) {
  std::vector<double> p(n);
  double total = 0.0;
  for (double& v : p) {
    v = rng.Uniform01() < zero_prob ? 0.0 : rng.Uniform(0.05, 1.0);
    total += v;
  }
  if (total == 0.0) {
    p[rng.UniformInt(n)] = 1.0;
    return p;
  }
  for (double& v : p) v /= total;
  return p;
}

// Every cell of the product domain, in lexicographic order.
inline std::vector<Cell> AllCells(const std::vector<int>& cards) {
  std::vector<Cell> cells;
  Cell cell(cards.size(), 0);
  while (true) {
    cells.push_back(cell);
    std::size_t f = 0;
    while (f < cards.size() && ++cell[f] == cards[f]) cell[f++] = 0;
    if (f == cards.size()) break;
  }
  return cells;
}

inline std::shared_ptr<FeatureSchema> CategoricalSchema(const std::vector<int>& cards,
                                                        int num_classes) {
  auto schema = std::make_shared<FeatureSchema>();
  for (std::size_t f = 0; f < cards.size(); ++f) {
    std::vector<std::string> cats;
    for (int v = 0; v < cards[f]; ++v) cats.push_back(std::to_string(v));
    schema->features.push_back(FeatureSpec::Categorical("f" + std::to_string(f), cats));
  }
  schema->label.column = "y";
  for (int c = 0; c < num_classes; ++c) schema->label.classes.push_back(std::to_string(c));
  return schema;
}

// Random P(y | x) over a random subset of the domain (at least one cell).
inline ConditionalTable RandomConditional(Rng& rng, const std::vector<int>& cards,
                                          int num_classes, double keep = 0.8) {
  std::vector<Cell> cells;
  std::vector<double> probs;
  for (const Cell& c : AllCells(cards)) {
    if (rng.Uniform01() >= keep) continue;
    cells.push_back(c);
    const auto row = RandomSimplex(rng, static_cast<std::size_t>(num_classes), 0.3);
    probs.insert(probs.end(), row.begin(), row.end());
  }
  if (cells.empty()) {
    cells.push_back(Cell(cards.size(), 0));
    const auto row = RandomSimplex(rng, static_cast<std::size_t>(num_classes));
    probs.insert(probs.end(), row.begin(), row.end());
  }
  return ConditionalTable(std::move(cells), std::move(probs),
                          RandomSimplex(rng, static_cast<std::size_t>(num_classes)));
}

inline InputDistribution RandomJoint(Rng& rng, const std::vector<int>& cards) {
  const auto all = AllCells(cards);
  std::vector<Cell> cells;
  for (const Cell& c : all) {
    if (rng.Uniform01() < 0.85) cells.push_back(c);
  }
  if (cells.empty()) cells.push_back(all[rng.UniformInt(all.size())]);
  return InputDistribution::Joint(cells, RandomSimplex(rng, cells.size()));
}

inline InputDistribution RandomFactored(Rng& rng, const std::vector<int>& cards) {
  std::vector<std::vector<double>> marginals;
  for (int c : cards) marginals.push_back(RandomSimplex(rng, static_cast<std::size_t>(c), 0.15));
  return InputDistribution::Factored(std::move(marginals));
}

inline Hypothesis RandomMap(Rng& rng, const std::vector<int>& cards, int num_classes) {
  PredictionMap map;
  for (const Cell& c : AllCells(cards)) {
    if (rng.Uniform01() < 0.9) {
      map.entries.emplace(c, static_cast<int>(rng.UniformInt(num_classes)));
    }
  }
  map.default_class = static_cast<int>(rng.UniformInt(num_classes));
  return Hypothesis::Map(std::move(map));
}

inline Hypothesis RandomRule(Rng& rng, const FeatureSchema& schema) {
  const std::size_t d = schema.num_features();
  auto atom = [&] {
    const std::size_t f = rng.UniformInt(d);
    std::string text = schema.features[f].name;
    if (rng.Uniform01() < 0.5) {
      text += "=" + std::to_string(rng.UniformInt(schema.features[f].categories.size()));
    }
    return rng.Uniform01() < 0.3 ? "not " + text : text;
  };
  std::string text = atom();
  const std::size_t terms = 1 + rng.UniformInt(3);
  for (std::size_t i = 0; i < terms; ++i) {
    text = "(" + text + (rng.Uniform01() < 0.5 ? " and " : " or ") + atom() + ")";
  }
  return Hypothesis::Rule(ParseRule(text, schema), 1, 0);
}

// A tree trained on a random labelled sample of the domain.
inline Hypothesis RandomTree(Rng& rng, std::shared_ptr<const FeatureSchema> schema,
                             int num_classes) {
  BinnedDataset data;
  data.schema = schema;
  const auto cells = AllCells(schema->Cardinalities());
  for (int i = 0; i < 40; ++i) {
    data.cells.push_back(cells[rng.UniformInt(cells.size())]);
    data.labels.push_back(static_cast<int>(rng.UniformInt(num_classes)));
    data.weights.push_back(1.0);
  }
  return Hypothesis::Tree(TrainTree(data, 1 + static_cast<int>(rng.UniformInt(3))));
}

inline LossFunction RandomLoss(Rng& rng, int num_classes) {
  if (rng.Uniform01() < 0.5) return LossFunction::Misclassification(num_classes);
  std::vector<std::vector<double>> costs(num_classes, std::vector<double>(num_classes, 0.0));
  for (int a = 0; a < num_classes; ++a) {
    for (int p = 0; p < num_classes; ++p) {
      if (a != p) costs[a][p] = rng.Uniform(0.1, 5.0);
    }
  }
  return LossFunction::CostMatrix(costs);
}

// One randomised attribution problem. k = 2 uses the two-player plan over a
// joint input; k >= 3 uses the per-feature plan with k - 1 features.
struct Instance {
  std::shared_ptr<const FeatureSchema> schema;
  std::optional<Hypothesis> q;
  std::optional<LossFunction> loss;
  PopulationDistributions base;
  PopulationDistributions target;
  std::optional<FactorizationPlan> plan;

  DistributionValueFunction Game(bool swapped = false, RiskConfig risk = {}) const {
    PopulationDistributions b = swapped ? target : base;
    PopulationDistributions t = swapped ? base : target;
    return DistributionValueFunction(schema, *q, *loss, std::move(b), std::move(t), *plan, risk);
  }
};

inline Instance RandomInstance(Rng& rng, std::size_t k) {
  Instance inst;
  const bool two_player = k == 2;
  const std::size_t d = two_player ? 1 + rng.UniformInt(3) : k - 1;
  const int classes = 2 + static_cast<int>(rng.UniformInt(2));
  std::vector<int> cards(d);
  for (int& c : cards) c = 2 + static_cast<int>(rng.UniformInt(2));
  auto schema = CategoricalSchema(cards, classes);
  inst.schema = schema;
  const double pick = rng.Uniform01();
  if (pick < 0.4) {
    inst.q = RandomMap(rng, cards, classes);
  } else if (pick < 0.7) {
    inst.q = RandomRule(rng, *schema);
  } else {
    inst.q = RandomTree(rng, schema, classes);
  }
  inst.loss = RandomLoss(rng, classes);
  inst.plan = two_player ? FactorizationPlan::TwoPlayer(d) : FactorizationPlan::PerFeature(d);
  for (PopulationDistributions* p : {&inst.base, &inst.target}) {
    p->conditional = RandomConditional(rng, cards, classes);
    p->input = two_player ? RandomJoint(rng, cards) : RandomFactored(rng, cards);
  }
  inst.base.tag = PopulationTag::kBaseline;
  inst.target.tag = PopulationTag::kTarget;
  return inst;
}

// Independent double sum: sum_x P(x) sum_y L(q(x), y) P(y | x), with x
// running over the joint support or the full product domain.
inline double BruteForceRisk(const Hypothesis& q, const LossFunction& loss,
                             const ConditionalTable& conditional,
                             const InputDistribution& input) {
  double total = 0.0;
  auto add = [&](const Cell& x, double px) {
    if (px == 0.0) return;
    const auto py = conditional.Lookup(x);
    const int predicted = q.Predict(x);
    double inner = 0.0;
    for (int y = 0; y < conditional.num_classes(); ++y) inner += loss(predicted, y) * py[y];
    total += px * inner;
  };
  if (input.is_joint()) {
    const auto& j = input.joint();
    for (std::size_t i = 0; i < j.cells.size(); ++i) add(j.cells[i], j.probabilities[i]);
  } else {
    const auto& m = input.factored().marginals;
    std::vector<int> cards;
    for (const auto& v : m) cards.push_back(static_cast<int>(v.size()));
    for (const Cell& x : AllCells(cards)) {
      double px = 1.0;
      for (std::size_t f = 0; f < x.size(); ++f) px *= m[f][x[f]];
      add(x, px);
    }
  }
  return total;
}

// Shapley values as the average marginal contribution over all k!
// orderings; independent of the subset-weight formula.
inline std::vector<double> PermutationShapley(const DistributionValueFunction& f) {
  const std::size_t k = f.k();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(k, 0.0);
  double count = 0.0;
  do {
    SurrogateAssignment s = SurrogateAssignment::AllZeros(k);
    double previous = f.Value(s);
    for (std::size_t player : order) {
      s.bits[player] = 1;
      const double current = f.Value(s);
      phi[player] += current - previous;
      previous = current;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& v : phi) v /= count;
  return phi;
}

inline std::filesystem::path TempDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("driftshap_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string Slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace driftshap::testing

#endif  // DRIFTSHAP_TESTS_TEST_SUPPORT_H_
