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

#ifndef DRIFTSHAP_HYPOTHESIS_H_
#define DRIFTSHAP_HYPOTHESIS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "driftshap/schema.h"
#include "json.hpp"

namespace driftshap {

// L(predicted, actual). Costs are stored row = actual, column = predicted.
class LossFunction {
 public:
  static LossFunction Misclassification(int num_classes);
  // Square, non-negative, zero diagonal.
  static LossFunction CostMatrix(std::vector<std::vector<double>> costs);

  double operator()(int predicted, int actual) const {
    return costs_[static_cast<std::size_t>(actual) * n_ + predicted];
  }
  int num_classes() const { return static_cast<int>(n_); }
  double MaxLoss() const;
  bool is_misclassification() const { return misclassification_; }
  LossFunction Scaled(double factor) const;

  nlohmann::json ToJson() const;
  static LossFunction FromJson(const nlohmann::json& doc);

 private:
  std::size_t n_ = 0;
  std::vector<double> costs_;
  bool misclassification_ = false;
};

// and / or / not expression over feature atoms. A bare atom `x` is true when
// the feature's index is non-zero; `x=v` tests for category `v` (or bin v).
class BooleanRule {
 public:
  enum class Op { kAtom, kAnd, kOr, kNot };
  struct Node {
    Op op = Op::kAtom;
    std::size_t feature = 0;
    std::optional<int> equals;
    std::vector<int> children;
  };

  BooleanRule(std::vector<Node> nodes, int root, std::string text);

  bool Evaluate(std::span<const std::int32_t> cell) const { return Eval(root_, cell); }
  std::vector<std::size_t> ReferencedFeatures() const;
  const std::string& text() const { return text_; }

 private:
  bool Eval(int node, std::span<const std::int32_t> cell) const;

  std::vector<Node> nodes_;
  int root_;
  std::string text_;
};

BooleanRule ParseRule(std::string_view text, const FeatureSchema& schema);

// Greedy tree over encoded cells.
class DecisionTree {
 public:
  enum class Test { kEquals, kLessEqual };
  struct Node {
    bool leaf = true;
    int label = 0;  // leaf class
    std::size_t feature = 0;
    Test test = Test::kEquals;
    int value = 0;
    int left = -1;   // taken when the test holds
    int right = -1;
  };

  explicit DecisionTree(std::vector<Node> nodes);

  int Predict(std::span<const std::int32_t> cell) const;
  int Depth() const;
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  std::vector<Node> nodes_;
};

// Gini splits, majority leaves, ties to the lowest class / feature / split
// value. Categorical features split one-vs-rest, binned ones by threshold.
DecisionTree TrainTree(const BinnedDataset& data, int max_depth);

struct PredictionMap {
  std::unordered_map<Cell, int, CellHash> entries;
  int default_class = 0;
};

class Hypothesis {
 public:
  // Rule hypotheses predict `true_class` when the rule holds.
  static Hypothesis Rule(BooleanRule rule, int true_class = 1, int false_class = 0);
  static Hypothesis Tree(DecisionTree tree);
  static Hypothesis Map(PredictionMap map);

  int Predict(std::span<const std::int32_t> cell) const;

  // P(q(x) = a) for every class a when the features are independent with
  // the given marginals. Exact; no sampling.
  std::vector<double> PredictionDistribution(
      std::span<const std::vector<double>> marginals, int num_classes) const;

  // Largest class index the hypothesis can emit.
  int MaxClass() const;
  std::string_view kind() const;

  nlohmann::json ToJson(const FeatureSchema& schema) const;
  static Hypothesis FromJson(const nlohmann::json& doc, const FeatureSchema& schema);

 private:
  struct RuleModel {
    BooleanRule rule;
    int true_class;
    int false_class;
  };
  using Model = std::variant<RuleModel, DecisionTree, PredictionMap>;

  explicit Hypothesis(Model model) : model_(std::move(model)) {}

  Model model_;
};

}  // namespace driftshap

#endif  // DRIFTSHAP_HYPOTHESIS_H_
