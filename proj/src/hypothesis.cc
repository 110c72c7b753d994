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

#include "driftshap/hypothesis.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "driftshap/error.h"

namespace driftshap {
namespace {

using nlohmann::json;

// Products of the referenced features' domains above this are refused.
constexpr double kRuleEnumerationLimit = 1 << 24;

// ---- loss ------------------------------------------------------------------

void CheckCosts(const std::vector<std::vector<double>>& costs) {
  const std::size_t n = costs.size();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "cost matrix is empty");
  for (std::size_t a = 0; a < n; ++a) {
    if (costs[a].size() != n) {
      throw Error(ErrorCode::kInvalidArgument, "cost matrix must be square");
    }
    for (std::size_t p = 0; p < n; ++p) {
      const double c = costs[a][p];
      if (!(c >= 0.0) || !std::isfinite(c)) {
        throw Error(ErrorCode::kInvalidArgument, "costs must be finite and non-negative");
      }
      if (a == p && c != 0.0) {
        throw Error(ErrorCode::kInvalidArgument, "cost matrix diagonal must be zero");
      }
    }
  }
}

// ---- rule parsing ------------------------------------------------------------

enum class Tok { kIdent, kEq, kLParen, kRParen, kAnd, kOr, kNot, kEnd };

struct Token {
  Tok kind;
  std::string text;
};

std::string Lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool IsIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
}

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(') {
      tokens.push_back({Tok::kLParen, "("});
      ++i;
    } else if (c == ')') {
      tokens.push_back({Tok::kRParen, ")"});
      ++i;
    } else if (c == '=') {
      tokens.push_back({Tok::kEq, "="});
      i += (i + 1 < text.size() && text[i + 1] == '=') ? 2 : 1;
    } else if (c == '&' || c == '|') {
      tokens.push_back({c == '&' ? Tok::kAnd : Tok::kOr, std::string(1, c)});
      i += (i + 1 < text.size() && text[i + 1] == c) ? 2 : 1;
    } else if (c == '!') {
      tokens.push_back({Tok::kNot, "!"});
      ++i;
    } else if (c == '"' || c == '\'') {
      const std::size_t end = text.find(c, i + 1);
      if (end == std::string_view::npos) throw Error(ErrorCode::kParse, "unterminated quote in rule");
      tokens.push_back({Tok::kIdent, std::string(text.substr(i + 1, end - i - 1))});
      i = end + 1;
    } else if (IsIdentChar(c)) {
      std::size_t j = i;
      while (j < text.size() && IsIdentChar(text[j])) ++j;
      std::string word(text.substr(i, j - i));
      const std::string lower = Lower(word);
      if (lower == "and") {
        tokens.push_back({Tok::kAnd, word});
      } else if (lower == "or") {
        tokens.push_back({Tok::kOr, word});
      } else if (lower == "not") {
        tokens.push_back({Tok::kNot, word});
      } else {
        tokens.push_back({Tok::kIdent, word});
      }
      i = j;
    } else {
      throw Error(ErrorCode::kParse, std::string("unexpected character '") + c + "' in rule");
    }
  }
  tokens.push_back({Tok::kEnd, ""});
  return tokens;
}

class RuleParser {
 public:
  RuleParser(std::vector<Token> tokens, const FeatureSchema& schema)
      : tokens_(std::move(tokens)), schema_(schema) {}

  std::vector<BooleanRule::Node> Parse(int* root) {
    *root = Expr();
    if (Peek().kind != Tok::kEnd) {
      throw Error(ErrorCode::kParse, "unexpected '" + Peek().text + "' in rule");
    }
    return std::move(nodes_);
  }

 private:
  const Token& Peek() const { return tokens_[pos_]; }
  const Token& Take() { return tokens_[pos_++]; }

  int Add(BooleanRule::Node node) {
    nodes_.push_back(std::move(node));
    return static_cast<int>(nodes_.size()) - 1;
  }

  int Nary(BooleanRule::Op op, Tok separator, int (RuleParser::*next)()) {
    const int first = (this->*next)();
    if (Peek().kind != separator) return first;
    BooleanRule::Node node;
    node.op = op;
    node.children.push_back(first);
    while (Peek().kind == separator) {
      Take();
      node.children.push_back((this->*next)());
    }
    return Add(std::move(node));
  }

  int Expr() { return Nary(BooleanRule::Op::kOr, Tok::kOr, &RuleParser::Term); }
  int Term() { return Nary(BooleanRule::Op::kAnd, Tok::kAnd, &RuleParser::Factor); }

  int Factor() {
    const Token& tok = Take();
    if (tok.kind == Tok::kNot) {
      BooleanRule::Node node;
      node.op = BooleanRule::Op::kNot;
      node.children.push_back(Factor());
      return Add(std::move(node));
    }
    if (tok.kind == Tok::kLParen) {
      const int inner = Expr();
      if (Take().kind != Tok::kRParen) throw Error(ErrorCode::kParse, "missing ')' in rule");
      return inner;
    }
    if (tok.kind != Tok::kIdent) {
      throw Error(ErrorCode::kParse, "expected a feature name, got '" + tok.text + "'");
    }
    const auto feature = schema_.FindFeature(tok.text);
    if (!feature) throw Error(ErrorCode::kParse, "unknown feature '" + tok.text + "' in rule");
    BooleanRule::Node node;
    node.feature = *feature;
    if (Peek().kind == Tok::kEq) {
      Take();
      const Token& value = Take();
      if (value.kind != Tok::kIdent) throw Error(ErrorCode::kParse, "expected a value after '='");
      const auto& spec = schema_.features[*feature];
      if (spec.kind == FeatureKind::kCategorical) {
        const auto index = schema_.CategoryIndex(*feature, value.text);
        if (!index) {
          throw Error(ErrorCode::kParse,
                      "'" + value.text + "' is not a category of '" + spec.name + "'");
        }
        node.equals = *index;
      } else {
        char* end = nullptr;
        const long bin = std::strtol(value.text.c_str(), &end, 10);
        if (*end != '\0' || bin < 0 || bin >= schema_.Cardinality(*feature)) {
          throw Error(ErrorCode::kParse, "'" + value.text + "' is not a bin of '" + spec.name + "'");
        }
        node.equals = static_cast<int>(bin);
      }
    }
    return Add(std::move(node));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const FeatureSchema& schema_;
  std::vector<BooleanRule::Node> nodes_;
};

// ---- tree training -----------------------------------------------------------

double Gini(std::span<const double> counts, double total) {
  if (total <= 0.0) return 0.0;
  double sum_sq = 0.0;
  for (double c : counts) sum_sq += (c / total) * (c / total);
  return 1.0 - sum_sq;
}

int Majority(std::span<const double> counts) {
  int best = 0;
  for (int y = 1; y < static_cast<int>(counts.size()); ++y) {
    if (counts[y] > counts[best]) best = y;
  }
  return best;
}

class TreeBuilder {
 public:
  TreeBuilder(const BinnedDataset& data, int max_depth)
      : data_(data),
        max_depth_(max_depth),
        cards_(data.schema->Cardinalities()),
        classes_(static_cast<std::size_t>(data.schema->num_classes())) {}

  std::vector<DecisionTree::Node> Build() {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < data_.num_rows(); ++r) {
      if (data_.weights[r] > 0.0) rows.push_back(r);
    }
    Grow(rows, 0);
    return std::move(nodes_);
  }

 private:
  struct Split {
    double gain = -1.0;
    std::size_t feature = 0;
    DecisionTree::Test test = DecisionTree::Test::kEquals;
    int value = 0;
  };

  bool Goes(const Split& split, const Cell& cell) const {
    const int v = cell[split.feature];
    return split.test == DecisionTree::Test::kEquals ? v == split.value : v <= split.value;
  }

  int Grow(const std::vector<std::size_t>& rows, int depth) {
    std::vector<double> counts(classes_, 0.0);
    double total = 0.0;
    for (std::size_t r : rows) {
      counts[data_.labels[r]] += data_.weights[r];
      total += data_.weights[r];
    }
    const int index = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    nodes_[index].label = Majority(counts);
    const double impurity = Gini(counts, total);
    if (depth >= max_depth_ || impurity <= 1e-15) return index;

    const Split split = BestSplit(rows, counts, total, impurity);
    if (split.gain < 0.0) return index;

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (std::size_t r : rows) {
      (Goes(split, data_.cells[r]) ? left_rows : right_rows).push_back(r);
    }
    const int left = Grow(left_rows, depth + 1);
    const int right = Grow(right_rows, depth + 1);
    auto& node = nodes_[index];
    if (nodes_[left].leaf && nodes_[right].leaf && nodes_[left].label == nodes_[right].label) {
      // Both sides agree; keep this node a leaf and drop the children.
      node.label = nodes_[left].label;
      nodes_.resize(index + 1);
      return index;
    }
    node.leaf = false;
    node.feature = split.feature;
    node.test = split.test;
    node.value = split.value;
    node.left = left;
    node.right = right;
    return index;
  }

  Split BestSplit(const std::vector<std::size_t>& rows, const std::vector<double>& counts,
                  double total, double impurity) const {
    Split best;
    const std::size_t c = classes_;
    for (std::size_t f = 0; f < cards_.size(); ++f) {
      const auto card = static_cast<std::size_t>(cards_[f]);
      if (card < 2) continue;
      std::vector<double> hist(card * c, 0.0);
      for (std::size_t r : rows) {
        hist[static_cast<std::size_t>(data_.cells[r][f]) * c + data_.labels[r]] += data_.weights[r];
      }
      const bool categorical = data_.schema->features[f].kind == FeatureKind::kCategorical;
      std::vector<double> left(c, 0.0);
      for (std::size_t v = 0; v + (categorical ? 0 : 1) < card; ++v) {
        if (categorical) std::fill(left.begin(), left.end(), 0.0);
        for (std::size_t y = 0; y < c; ++y) left[y] += hist[v * c + y];
        const double wl = std::accumulate(left.begin(), left.end(), 0.0);
        const double wr = total - wl;
        if (wl <= 0.0 || wr <= 1e-12 * total) continue;
        std::vector<double> right(c);
        for (std::size_t y = 0; y < c; ++y) right[y] = counts[y] - left[y];
        const double child = (wl * Gini(left, wl) + wr * Gini(right, wr)) / total;
        const double gain = impurity - child;
        if (gain > best.gain + 1e-12) {
          best.gain = std::max(gain, 0.0);
          best.feature = f;
          best.test = categorical ? DecisionTree::Test::kEquals : DecisionTree::Test::kLessEqual;
          best.value = static_cast<int>(v);
        }
      }
    }
    return best;
  }

  const BinnedDataset& data_;
  int max_depth_;
  std::vector<int> cards_;
  std::size_t classes_;
  std::vector<DecisionTree::Node> nodes_;
};

}  // namespace

// ---- LossFunction ------------------------------------------------------------

LossFunction LossFunction::Misclassification(int num_classes) {
  if (num_classes < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one class");
  LossFunction loss;
  loss.n_ = static_cast<std::size_t>(num_classes);
  loss.costs_.assign(loss.n_ * loss.n_, 1.0);
  for (std::size_t a = 0; a < loss.n_; ++a) loss.costs_[a * loss.n_ + a] = 0.0;
  loss.misclassification_ = true;
  return loss;
}

LossFunction LossFunction::CostMatrix(std::vector<std::vector<double>> costs) {
  CheckCosts(costs);
  LossFunction loss;
  loss.n_ = costs.size();
  for (const auto& row : costs) loss.costs_.insert(loss.costs_.end(), row.begin(), row.end());
  return loss;
}

double LossFunction::MaxLoss() const {
  return *std::max_element(costs_.begin(), costs_.end());
}

LossFunction LossFunction::Scaled(double factor) const {
  if (!(factor > 0.0)) throw Error(ErrorCode::kInvalidArgument, "scale must be positive");
  LossFunction out = *this;
  for (double& c : out.costs_) c *= factor;
  out.misclassification_ = misclassification_ && factor == 1.0;
  return out;
}

json LossFunction::ToJson() const {
  if (misclassification_) return {{"kind", "misclassification"}, {"classes", n_}};
  std::vector<std::vector<double>> rows(n_);
  for (std::size_t a = 0; a < n_; ++a) {
    rows[a].assign(costs_.begin() + a * n_, costs_.begin() + (a + 1) * n_);
  }
  return {{"kind", "cost-matrix"}, {"convention", "row=actual,column=predicted"}, {"costs", rows}};
}

LossFunction LossFunction::FromJson(const json& doc) {
  try {
    const std::string kind = doc.value("kind", "cost-matrix");
    if (kind == "misclassification") return Misclassification(doc.at("classes").get<int>());
    return CostMatrix(doc.at("costs").get<std::vector<std::vector<double>>>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("loss document: ") + e.what());
  }
}

// ---- BooleanRule ---------------------------------------------------------------

BooleanRule::BooleanRule(std::vector<Node> nodes, int root, std::string text)
    : nodes_(std::move(nodes)), root_(root), text_(std::move(text)) {}

bool BooleanRule::Eval(int node, std::span<const std::int32_t> cell) const {
  const Node& n = nodes_[node];
  switch (n.op) {
    case Op::kAtom:
      return n.equals ? cell[n.feature] == *n.equals : cell[n.feature] != 0;
    case Op::kAnd:
      return std::all_of(n.children.begin(), n.children.end(),
                         [&](int c) { return Eval(c, cell); });
    case Op::kOr:
      return std::any_of(n.children.begin(), n.children.end(),
                         [&](int c) { return Eval(c, cell); });
    case Op::kNot:
      return !Eval(n.children[0], cell);
  }
  return false;
}

std::vector<std::size_t> BooleanRule::ReferencedFeatures() const {
  std::vector<std::size_t> out;
  for (const auto& n : nodes_) {
    if (n.op == Op::kAtom) out.push_back(n.feature);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

BooleanRule ParseRule(std::string_view text, const FeatureSchema& schema) {
  RuleParser parser(Tokenize(text), schema);
  int root = 0;
  auto nodes = parser.Parse(&root);
  std::string trimmed(text);
  trimmed.erase(0, trimmed.find_first_not_of(" \t\n"));
  trimmed.erase(trimmed.find_last_not_of(" \t\n") + 1);
  return BooleanRule(std::move(nodes), root, std::move(trimmed));
}

// ---- DecisionTree --------------------------------------------------------------

DecisionTree::DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw Error(ErrorCode::kInvalidArgument, "tree has no nodes");
  for (const auto& n : nodes_) {
    if (!n.leaf && (n.left <= 0 || n.right <= 0 ||
                    n.left >= static_cast<int>(nodes_.size()) ||
                    n.right >= static_cast<int>(nodes_.size()))) {
      throw Error(ErrorCode::kInvalidArgument, "tree child index out of range");
    }
  }
}

int DecisionTree::Predict(std::span<const std::int32_t> cell) const {
  int i = 0;
  while (!nodes_[i].leaf) {
    const Node& n = nodes_[i];
    const int v = cell[n.feature];
    const bool holds = n.test == Test::kEquals ? v == n.value : v <= n.value;
    i = holds ? n.left : n.right;
  }
  return nodes_[i].label;
}

int DecisionTree::Depth() const {
  std::function<int(int)> depth = [&](int i) -> int {
    const Node& n = nodes_[i];
    return n.leaf ? 0 : 1 + std::max(depth(n.left), depth(n.right));
  };
  return depth(0);
}

DecisionTree TrainTree(const BinnedDataset& data, int max_depth) {
  if (data.num_rows() == 0) throw Error(ErrorCode::kEmptyData, "no rows to train on");
  if (max_depth < 1) throw Error(ErrorCode::kInvalidArgument, "max_depth must be >= 1");
  return DecisionTree(TreeBuilder(data, max_depth).Build());
}

// ---- Hypothesis ----------------------------------------------------------------

Hypothesis Hypothesis::Rule(BooleanRule rule, int true_class, int false_class) {
  return Hypothesis(RuleModel{std::move(rule), true_class, false_class});
}

Hypothesis Hypothesis::Tree(DecisionTree tree) { return Hypothesis(std::move(tree)); }

Hypothesis Hypothesis::Map(PredictionMap map) { return Hypothesis(std::move(map)); }

int Hypothesis::Predict(std::span<const std::int32_t> cell) const {
  if (const auto* r = std::get_if<RuleModel>(&model_)) {
    return r->rule.Evaluate(cell) ? r->true_class : r->false_class;
  }
  if (const auto* t = std::get_if<DecisionTree>(&model_)) return t->Predict(cell);
  const auto& map = std::get<PredictionMap>(model_);
  const auto it = map.entries.find(Cell(cell.begin(), cell.end()));
  return it == map.entries.end() ? map.default_class : it->second;
}

std::vector<double> Hypothesis::PredictionDistribution(
    std::span<const std::vector<double>> marginals, int num_classes) const {
  std::vector<double> out(static_cast<std::size_t>(num_classes), 0.0);
  if (const auto* r = std::get_if<RuleModel>(&model_)) {
    const auto features = r->rule.ReferencedFeatures();
    double domain = 1.0;
    for (std::size_t f : features) domain *= static_cast<double>(marginals[f].size());
    if (domain > kRuleEnumerationLimit) {
      throw Error(ErrorCode::kEnumerationOverflow, "rule references too large a domain");
    }
    Cell cell(marginals.size(), 0);
    double p_true = 0.0;
    std::function<void(std::size_t, double)> walk = [&](std::size_t i, double p) {
      if (p == 0.0) return;
      if (i == features.size()) {
        if (r->rule.Evaluate(cell)) p_true += p;
        return;
      }
      const std::size_t f = features[i];
      for (std::size_t v = 0; v < marginals[f].size(); ++v) {
        cell[f] = static_cast<std::int32_t>(v);
        walk(i + 1, p * marginals[f][v]);
      }
      cell[f] = 0;
    };
    walk(0, 1.0);
    out[r->true_class] += p_true;
    out[r->false_class] += 1.0 - p_true;
    return out;
  }
  if (const auto* t = std::get_if<DecisionTree>(&model_)) {
    // Each feature keeps an allowed-value mask along the current path.
    std::vector<std::vector<std::uint8_t>> allowed(marginals.size());
    for (std::size_t f = 0; f < marginals.size(); ++f) allowed[f].assign(marginals[f].size(), 1);
    std::vector<int> touched(marginals.size(), 0);
    const auto& nodes = t->nodes();
    std::function<void(int)> walk = [&](int i) {
      const auto& n = nodes[i];
      if (n.leaf) {
        double p = 1.0;
        for (std::size_t f = 0; f < marginals.size(); ++f) {
          if (touched[f] == 0) continue;
          double mass = 0.0;
          for (std::size_t v = 0; v < marginals[f].size(); ++v) {
            if (allowed[f][v]) mass += marginals[f][v];
          }
          p *= mass;
        }
        out[n.label] += p;
        return;
      }
      auto& mask = allowed[n.feature];
      const auto saved = mask;
      ++touched[n.feature];
      for (int branch = 0; branch < 2; ++branch) {
        for (std::size_t v = 0; v < mask.size(); ++v) {
          const int value = static_cast<int>(v);
          const bool holds = n.test == DecisionTree::Test::kEquals ? value == n.value
                                                                   : value <= n.value;
          mask[v] = saved[v] && (holds == (branch == 0));
        }
        walk(branch == 0 ? n.left : n.right);
      }
      mask = saved;
      --touched[n.feature];
    };
    walk(0);
    return out;
  }
  const auto& map = std::get<PredictionMap>(model_);
  double mapped = 0.0;
  // Sorted iteration keeps the floating-point sum independent of hash order.
  std::map<Cell, int> sorted(map.entries.begin(), map.entries.end());
  for (const auto& [cell, label] : sorted) {
    double p = 1.0;
    for (std::size_t f = 0; f < cell.size() && p != 0.0; ++f) p *= marginals[f][cell[f]];
    out[label] += p;
    mapped += p;
  }
  out[map.default_class] += 1.0 - mapped;
  return out;
}

int Hypothesis::MaxClass() const {
  if (const auto* r = std::get_if<RuleModel>(&model_)) return std::max(r->true_class, r->false_class);
  if (const auto* t = std::get_if<DecisionTree>(&model_)) {
    int m = 0;
    for (const auto& n : t->nodes()) {
      if (n.leaf) m = std::max(m, n.label);
    }
    return m;
  }
  const auto& map = std::get<PredictionMap>(model_);
  int m = map.default_class;
  for (const auto& [cell, label] : map.entries) m = std::max(m, label);
  return m;
}

std::string_view Hypothesis::kind() const {
  if (std::holds_alternative<RuleModel>(model_)) return "boolean-rule";
  if (std::holds_alternative<DecisionTree>(model_)) return "decision-tree";
  return "prediction-map";
}

json Hypothesis::ToJson(const FeatureSchema& schema) const {
  if (const auto* r = std::get_if<RuleModel>(&model_)) {
    return {{"kind", "boolean-rule"},
            {"expression", r->rule.text()},
            {"true_class", r->true_class},
            {"false_class", r->false_class}};
  }
  if (const auto* t = std::get_if<DecisionTree>(&model_)) {
    json nodes = json::array();
    for (const auto& n : t->nodes()) {
      if (n.leaf) {
        nodes.push_back({{"leaf", true}, {"class", n.label}});
      } else {
        nodes.push_back({{"leaf", false},
                         {"feature", schema.features.at(n.feature).name},
                         {"test", n.test == DecisionTree::Test::kEquals ? "equals" : "less-equal"},
                         {"value", n.value},
                         {"left", n.left},
                         {"right", n.right}});
      }
    }
    return {{"kind", "decision-tree"}, {"nodes", nodes}};
  }
  const auto& map = std::get<PredictionMap>(model_);
  json entries = json::object();
  for (const auto& [cell, label] : map.entries) entries[CellKey(cell)] = label;
  return {{"kind", "prediction-map"}, {"default_class", map.default_class}, {"entries", entries}};
}

Hypothesis Hypothesis::FromJson(const json& doc, const FeatureSchema& schema) {
  try {
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "boolean-rule") {
      return Rule(ParseRule(doc.at("expression").get<std::string>(), schema),
                  doc.value("true_class", 1), doc.value("false_class", 0));
    }
    if (kind == "decision-tree") {
      std::vector<DecisionTree::Node> nodes;
      for (const auto& item : doc.at("nodes")) {
        DecisionTree::Node n;
        n.leaf = item.at("leaf").get<bool>();
        if (n.leaf) {
          n.label = item.at("class").get<int>();
        } else {
          const auto f = schema.FindFeature(item.at("feature").get<std::string>());
          if (!f) throw Error(ErrorCode::kSchemaMismatch, "tree references an unknown feature");
          n.feature = *f;
          const std::string test = item.at("test").get<std::string>();
          n.test = test == "equals" ? DecisionTree::Test::kEquals : DecisionTree::Test::kLessEqual;
          n.value = item.at("value").get<int>();
          n.left = item.at("left").get<int>();
          n.right = item.at("right").get<int>();
        }
        nodes.push_back(n);
      }
      return Tree(DecisionTree(std::move(nodes)));
    }
    if (kind == "prediction-map") {
      PredictionMap map;
      map.default_class = doc.value("default_class", 0);
      for (const auto& [key, label] : doc.at("entries").items()) {
        Cell cell = ParseCellKey(key);
        if (cell.size() != schema.num_features()) {
          throw Error(ErrorCode::kSchemaMismatch, "prediction-map cell width mismatch");
        }
        map.entries.emplace(std::move(cell), label.get<int>());
      }
      return Map(std::move(map));
    }
    throw Error(ErrorCode::kParse, "unknown hypothesis kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("hypothesis document: ") + e.what());
  }
}

}  // namespace driftshap
