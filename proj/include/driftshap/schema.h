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

#ifndef DRIFTSHAP_SCHEMA_H_
#define DRIFTSHAP_SCHEMA_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "driftshap/csv.h"
#include "json.hpp"

namespace driftshap {

enum class FeatureKind { kCategorical, kContinuous };
enum class BinStrategy { kEqualWidth, kQuantile, kExplicitEdges };
enum class OutOfRangePolicy { kClamp, kReject };
enum class UnknownCategoryPolicy { kReject, kOther };
enum class PopulationTag { kBaseline, kTarget };

std::string_view PopulationName(PopulationTag tag);

struct BinSpec {
  BinStrategy strategy = BinStrategy::kEqualWidth;
  int bin_count = 10;
  // Frozen boundaries. Empty until FitBins runs (except explicit edges).
  // A single degenerate bin is stored as {v, v}.
  std::vector<double> edges;
  OutOfRangePolicy out_of_range = OutOfRangePolicy::kClamp;

  bool frozen() const { return edges.size() >= 2; }
  int num_bins() const { return static_cast<int>(edges.size()) - 1; }
};

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;
  std::vector<std::string> categories;
  BinSpec binning;

  static FeatureSpec Categorical(std::string name,
                                 std::vector<std::string> categories);
  static FeatureSpec Continuous(std::string name, BinSpec binning = {});
};

struct LabelSpec {
  std::string column;
  std::vector<std::string> classes;
};

struct FeatureSchema {
  std::vector<FeatureSpec> features;
  LabelSpec label;
  UnknownCategoryPolicy unknown_category = UnknownCategoryPolicy::kReject;

  // Throws kInvalidArgument on any violated invariant.
  void Validate() const;
  bool Frozen() const;

  std::size_t num_features() const { return features.size(); }
  int num_classes() const { return static_cast<int>(label.classes.size()); }
  // Number of encoded values of feature `f`, including the reserved "other"
  // slot for categorical features when unknown categories are mapped.
  int Cardinality(std::size_t f) const;
  std::vector<int> Cardinalities() const;
  std::optional<std::size_t> FindFeature(std::string_view name) const;
  std::optional<int> CategoryIndex(std::size_t f, std::string_view value) const;
  std::optional<int> ClassIndex(std::string_view value) const;
};

// One encoded input row: per-feature category or bin index.
using Cell = std::vector<std::int32_t>;

struct CellHash {
  std::size_t operator()(const Cell& cell) const;
};

// "i|j|k" rendering used in JSON documents.
std::string CellKey(std::span<const std::int32_t> cell);
Cell ParseCellKey(std::string_view key);

struct BinnedDataset {
  std::shared_ptr<const FeatureSchema> schema;
  std::vector<Cell> cells;
  std::vector<int> labels;
  std::vector<double> weights;
  PopulationTag tag = PopulationTag::kBaseline;

  std::size_t num_rows() const { return cells.size(); }
  double TotalWeight() const;
};

struct FitResult {
  FeatureSchema schema;
  // Degenerate (single-valued) continuous features are reported here rather
  // than raised.
  std::vector<std::string> warnings;
};

std::vector<double> EqualWidthEdges(double min, double max, int bin_count);
// Type-7 (linear interpolation) empirical quantiles; duplicate edges are
// collapsed so the returned bin count may be smaller than requested.
std::vector<double> QuantileEdges(std::vector<double> values, int bin_count);

// Left-closed/right-open intervals, last bin right-closed.
int BinIndex(const BinSpec& spec, double value);

// Freezes bin edges for every continuous feature using baseline values only.
FitResult FitBins(const RawTable& baseline, const FeatureSchema& draft);

// Encodes feature columns only (labels ignored); used for prediction maps.
std::vector<Cell> EncodeCells(const RawTable& raw, const FeatureSchema& schema);

BinnedDataset Encode(const RawTable& raw,
                     std::shared_ptr<const FeatureSchema> schema,
                     PopulationTag tag);

struct InferOptions {
  std::vector<std::string> categorical;  // force these columns categorical
  BinSpec default_binning;
  UnknownCategoryPolicy unknown_category = UnknownCategoryPolicy::kReject;
};

// Draft schema from data: a column whose every value parses as a number is
// continuous, otherwise categorical. Categories and label classes are the
// sorted union of both tables' values.
FeatureSchema InferSchema(const RawTable& baseline, const RawTable* target,
                          const std::string& label_column,
                          const InferOptions& options = {});

std::string_view BinStrategyName(BinStrategy strategy);
// Throws kParse.
BinStrategy ParseBinStrategy(std::string_view name);
nlohmann::json BinSpecToJson(const BinSpec& spec);
BinSpec BinSpecFromJson(const nlohmann::json& doc);

nlohmann::json SchemaToJson(const FeatureSchema& schema);
FeatureSchema SchemaFromJson(const nlohmann::json& doc);

}  // namespace driftshap

#endif  // DRIFTSHAP_SCHEMA_H_
