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

#include "driftshap/schema.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "driftshap/error.h"
#include "driftshap/numeric.h"

namespace driftshap {
namespace {

using nlohmann::json;

void Require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorCode::kInvalidArgument, message);
}

bool EdgesValid(const std::vector<double>& edges) {
  if (edges.size() < 2) return false;
  if (edges.size() == 2 && edges[0] == edges[1]) return std::isfinite(edges[0]);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!std::isfinite(edges[i])) return false;
    if (i > 0 && !(edges[i] > edges[i - 1])) return false;
  }
  return true;
}

std::vector<std::string> SortedUnion(const RawTable& a, const RawTable* b,
                                     std::size_t col_a,
                                     std::optional<std::size_t> col_b) {
  std::set<std::string> values;
  for (const auto& row : a.rows) values.insert(row[col_a]);
  if (b != nullptr && col_b) {
    for (const auto& row : b->rows) values.insert(row[*col_b]);
  }
  return {values.begin(), values.end()};
}

}  // namespace

std::string_view PopulationName(PopulationTag tag) {
  return tag == PopulationTag::kBaseline ? "baseline" : "target";
}

FeatureSpec FeatureSpec::Categorical(std::string name,
                                     std::vector<std::string> categories) {
  FeatureSpec spec;
  spec.name = std::move(name);
  spec.kind = FeatureKind::kCategorical;
  spec.categories = std::move(categories);
  return spec;
}

FeatureSpec FeatureSpec::Continuous(std::string name, BinSpec binning) {
  FeatureSpec spec;
  spec.name = std::move(name);
  spec.kind = FeatureKind::kContinuous;
  spec.binning = std::move(binning);
  return spec;
}

void FeatureSchema::Validate() const {
  std::unordered_set<std::string> names;
  for (const auto& f : features) {
    Require(!f.name.empty(), "feature names must be non-empty");
    Require(names.insert(f.name).second, "duplicate feature name '" + f.name + "'");
    Require(f.name != label.column, "feature '" + f.name + "' is also the label");
    if (f.kind == FeatureKind::kCategorical) {
      Require(!f.categories.empty(),
              "categorical feature '" + f.name + "' has no categories");
      std::unordered_set<std::string> seen(f.categories.begin(), f.categories.end());
      Require(seen.size() == f.categories.size(),
              "categorical feature '" + f.name + "' has duplicate categories");
    } else {
      Require(f.binning.bin_count >= 1,
              "continuous feature '" + f.name + "' needs at least one bin");
      if (!f.binning.edges.empty() ||
          f.binning.strategy == BinStrategy::kExplicitEdges) {
        Require(EdgesValid(f.binning.edges),
                "continuous feature '" + f.name + "' has invalid bin edges");
      }
    }
  }
  std::unordered_set<std::string> classes(label.classes.begin(), label.classes.end());
  Require(classes.size() == label.classes.size(), "duplicate label classes");
}

bool FeatureSchema::Frozen() const {
  return std::all_of(features.begin(), features.end(), [](const FeatureSpec& f) {
    return f.kind == FeatureKind::kCategorical || f.binning.frozen();
  });
}

int FeatureSchema::Cardinality(std::size_t f) const {
  const auto& spec = features[f];
  if (spec.kind == FeatureKind::kCategorical) {
    const int extra = unknown_category == UnknownCategoryPolicy::kOther ? 1 : 0;
    return static_cast<int>(spec.categories.size()) + extra;
  }
  return spec.binning.frozen() ? spec.binning.num_bins() : spec.binning.bin_count;
}

std::vector<int> FeatureSchema::Cardinalities() const {
  std::vector<int> out(features.size());
  for (std::size_t f = 0; f < features.size(); ++f) out[f] = Cardinality(f);
  return out;
}

std::optional<std::size_t> FeatureSchema::FindFeature(std::string_view name) const {
  for (std::size_t f = 0; f < features.size(); ++f) {
    if (features[f].name == name) return f;
  }
  return std::nullopt;
}

std::optional<int> FeatureSchema::CategoryIndex(std::size_t f,
                                                std::string_view value) const {
  const auto& cats = features[f].categories;
  for (std::size_t i = 0; i < cats.size(); ++i) {
    if (cats[i] == value) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::optional<int> FeatureSchema::ClassIndex(std::string_view value) const {
  for (std::size_t i = 0; i < label.classes.size(); ++i) {
    if (label.classes[i] == value) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::size_t CellHash::operator()(const Cell& cell) const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::int32_t v : cell) {
    h ^= static_cast<std::uint32_t>(v);
    h *= 0x100000001b3ULL;
  }
  return static_cast<std::size_t>(SplitMix64(h));
}

std::string CellKey(std::span<const std::int32_t> cell) {
  std::string key;
  for (std::size_t i = 0; i < cell.size(); ++i) {
    if (i > 0) key += '|';
    key += std::to_string(cell[i]);
  }
  return key;
}

Cell ParseCellKey(std::string_view key) {
  Cell cell;
  if (key.empty()) return cell;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = key.find('|', start);
    const std::string part(key.substr(start, end - start));
    double v;
    if (!ParseDouble(part, &v) || v < 0 || v != std::floor(v)) {
      throw Error(ErrorCode::kParse, "bad cell key '" + std::string(key) + "'");
    }
    cell.push_back(static_cast<std::int32_t>(v));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return cell;
}

double BinnedDataset::TotalWeight() const {
  double total = 0.0;
  for (double w : weights) total += w;
  return total;
}

std::vector<double> EqualWidthEdges(double min, double max, int bin_count) {
  Require(bin_count >= 1, "bin_count must be >= 1");
  if (min == max) return {min, min};
  std::vector<double> edges(bin_count + 1);
  const double width = (max - min) / bin_count;
  for (int i = 0; i <= bin_count; ++i) edges[i] = min + width * i;
  edges.front() = min;
  edges.back() = max;
  return edges;
}

std::vector<double> QuantileEdges(std::vector<double> values, int bin_count) {
  Require(bin_count >= 1, "bin_count must be >= 1");
  Require(!values.empty(), "quantile edges need at least one value");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::vector<double> edges;
  for (int i = 0; i <= bin_count; ++i) {
    const double pos = static_cast<double>(i) / bin_count * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    const double q = values[lo] + frac * (values[hi] - values[lo]);
    if (edges.empty() || q > edges.back()) edges.push_back(q);
  }
  if (edges.size() == 1) edges.push_back(edges.front());
  return edges;
}

int BinIndex(const BinSpec& spec, double value) {
  const auto& edges = spec.edges;
  const int bins = spec.num_bins();
  if (value < edges.front() || value > edges.back()) {
    if (spec.out_of_range == OutOfRangePolicy::kReject) {
      throw Error(ErrorCode::kOutOfRange,
                  "value " + FormatDouble(value) + " outside [" +
                      FormatDouble(edges.front()) + ", " +
                      FormatDouble(edges.back()) + "]");
    }
    return value < edges.front() ? 0 : bins - 1;
  }
  const auto it = std::upper_bound(edges.begin(), edges.end(), value);
  const int index = static_cast<int>(it - edges.begin()) - 1;
  return std::clamp(index, 0, bins - 1);
}

FitResult FitBins(const RawTable& baseline, const FeatureSchema& draft) {
  if (baseline.num_rows() == 0) {
    throw Error(ErrorCode::kEmptyData, "baseline has no rows");
  }
  FitResult result{draft, {}};
  for (auto& feature : result.schema.features) {
    if (feature.kind != FeatureKind::kContinuous) continue;
    auto& bins = feature.binning;
    if (bins.strategy == BinStrategy::kExplicitEdges || bins.frozen()) continue;
    const std::size_t col = baseline.ColumnIndex(feature.name);
    std::vector<double> values;
    values.reserve(baseline.num_rows());
    for (const auto& row : baseline.rows) {
      double v;
      if (row[col].empty()) {
        throw Error(ErrorCode::kMissingValue,
                    "missing value in column '" + feature.name + "'");
      }
      if (!ParseDouble(row[col], &v)) {
        throw Error(ErrorCode::kNonNumeric, "column '" + feature.name +
                                                "' has non-numeric value '" +
                                                row[col] + "'");
      }
      values.push_back(v);
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi) {
      bins.edges = {*lo, *lo};
      result.warnings.push_back("DegenerateFeature: '" + feature.name +
                                "' has the single value " + FormatDouble(*lo) +
                                "; using one bin");
    } else if (bins.strategy == BinStrategy::kEqualWidth) {
      bins.edges = EqualWidthEdges(*lo, *hi, bins.bin_count);
    } else {
      bins.edges = QuantileEdges(std::move(values), bins.bin_count);
    }
    bins.bin_count = bins.num_bins();
  }
  result.schema.Validate();
  return result;
}

std::vector<Cell> EncodeCells(const RawTable& raw, const FeatureSchema& schema) {
  if (!schema.Frozen()) {
    throw Error(ErrorCode::kInvalidArgument, "schema bin edges are not frozen");
  }
  const std::size_t d = schema.num_features();
  std::vector<std::size_t> cols(d);
  for (std::size_t f = 0; f < d; ++f) {
    cols[f] = raw.ColumnIndex(schema.features[f].name);
  }
  std::vector<Cell> cells(raw.num_rows(), Cell(d));
  for (std::size_t r = 0; r < raw.num_rows(); ++r) {
    const auto& row = raw.rows[r];
    for (std::size_t f = 0; f < d; ++f) {
      const auto& spec = schema.features[f];
      const std::string& text = row[cols[f]];
      if (text.empty()) {
        throw Error(ErrorCode::kMissingValue, "missing value in column '" +
                                                  spec.name + "' row " +
                                                  std::to_string(r + 1));
      }
      if (spec.kind == FeatureKind::kCategorical) {
        auto index = schema.CategoryIndex(f, text);
        if (!index) {
          if (schema.unknown_category == UnknownCategoryPolicy::kReject) {
            throw Error(ErrorCode::kUnknownCategory, "value '" + text +
                                                         "' not a category of '" +
                                                         spec.name + "'");
          }
          index = static_cast<int>(spec.categories.size());
        }
        cells[r][f] = *index;
      } else {
        double v;
        if (!ParseDouble(text, &v)) {
          throw Error(ErrorCode::kNonNumeric, "column '" + spec.name +
                                                  "' has non-numeric value '" +
                                                  text + "'");
        }
        cells[r][f] = BinIndex(spec.binning, v);
      }
    }
  }
  return cells;
}

BinnedDataset Encode(const RawTable& raw,
                     std::shared_ptr<const FeatureSchema> schema,
                     PopulationTag tag) {
  if (raw.num_rows() == 0) {
    throw Error(ErrorCode::kEmptyData,
                std::string(PopulationName(tag)) + " data has no rows");
  }
  BinnedDataset data;
  data.cells = EncodeCells(raw, *schema);
  const std::size_t label_col = raw.ColumnIndex(schema->label.column);
  data.labels.resize(raw.num_rows());
  for (std::size_t r = 0; r < raw.num_rows(); ++r) {
    const std::string& text = raw.rows[r][label_col];
    auto index = schema->ClassIndex(text);
    if (!index) {
      throw Error(ErrorCode::kUnknownCategory,
                  "label '" + text + "' is not a declared class");
    }
    data.labels[r] = *index;
  }
  data.weights = raw.weights;
  if (data.weights.size() != raw.num_rows()) data.weights.assign(raw.num_rows(), 1.0);
  if (!(data.TotalWeight() > 0.0)) {
    throw Error(ErrorCode::kEmptyData,
                std::string(PopulationName(tag)) + " data has zero total weight");
  }
  data.schema = std::move(schema);
  data.tag = tag;
  return data;
}

FeatureSchema InferSchema(const RawTable& baseline, const RawTable* target,
                          const std::string& label_column,
                          const InferOptions& options) {
  if (baseline.num_rows() == 0) {
    throw Error(ErrorCode::kEmptyData, "baseline has no rows");
  }
  FeatureSchema schema;
  schema.unknown_category = options.unknown_category;
  schema.label.column = label_column;
  const std::size_t label_col = baseline.ColumnIndex(label_column);
  std::optional<std::size_t> target_label;
  if (target != nullptr) target_label = target->ColumnIndex(label_column);
  schema.label.classes = SortedUnion(baseline, target, label_col, target_label);

  for (std::size_t c = 0; c < baseline.columns.size(); ++c) {
    if (c == label_col) continue;
    const std::string& name = baseline.columns[c];
    std::optional<std::size_t> target_col;
    if (target != nullptr) target_col = target->ColumnIndex(name);
    const bool forced = std::find(options.categorical.begin(), options.categorical.end(),
                                  name) != options.categorical.end();
    bool numeric = !forced;
    for (std::size_t r = 0; numeric && r < baseline.num_rows(); ++r) {
      double v;
      numeric = ParseDouble(baseline.rows[r][c], &v);
    }
    if (numeric) {
      schema.features.push_back(FeatureSpec::Continuous(name, options.default_binning));
    } else {
      schema.features.push_back(
          FeatureSpec::Categorical(name, SortedUnion(baseline, target, c, target_col)));
    }
  }
  schema.Validate();
  return schema;
}

std::string_view BinStrategyName(BinStrategy s) {
  switch (s) {
    case BinStrategy::kEqualWidth:
      return "equal-width";
    case BinStrategy::kQuantile:
      return "quantile";
    case BinStrategy::kExplicitEdges:
      return "explicit-edges";
  }
  return "equal-width";
}

BinStrategy ParseBinStrategy(std::string_view name) {
  if (name == "equal-width") return BinStrategy::kEqualWidth;
  if (name == "quantile") return BinStrategy::kQuantile;
  if (name == "explicit-edges") return BinStrategy::kExplicitEdges;
  throw Error(ErrorCode::kParse, "unknown bin strategy '" + std::string(name) + "'");
}

json BinSpecToJson(const BinSpec& spec) {
  json bins;
  bins["strategy"] = BinStrategyName(spec.strategy);
  bins["bin_count"] = spec.bin_count;
  bins["edges"] = spec.edges;
  bins["out_of_range"] = spec.out_of_range == OutOfRangePolicy::kClamp ? "clamp" : "reject";
  return bins;
}

BinSpec BinSpecFromJson(const json& doc) {
  try {
    BinSpec bins;
    bins.strategy = ParseBinStrategy(doc.value("strategy", "equal-width"));
    bins.bin_count = doc.value("bin_count", 10);
    bins.edges = doc.value("edges", std::vector<double>{});
    const std::string policy = doc.value("out_of_range", "clamp");
    if (policy != "clamp" && policy != "reject") {
      throw Error(ErrorCode::kParse, "unknown out_of_range '" + policy + "'");
    }
    bins.out_of_range = policy == "clamp" ? OutOfRangePolicy::kClamp : OutOfRangePolicy::kReject;
    return bins;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("binning document: ") + e.what());
  }
}

json SchemaToJson(const FeatureSchema& schema) {
  json features = json::array();
  for (const auto& f : schema.features) {
    json item;
    item["name"] = f.name;
    if (f.kind == FeatureKind::kCategorical) {
      item["kind"] = "categorical";
      item["categories"] = f.categories;
    } else {
      item["kind"] = "continuous";
      item["binning"] = BinSpecToJson(f.binning);
    }
    features.push_back(item);
  }
  json doc;
  doc["features"] = features;
  doc["label"] = {{"column", schema.label.column}, {"classes", schema.label.classes}};
  doc["unknown_category"] =
      schema.unknown_category == UnknownCategoryPolicy::kOther ? "other" : "reject";
  return doc;
}

FeatureSchema SchemaFromJson(const json& doc) {
  try {
    FeatureSchema schema;
    for (const auto& item : doc.at("features")) {
      const std::string name = item.at("name").get<std::string>();
      const std::string kind = item.value("kind", "continuous");
      if (kind == "categorical") {
        schema.features.push_back(FeatureSpec::Categorical(
            name, item.at("categories").get<std::vector<std::string>>()));
      } else if (kind == "continuous") {
        BinSpec bins;
        if (item.contains("binning")) bins = BinSpecFromJson(item.at("binning"));
        schema.features.push_back(FeatureSpec::Continuous(name, std::move(bins)));
      } else {
        throw Error(ErrorCode::kParse, "unknown feature kind '" + kind + "'");
      }
    }
    if (doc.contains("label")) {
      const auto& label = doc.at("label");
      schema.label.column = label.value("column", "");
      schema.label.classes = label.value("classes", std::vector<std::string>{});
    }
    const std::string unknown = doc.value("unknown_category", "reject");
    if (unknown != "reject" && unknown != "other") {
      throw Error(ErrorCode::kParse, "unknown unknown_category '" + unknown + "'");
    }
    schema.unknown_category =
        unknown == "other" ? UnknownCategoryPolicy::kOther : UnknownCategoryPolicy::kReject;
    schema.Validate();
    return schema;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("schema document: ") + e.what());
  }
}

}  // namespace driftshap
