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

#ifndef DRIFTSHAP_CSV_H_
#define DRIFTSHAP_CSV_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace driftshap {

// Optional per-row weight column; it is stripped from `columns` on read.
inline constexpr std::string_view kWeightColumn = "__weight";

// Raw (unencoded) rows, all fields kept as text.
struct RawTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<double> weights;
  bool weighted = false;

  std::size_t num_rows() const { return rows.size(); }
  std::optional<std::size_t> FindColumn(std::string_view name) const;
  // Throws kSchemaMismatch when absent.
  std::size_t ColumnIndex(std::string_view name) const;
  void AddRow(std::vector<std::string> row, double weight = 1.0);
};

RawTable ParseCsv(std::istream& in);
RawTable ReadCsv(const std::filesystem::path& path);
void WriteCsv(const RawTable& table, std::ostream& out);
void WriteCsvFile(const RawTable& table, const std::filesystem::path& path);

}  // namespace driftshap

#endif  // DRIFTSHAP_CSV_H_
