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

#include "driftshap/csv.h"

#include <fstream>
#include <sstream>

#include "driftshap/error.h"
#include "driftshap/numeric.h"

namespace driftshap {
namespace {

// Splits one logical CSV record (RFC 4180 quoting). Returns false at EOF.
bool ReadRecord(std::istream& in, std::vector<std::string>* fields,
                std::size_t* line_number) {
  fields->clear();
  std::string line;
  if (!std::getline(in, line)) return false;
  ++*line_number;
  std::string field;
  bool in_quotes = false;
  std::size_t i = 0;
  while (true) {
    if (i == line.size()) {
      if (in_quotes) {
        std::string next;
        if (!std::getline(in, next)) {
          throw Error(ErrorCode::kParse, "unterminated quote at line " +
                                             std::to_string(*line_number));
        }
        ++*line_number;
        field += '\n';
        line = next;
        i = 0;
        continue;
      }
      break;
    }
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields->push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
    ++i;
  }
  fields->push_back(std::move(field));
  return true;
}

std::string Quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::optional<std::size_t> RawTable::FindColumn(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t RawTable::ColumnIndex(std::string_view name) const {
  auto index = FindColumn(name);
  if (!index) {
    throw Error(ErrorCode::kSchemaMismatch,
                "column '" + std::string(name) + "' not found");
  }
  return *index;
}

void RawTable::AddRow(std::vector<std::string> row, double weight) {
  rows.push_back(std::move(row));
  weights.push_back(weight);
}

RawTable ParseCsv(std::istream& in) {
  RawTable table;
  std::size_t line_number = 0;
  std::vector<std::string> header;
  if (!ReadRecord(in, &header, &line_number)) {
    throw Error(ErrorCode::kEmptyData, "missing CSV header");
  }
  std::optional<std::size_t> weight_index;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == kWeightColumn) {
      weight_index = i;
    } else {
      table.columns.push_back(header[i]);
    }
  }
  table.weighted = weight_index.has_value();

  std::vector<std::string> fields;
  while (ReadRecord(in, &fields, &line_number)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(line_number) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    double weight = 1.0;
    std::vector<std::string> row;
    row.reserve(table.columns.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (weight_index && i == *weight_index) {
        if (!ParseDouble(fields[i], &weight) || weight < 0.0) {
          throw Error(ErrorCode::kParse, "invalid weight '" + fields[i] +
                                             "' at line " +
                                             std::to_string(line_number));
        }
      } else {
        row.push_back(std::move(fields[i]));
      }
    }
    table.AddRow(std::move(row), weight);
  }
  return table;
}

RawTable ReadCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return ParseCsv(in);
}

void WriteCsv(const RawTable& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i > 0) out << ',';
    out << Quote(table.columns[i]);
  }
  if (table.weighted) out << ',' << kWeightColumn;
  out << '\n';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << Quote(row[i]);
    }
    if (table.weighted) out << ',' << FormatDouble(table.weights[r]);
    out << '\n';
  }
}

void WriteCsvFile(const RawTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  WriteCsv(table, out);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace driftshap
