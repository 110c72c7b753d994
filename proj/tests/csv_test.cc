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

#include <sstream>

#include "driftshap/csv.h"
#include "driftshap/error.h"

namespace driftshap {
namespace {

RawTable Parse(const std::string& text) {
  std::istringstream in(text);
  return ParseCsv(in);
}

TEST(CsvTest, ParsesQuotedFields) {
  const RawTable t = Parse("a,b\n\"x, y\",\"say \"\"hi\"\"\"\r\n1,2\n");
  ASSERT_EQ(t.columns, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(t.num_rows(), 2u);
  EXPECT_EQ(t.rows[0][0], "x, y");
  EXPECT_EQ(t.rows[0][1], "say \"hi\"");
  EXPECT_FALSE(t.weighted);
  EXPECT_EQ(t.weights, (std::vector<double>{1.0, 1.0}));
}

TEST(CsvTest, StripsWeightColumn) {
  const RawTable t = Parse("x,__weight,y\n0,0.25,1\n1,0.75,0\n");
  EXPECT_TRUE(t.weighted);
  EXPECT_EQ(t.columns, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(t.weights, (std::vector<double>{0.25, 0.75}));
  EXPECT_EQ(t.rows[1], (std::vector<std::string>{"1", "0"}));
}

TEST(CsvTest, RejectsBadWeights) {
  for (const char* text : {"x,__weight\n0,-1\n", "x,__weight\n0,abc\n", "x,__weight\n0,\n"}) {
    try {
      Parse(text);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParse);
    }
  }
}

TEST(CsvTest, RejectsRaggedRowsAndEmptyInput) {
  try {
    Parse("a,b\n1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
  try {
    Parse("");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyData);
  }
}

TEST(CsvTest, WriteThenReadIsIdentity) {
  RawTable t;
  t.columns = {"name", "value"};
  t.weighted = true;
  t.AddRow({"plain", "1"}, 0.5);
  t.AddRow({"with,comma", "quote\"d"}, 2.0);
  std::ostringstream out;
  WriteCsv(t, out);
  const RawTable back = Parse(out.str());
  EXPECT_EQ(back.columns, t.columns);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(back.weights, t.weights);
  EXPECT_TRUE(back.weighted);
}

TEST(CsvTest, MissingColumnIsSchemaMismatch) {
  const RawTable t = Parse("a\n1\n");
  EXPECT_FALSE(t.FindColumn("b").has_value());
  try {
    t.ColumnIndex("b");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaMismatch);
  }
}

TEST(CsvTest, ReadMissingFileIsIoError) {
  try {
    ReadCsv("/nonexistent/driftshap.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace driftshap
