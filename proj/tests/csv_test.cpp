// Copyright 2026 The PCR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "pcr/csv.hpp"

#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"

namespace pcr::csv {
namespace {

std::vector<std::vector<std::string>> ReadAll(const std::string& text) {
  std::istringstream in(text);
  Reader reader(in);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  while (reader.Next(row)) rows.push_back(row);
  return rows;
}

TEST(CsvReaderTest, PlainFields) {
  auto rows = ReadAll("a,b\n1,2\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1], (std::vector<std::string>{"1", "2"}));
}

TEST(CsvReaderTest, QuotedCommaQuoteAndNewline) {
  auto rows = ReadAll("u,text\nu1,\"hello, \"\"world\"\"\nbye\"\r\nu2,x");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][1], "hello, \"world\"\nbye");
  EXPECT_EQ(rows[2], (std::vector<std::string>{"u2", "x"}));
}

TEST(CsvReaderTest, EmptyTrailingField) {
  auto rows = ReadAll("a,b\nx,\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1], (std::vector<std::string>{"x", ""}));
}

TEST(CsvReaderTest, UnterminatedQuoteIsAnError) {
  EXPECT_THROW(ReadAll("a\n\"oops\n"), IoError);
}

TEST(CsvWriterTest, QuotesOnlyWhenNeeded) {
  std::ostringstream out;
  WriteRow(out, {"plain", "a,b", "say \"hi\"", "line\nbreak"});
  EXPECT_EQ(out.str(), "plain,\"a,b\",\"say \"\"hi\"\"\",\"line\nbreak\"\n");
  auto rows = ReadAll(out.str());
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"plain", "a,b", "say \"hi\"",
                                               "line\nbreak"}));
}

TEST(CsvHeaderTest, ColumnIndexToleratesBom) {
  std::vector<std::string> header = {"\xEF\xBB\xBFuser_id", "item"};
  EXPECT_EQ(ColumnIndex(header, "user_id"), 0);
  EXPECT_EQ(ColumnIndex(header, "item"), 1);
  EXPECT_EQ(ColumnIndex(header, "missing"), -1);
}

}  // namespace
}  // namespace pcr::csv
