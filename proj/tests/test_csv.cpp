// Copyright (c) 2026, the svault authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "svault/csv.hpp"

using namespace svault;

TEST_CASE("csv escaping quotes the special characters", "[csv]") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("line\nbreak") == "\"line\nbreak\"");
  CHECK(csv_escape("") == "");
}

TEST_CASE("csv rows terminate with CRLF", "[csv]") {
  std::ostringstream os;
  write_csv_row(os, {"a", "b,c", "d"});
  CHECK(os.str() == "a,\"b,c\",d\r\n");
}

TEST_CASE("split handles quoted fields", "[csv]") {
  const auto f = split_csv_line("1,\"a,b\",\"say \"\"hi\"\"\",x");
  REQUIRE(f.size() == 4);
  CHECK(f[0] == "1");
  CHECK(f[1] == "a,b");
  CHECK(f[2] == "say \"hi\"");
  CHECK(f[3] == "x");
}

TEST_CASE("split and escape round-trip", "[csv]") {
  const std::vector<std::string> fields{"plain", "with,comma", "with \"quote\"", ""};
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ",";
    line += csv_escape(fields[i]);
  }
  CHECK(split_csv_line(line) == fields);
}

TEST_CASE("sensor csv parses multi-column files", "[csv]") {
  std::istringstream in(
      "timestamp,par,temp\r\n"
      "2021-06-01T00:00:00Z,1.5,20\r\n"
      "1622505601,2.5,\r\n"
      "2021-06-01T00:00:02Z,,21\r\n");
  const auto csv = read_sensor_csv(in);
  REQUIRE(csv.columns == std::vector<std::string>{"par", "temp"});
  CHECK(csv.valid_rows == 3);
  CHECK(csv.row_errors.empty());
  REQUIRE(csv.series[0].size() == 2);  // empty cell means missing sample
  CHECK(csv.series[0][0] == TimePoint{1622505600, 1.5});
  CHECK(csv.series[0][1] == TimePoint{1622505601, 2.5});
  REQUIRE(csv.series[1].size() == 2);
  CHECK(csv.series[1][1] == TimePoint{1622505602, 21.0});
}

TEST_CASE("sensor csv collects malformed rows without failing", "[csv]") {
  std::istringstream in(
      "timestamp,par\n"
      "2021-06-01T00:00:00Z,1\n"
      "not-a-time,2\n"
      "2021-06-01T00:00:02Z,abc\n"
      "2021-06-01T00:00:03Z\n"
      "2021-06-01T00:00:04Z,4\n");
  const auto csv = read_sensor_csv(in);
  CHECK(csv.valid_rows == 2);
  REQUIRE(csv.row_errors.size() == 3);
  CHECK(csv.row_errors[0].line == 3);
  CHECK(csv.row_errors[1].line == 4);
  CHECK(csv.row_errors[2].line == 5);
  REQUIRE(csv.series[0].size() == 2);
  CHECK(csv.series[0][1] == TimePoint{1622505604, 4.0});
}

TEST_CASE("sensor csv header validation", "[csv]") {
  std::istringstream missing("par,temp\n1,2\n");
  CHECK_THROWS_AS(read_sensor_csv(missing), ParseError);
  std::istringstream no_sensors("timestamp\n5\n");
  CHECK_THROWS_AS(read_sensor_csv(no_sensors), ParseError);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_sensor_csv(empty), ParseError);
}

TEST_CASE("sensor csv tolerates a UTF-8 BOM and blank lines", "[csv]") {
  std::istringstream in("\xEF\xBB\xBFtimestamp,v\n\n1,1\n\n2,2\n");
  const auto csv = read_sensor_csv(in);
  CHECK(csv.columns == std::vector<std::string>{"v"});
  CHECK(csv.valid_rows == 2);
}

TEST_CASE("non-finite cell values are rejected per row", "[csv]") {
  std::istringstream in("timestamp,v\n1,inf\n2,nan\n3,7\n");
  const auto csv = read_sensor_csv(in);
  CHECK(csv.valid_rows == 1);
  CHECK(csv.row_errors.size() == 2);
  REQUIRE(csv.series[0].size() == 1);
  CHECK(csv.series[0][0] == TimePoint{3, 7.0});
}
