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

#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "svault/errors.hpp"
#include "svault/types.hpp"

namespace svault {

/// RFC-4180 quoting: fields containing commas, quotes or newlines are quoted
/// and inner quotes doubled.
inline std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string{field};
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os.put(',');
    os << csv_escape(fields[i]);
  }
  os << "\r\n";
}

/// Splits one CSV record. Handles quoted fields; does not support embedded
/// newlines (the sensor formats are one record per line).
inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

struct RowError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string message;
};

/// Parsed batch-ingestion table: column 1 is `timestamp`, every further
/// column is one sensor stream, empty cell means missing sample.
struct SensorCsv {
  std::vector<std::string> columns;             // sensor column names, header order
  std::vector<std::vector<TimePoint>> series;   // per column, file row order
  std::vector<RowError> row_errors;
  std::size_t valid_rows = 0;
};

inline SensorCsv read_sensor_csv(std::istream& in) {
  SensorCsv out;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty input: missing CSV header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM

  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "timestamp")
    throw ParseError("first CSV column must be named 'timestamp'");
  if (header.size() < 2) throw ParseError("CSV has no sensor columns");
  out.columns.assign(header.begin() + 1, header.end());
  out.series.resize(out.columns.size());

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      out.row_errors.push_back({lineno, "expected " + std::to_string(header.size()) +
                                            " fields, got " + std::to_string(fields.size())});
      continue;
    }
    const auto ts = parse_timestamp(fields[0]);
    if (!ts) {
      out.row_errors.push_back({lineno, "unparseable timestamp '" + fields[0] + "'"});
      continue;
    }

    bool row_ok = true;
    std::vector<std::pair<std::size_t, double>> cells;
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const std::string& cell = fields[c];
      if (cell.empty()) continue;  // missing sample
      double v = 0.0;
      const auto r = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (r.ec != std::errc{} || r.ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        out.row_errors.push_back({lineno, "unparseable value '" + cell + "' in column '" +
                                              out.columns[c - 1] + "'"});
        row_ok = false;
        break;
      }
      cells.emplace_back(c - 1, v);
    }
    if (!row_ok) continue;

    for (const auto& [col, v] : cells) out.series[col].push_back({*ts, v});
    ++out.valid_rows;
  }
  return out;
}

inline SensorCsv read_sensor_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open CSV file: " + path);
  return read_sensor_csv(in);
}

}  // namespace svault
