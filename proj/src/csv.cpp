// Copyright 2026 The tcz Authors.
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

#include "tcz/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tcz/error.hpp"

namespace tcz {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view field, std::size_t line_no) {
  std::string_view text = trim(field);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": malformed number '" +
                                       std::string(trim(field)) + "'");
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kNonFinite, "line " + std::to_string(line_no) + ": non-finite value");
  }
  return value;
}

}  // namespace

TimeSeriesMatrix load_csv(std::istream& in, const CsvLayout& layout) {
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t records = 0;
  std::size_t line_no = 0;
  bool header_pending = layout.has_header;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::string_view rest = line;
    std::size_t fields = 0;
    while (true) {
      const auto cut = rest.find(layout.delimiter);
      values.push_back(parse_number(rest.substr(0, cut), line_no));
      ++fields;
      if (cut == std::string_view::npos) break;
      rest.remove_prefix(cut + 1);
    }
    if (records == 0) {
      width = fields;
    } else if (fields != width) {
      throw Error(ErrorCode::kRaggedRows, "line " + std::to_string(line_no) + " has " +
                                              std::to_string(fields) + " fields, expected " +
                                              std::to_string(width));
    }
    ++records;
  }
  if (records == 0) throw Error(ErrorCode::kEmptyInput, "CSV input contains no data rows");

  Matrix parsed(records, width, std::move(values));
  if (layout.orientation == Orientation::kRowsAreTimestamps) parsed = parsed.transpose();
  return TimeSeriesMatrix(std::move(parsed));
}

TimeSeriesMatrix load_csv_file(const std::filesystem::path& path, const CsvLayout& layout) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return load_csv(in, layout);
}

void write_csv(std::ostream& out, const Matrix& x, const CsvLayout& layout) {
  const Matrix& oriented =
      layout.orientation == Orientation::kRowsAreTimestamps ? x.transpose() : x;
  char buf[32];
  std::string line;
  if (layout.has_header) {
    for (std::size_t j = 0; j < oriented.cols(); ++j) {
      if (j != 0) line.push_back(layout.delimiter);
      line += "c" + std::to_string(j);
    }
    out << line << '\n';
  }
  for (std::size_t i = 0; i < oriented.rows(); ++i) {
    line.clear();
    for (std::size_t j = 0; j < oriented.cols(); ++j) {
      if (j != 0) line.push_back(layout.delimiter);
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, oriented(i, j));
      line.append(buf, end);
    }
    line.push_back('\n');
    out << line;
  }
}

void write_csv_file(const std::filesystem::path& path, const Matrix& x, const CsvLayout& layout) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot create " + path.string());
  write_csv(out, x, layout);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace tcz
