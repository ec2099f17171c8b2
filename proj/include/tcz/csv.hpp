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

#pragma once

#include <filesystem>
#include <iosfwd>

#include "tcz/matrix.hpp"

namespace tcz {

enum class Orientation {
  kRowsAreDevices,     // one line per device, one field per timestamp
  kRowsAreTimestamps,  // one line per timestamp; transposed on load
};

struct CsvLayout {
  char delimiter = ',';
  bool has_header = false;  // a single header line, skipped on read
  Orientation orientation = Orientation::kRowsAreDevices;
};

/// Parses decimal numbers (fixed or scientific). Blank lines are ignored.
/// Throws kEmptyInput, kParse, kRaggedRows or kNonFinite.
TimeSeriesMatrix load_csv(std::istream& in, const CsvLayout& layout = {});
TimeSeriesMatrix load_csv_file(const std::filesystem::path& path, const CsvLayout& layout = {});

/// Shortest round-trip formatting: load_csv(write_csv(x)) == x bit for bit.
void write_csv(std::ostream& out, const Matrix& x, const CsvLayout& layout = {});
void write_csv_file(const std::filesystem::path& path, const Matrix& x,
                    const CsvLayout& layout = {});

}  // namespace tcz
