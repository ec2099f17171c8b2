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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tcz/normalize.hpp"

namespace tcz {

/// How a factor block is laid out in an archive.
enum class Representation : std::uint8_t {
  kDense = 0,     // every mantissa, row-major
  kSparse = 1,    // (row, col, mantissa) triplets of the nonzero mantissas
  kRawFloat = 2,  // IEEE floats, no quantization
};

const char* to_string(Representation r);

inline constexpr std::size_t kSparseHeaderBytes = 12;  // shape + nnz

struct SparseEntry {
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  std::int32_t mantissa = 0;
  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Coordinate encoding of a quantized rows x cols block. Entries are strictly
/// increasing in (row, col) and carry only nonzero mantissas.
struct SparseBlock {
  std::size_t rows = 0;
  std::size_t cols = 0;
  int mantissa_bits = kDefaultMantissaBits;
  std::vector<SparseEntry> entries;

  std::size_t nnz() const noexcept { return entries.size(); }
  friend bool operator==(const SparseBlock&, const SparseBlock&) = default;
};

/// Smallest of 1, 2 or 4 bytes whose unsigned range covers max(rows, cols) - 1.
std::size_t index_width_bytes(std::size_t rows, std::size_t cols);

/// Throws kShapeMismatch when block.length() != rows * cols.
SparseBlock encode_sparse(const NormalizedBlock& block, std::size_t rows, std::size_t cols);

/// Row-major mantissas with zeros everywhere not listed. Throws kCorrupt for
/// out-of-bounds, unsorted, duplicate or zero-valued entries.
std::vector<std::int32_t> decode_sparse(const SparseBlock& s);

/// nnz * (2 * index width + ceil(w/8)) + 12.
std::size_t sparse_size_bytes(const SparseBlock& s);
std::size_t sparse_size_bytes(std::size_t nnz, std::size_t rows, std::size_t cols, int mantissa_bits);

/// kSparse iff the sparse encoding is strictly smaller than the dense one.
Representation choose_representation(const NormalizedBlock& block, std::size_t rows, std::size_t cols);

}  // namespace tcz
