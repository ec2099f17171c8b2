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

#include "tcz/sparse.hpp"

#include <algorithm>
#include <string>

#include "tcz/error.hpp"

namespace tcz {

const char* to_string(Representation r) {
  switch (r) {
    case Representation::kDense: return "dense";
    case Representation::kSparse: return "sparse";
    case Representation::kRawFloat: return "raw";
  }
  return "unknown";
}

std::size_t index_width_bytes(std::size_t rows, std::size_t cols) {
  const std::size_t largest = std::max(rows, cols);
  const std::size_t top = largest == 0 ? 0 : largest - 1;
  if (top <= 0xFF) return 1;
  if (top <= 0xFFFF) return 2;
  return 4;
}

SparseBlock encode_sparse(const NormalizedBlock& block, std::size_t rows, std::size_t cols) {
  if (block.length() != rows * cols) {
    throw Error(ErrorCode::kShapeMismatch, "block of " + std::to_string(block.length()) +
                                               " mantissas is not " + std::to_string(rows) + "x" +
                                               std::to_string(cols));
  }
  SparseBlock s{rows, cols, block.mantissa_bits, {}};
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const std::int32_t m = block.mantissas[i * cols + j];
      if (m != 0) s.entries.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), m});
    }
  }
  return s;
}

std::vector<std::int32_t> decode_sparse(const SparseBlock& s) {
  std::vector<std::int32_t> out(s.rows * s.cols, 0);
  const SparseEntry* prev = nullptr;
  for (const SparseEntry& e : s.entries) {
    if (e.row >= s.rows || e.col >= s.cols) {
      throw Error(ErrorCode::kCorrupt, "sparse index out of bounds");
    }
    if (prev != nullptr && (e.row < prev->row || (e.row == prev->row && e.col <= prev->col))) {
      throw Error(ErrorCode::kCorrupt, "sparse entries unsorted or duplicated");
    }
    if (e.mantissa == 0) throw Error(ErrorCode::kCorrupt, "sparse entry stores a zero");
    out[static_cast<std::size_t>(e.row) * s.cols + e.col] = e.mantissa;
    prev = &e;
  }
  return out;
}

std::size_t sparse_size_bytes(std::size_t nnz, std::size_t rows, std::size_t cols, int mantissa_bits) {
  return nnz * (2 * index_width_bytes(rows, cols) + mantissa_bytes(mantissa_bits)) + kSparseHeaderBytes;
}

std::size_t sparse_size_bytes(const SparseBlock& s) {
  return sparse_size_bytes(s.nnz(), s.rows, s.cols, s.mantissa_bits);
}

Representation choose_representation(const NormalizedBlock& block, std::size_t rows, std::size_t cols) {
  const auto nnz = static_cast<std::size_t>(
      std::count_if(block.mantissas.begin(), block.mantissas.end(), [](std::int32_t m) { return m != 0; }));
  return sparse_size_bytes(nnz, rows, cols, block.mantissa_bits) < normalized_size_bytes(block)
             ? Representation::kSparse
             : Representation::kDense;
}

}  // namespace tcz
