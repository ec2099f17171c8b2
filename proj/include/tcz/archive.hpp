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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tcz/sparse.hpp"

namespace tcz {

// Version 1 layout, little-endian throughout:
//
//   header (32 bytes)
//     "TCZ1" | version u16 | flags u16 | m u32 | t u32 | k u32 |
//     mantissa_bits u8 | reserved u8[7] | crc32 of bytes [0, 28) u32
//   three block descriptors (18 bytes each), in order U, sigma, V
//     representation u8 | mantissa_bits u8 | shared_exponent i32 |
//     nnz u32 | payload_len u32 | crc32 u32
//   payloads, same order
//
// A block CRC covers the first 14 descriptor bytes followed by the payload.
// Dense payloads hold ceil(w/8)-byte two's-complement mantissas, row-major.
// Sparse payloads hold (row, col, mantissa) with minimal-width indices.
// Raw payloads hold IEEE floats of mantissa_bits (32 or 64) width.

inline constexpr std::array<std::uint8_t, 4> kArchiveMagic = {'T', 'C', 'Z', '1'};
inline constexpr std::uint16_t kArchiveVersion = 1;
inline constexpr std::size_t kHeaderBytes = 32;
inline constexpr std::size_t kDescriptorBytes = 18;
inline constexpr std::size_t kArchiveOverheadBytes = kHeaderBytes + 3 * kDescriptorBytes;

inline constexpr std::uint16_t kFlagNormalization = 1u << 0;
inline constexpr std::uint16_t kFlagSparsity = 1u << 1;

enum class BlockId : std::size_t { kU = 0, kSigma = 1, kV = 2 };

const char* to_string(BlockId id);

/// One factor block in logical (fully expanded) form. Exactly one of
/// mantissas / raw is populated, depending on representation.
struct ArchiveBlock {
  Representation representation = Representation::kDense;
  int mantissa_bits = 0;  // quantizer width, or float width for kRawFloat
  std::int32_t shared_exponent = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int32_t> mantissas;  // row-major, rows * cols
  std::vector<double> raw;              // row-major, rows * cols

  std::size_t nnz() const;
  std::size_t payload_bytes() const;
  friend bool operator==(const ArchiveBlock&, const ArchiveBlock&) = default;
};

struct Archive {
  std::uint32_t m = 0;
  std::uint32_t t = 0;
  std::uint32_t k = 0;
  std::uint16_t flags = 0;
  std::uint8_t mantissa_bits = 0;
  std::array<ArchiveBlock, 3> blocks;  // indexed by BlockId

  const ArchiveBlock& block(BlockId id) const { return blocks[static_cast<std::size_t>(id)]; }
  ArchiveBlock& block(BlockId id) { return blocks[static_cast<std::size_t>(id)]; }
  friend bool operator==(const Archive&, const Archive&) = default;
};

/// Serialized length without writing anything.
std::size_t archive_size_bytes(const Archive& a);

/// Canonical encoding. Throws kOutOfRange / kShapeMismatch for archives that
/// could never be read back (k = 0, blocks not m x k, 1 x k, t x k, ...).
std::vector<std::uint8_t> write_archive(const Archive& a);

/// Validates magic, version, lengths and CRCs before decoding. Errors:
/// kBadMagic, kUnsupportedVersion, kLengthOverrun, kCrcMismatch, kCorrupt.
Archive read_archive(std::span<const std::uint8_t> bytes);

void write_archive_file(const std::filesystem::path& path, const Archive& a);
Archive read_archive_file(const std::filesystem::path& path);

}  // namespace tcz
