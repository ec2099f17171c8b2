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

#include <gtest/gtest.h>

#include <random>

#include "tcz/archive.hpp"
#include "tcz/error.hpp"

namespace tcz {
namespace {

ArchiveBlock random_block(std::mt19937_64& rng, std::size_t rows, std::size_t cols, Representation rep) {
  ArchiveBlock b;
  b.representation = rep;
  b.rows = rows;
  b.cols = cols;
  std::bernoulli_distribution keep(rep == Representation::kSparse ? 0.1 : 0.8);
  if (rep == Representation::kRawFloat) {
    b.mantissa_bits = rng() % 2 ? 32 : 64;
    std::normal_distribution<double> normal;
    b.raw.resize(rows * cols);
    for (double& v : b.raw) {
      v = keep(rng) ? normal(rng) : 0.0;
      if (b.mantissa_bits == 32) v = static_cast<float>(v);
    }
    return b;
  }
  b.mantissa_bits = 4 + static_cast<int>(rng() % 29);
  b.shared_exponent = static_cast<std::int32_t>(rng() % 200) - 100;
  const std::int64_t hi = (std::int64_t{1} << (b.mantissa_bits - 1)) - 1;
  std::uniform_int_distribution<std::int64_t> value(-hi - 1, hi);
  b.mantissas.resize(rows * cols);
  for (auto& m : b.mantissas) m = keep(rng) ? static_cast<std::int32_t>(value(rng)) : 0;
  return b;
}

Archive random_archive(std::mt19937_64& rng) {
  Archive a;
  a.m = 1 + static_cast<std::uint32_t>(rng() % 300);
  a.t = 1 + static_cast<std::uint32_t>(rng() % 300);
  a.k = 1 + static_cast<std::uint32_t>(rng() % std::min<std::uint32_t>({a.m, a.t, 6}));
  const int mode = static_cast<int>(rng() % 3);
  a.flags = mode == 0 ? 0 : mode == 1 ? kFlagNormalization : (kFlagNormalization | kFlagSparsity);
  a.mantissa_bits = mode == 0 ? 0 : 24;
  const std::size_t rows[3] = {a.m, 1, a.t};
  for (std::size_t b = 0; b < 3; ++b) {
    Representation rep = Representation::kRawFloat;
    if (mode == 1) rep = Representation::kDense;
    if (mode == 2) rep = rng() % 2 ? Representation::kSparse : Representation::kDense;
    a.blocks[b] = random_block(rng, rows[b], a.k, rep);
  }
  return a;
}

ErrorCode read_error(const std::vector<std::uint8_t>& bytes) {
  try {
    read_archive(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

TEST(ArchiveTest, RoundTripIsExact) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 300; ++trial) {
    const Archive a = random_archive(rng);
    const std::vector<std::uint8_t> bytes = write_archive(a);
    EXPECT_EQ(bytes.size(), archive_size_bytes(a));
    EXPECT_EQ(read_archive(bytes), a);
    EXPECT_EQ(write_archive(a), bytes);
  }
}

TEST(ArchiveTest, HeaderLayout) {
  std::mt19937_64 rng(59);
  const Archive a = random_archive(rng);
  const std::vector<std::uint8_t> bytes = write_archive(a);
  EXPECT_EQ(kHeaderBytes, 32u);
  EXPECT_EQ(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 4),
            (std::vector<std::uint8_t>{'T', 'C', 'Z', '1'}));
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5], 0);
  EXPECT_EQ(bytes[8] | bytes[9] << 8 | bytes[10] << 16 | bytes[11] << 24, static_cast<int>(a.m));
  EXPECT_EQ(bytes[16] | bytes[17] << 8, static_cast<int>(a.k));
  for (std::size_t i = 21; i < 28; ++i) EXPECT_EQ(bytes[i], 0);
}

TEST(ArchiveTest, RejectsUnwritableArchives) {
  std::mt19937_64 rng(61);
  Archive a = random_archive(rng);
  Archive no_k = a;
  no_k.k = 0;
  EXPECT_THROW(write_archive(no_k), Error);
  Archive bad_shape = a;
  bad_shape.blocks[0].rows += 1;
  EXPECT_THROW(write_archive(bad_shape), Error);
  Archive bad_flags = a;
  bad_flags.flags = kFlagSparsity;
  EXPECT_THROW(write_archive(bad_flags), Error);
}

TEST(ArchiveTest, DistinctErrors) {
  std::mt19937_64 rng(67);
  Archive a = random_archive(rng);
  while (a.blocks[0].payload_bytes() == 0) a = random_archive(rng);
  const std::vector<std::uint8_t> good = write_archive(a);

  auto bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_EQ(read_error(bad_magic), ErrorCode::kBadMagic);
  EXPECT_EQ(read_error({}), ErrorCode::kBadMagic);

  auto version = good;
  version[4] = 2;
  EXPECT_EQ(read_error(version), ErrorCode::kUnsupportedVersion);

  auto header_bit = good;
  header_bit[9] ^= 0x10;
  EXPECT_EQ(read_error(header_bit), ErrorCode::kCrcMismatch);

  auto payload_bit = good;
  payload_bit[kArchiveOverheadBytes] ^= 0x01;
  EXPECT_EQ(read_error(payload_bit), ErrorCode::kCrcMismatch);

  auto descriptor_byte = good;
  descriptor_byte[kHeaderBytes + 2] ^= 0x01;  // shared exponent of U
  EXPECT_EQ(read_error(descriptor_byte), ErrorCode::kCrcMismatch);

  const auto truncated = std::vector<std::uint8_t>(good.begin(), good.end() - 1);
  EXPECT_EQ(read_error(truncated), ErrorCode::kLengthOverrun);
  const auto short_header = std::vector<std::uint8_t>(good.begin(), good.begin() + 20);
  EXPECT_EQ(read_error(short_header), ErrorCode::kLengthOverrun);
  const auto no_descriptors = std::vector<std::uint8_t>(good.begin(), good.begin() + 40);
  EXPECT_EQ(read_error(no_descriptors), ErrorCode::kLengthOverrun);

  auto trailing = good;
  trailing.push_back(0);
  EXPECT_EQ(read_error(trailing), ErrorCode::kCorrupt);
}

}  // namespace
}  // namespace tcz
