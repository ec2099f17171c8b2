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

#include "tcz/archive.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "tcz/error.hpp"

namespace tcz {
namespace {

std::uint32_t crc32_of(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b = {}) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, a.data(), static_cast<uInt>(a.size()));
  if (!b.empty()) crc = crc32(crc, b.data(), static_cast<uInt>(b.size()));
  return static_cast<std::uint32_t>(crc);
}

class ByteWriter {
 public:
  explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  void put_le(std::uint64_t v, std::size_t bytes) {
    for (std::size_t i = 0; i < bytes; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u8(std::uint8_t v) { put_le(v, 1); }
  void u16(std::uint16_t v) { put_le(v, 2); }
  void u32(std::uint32_t v) { put_le(v, 4); }
  void i32(std::int32_t v) { put_le(static_cast<std::uint32_t>(v), 4); }

 private:
  std::vector<std::uint8_t>& out_;
};

std::uint64_t get_le(const std::uint8_t* p, std::size_t bytes) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < bytes; ++i) v |= std::uint64_t{p[i]} << (8 * i);
  return v;
}

std::int32_t sign_extend(std::uint64_t v, std::size_t bytes) {
  const unsigned bits = static_cast<unsigned>(bytes * 8);
  if (bits < 64 && (v >> (bits - 1)) & 1u) v |= ~std::uint64_t{0} << bits;
  return static_cast<std::int32_t>(static_cast<std::int64_t>(v));
}

std::size_t expected_rows(const Archive& a, BlockId id) {
  switch (id) {
    case BlockId::kU: return a.m;
    case BlockId::kSigma: return 1;
    case BlockId::kV: return a.t;
  }
  return 0;
}

bool mantissa_in_range(std::int32_t m, int bits) {
  const std::int64_t hi = (std::int64_t{1} << (bits - 1)) - 1;
  return m >= -hi - 1 && m <= hi;
}

void check_writable(const Archive& a) {
  if (a.m == 0 || a.t == 0) throw Error(ErrorCode::kOutOfRange, "archive needs m, t >= 1");
  if (a.k == 0) throw Error(ErrorCode::kOutOfRange, "archive needs at least one singular triplet");
  if (a.k > std::min(a.m, a.t)) throw Error(ErrorCode::kOutOfRange, "k exceeds min(m, t)");
  const bool normalized = (a.flags & kFlagNormalization) != 0;
  if ((a.flags & ~(kFlagNormalization | kFlagSparsity)) != 0 ||
      ((a.flags & kFlagSparsity) != 0 && !normalized)) {
    throw Error(ErrorCode::kOutOfRange, "invalid stage flags");
  }
  for (std::size_t b = 0; b < 3; ++b) {
    const ArchiveBlock& blk = a.blocks[b];
    if (blk.rows != expected_rows(a, static_cast<BlockId>(b)) || blk.cols != a.k) {
      throw Error(ErrorCode::kShapeMismatch, std::string("block ") + to_string(static_cast<BlockId>(b)) +
                                                 " has the wrong shape");
    }
    const std::size_t count = blk.rows * blk.cols;
    if (blk.representation == Representation::kRawFloat) {
      if (normalized) throw Error(ErrorCode::kOutOfRange, "raw block in a normalized archive");
      if (blk.mantissa_bits != 32 && blk.mantissa_bits != 64) {
        throw Error(ErrorCode::kOutOfRange, "raw blocks hold 32- or 64-bit floats");
      }
      if (blk.raw.size() != count || !blk.mantissas.empty()) {
        throw Error(ErrorCode::kShapeMismatch, "raw block value count");
      }
      if (blk.mantissa_bits == 32) {
        for (double v : blk.raw) {
          if (static_cast<double>(static_cast<float>(v)) != v) {
            throw Error(ErrorCode::kOutOfRange, "value not representable as a 32-bit float");
          }
        }
      }
    } else {
      if (!normalized) throw Error(ErrorCode::kOutOfRange, "quantized block without normalization flag");
      if (blk.representation == Representation::kSparse && (a.flags & kFlagSparsity) == 0) {
        throw Error(ErrorCode::kOutOfRange, "sparse block without sparsity flag");
      }
      if (blk.mantissa_bits < kMinMantissaBits || blk.mantissa_bits > kMaxMantissaBits) {
        throw Error(ErrorCode::kOutOfRange, "mantissa width outside [4, 32]");
      }
      if (blk.mantissas.size() != count || !blk.raw.empty()) {
        throw Error(ErrorCode::kShapeMismatch, "quantized block mantissa count");
      }
      for (std::int32_t m : blk.mantissas) {
        if (!mantissa_in_range(m, blk.mantissa_bits)) {
          throw Error(ErrorCode::kOutOfRange, "mantissa outside its declared width");
        }
      }
    }
  }
}

void write_payload(const ArchiveBlock& blk, std::vector<std::uint8_t>& out) {
  ByteWriter w(out);
  switch (blk.representation) {
    case Representation::kDense: {
      const std::size_t mb = mantissa_bytes(blk.mantissa_bits);
      for (std::int32_t m : blk.mantissas) w.put_le(static_cast<std::uint32_t>(m), mb);
      break;
    }
    case Representation::kSparse: {
      const std::size_t iw = index_width_bytes(blk.rows, blk.cols);
      const std::size_t mb = mantissa_bytes(blk.mantissa_bits);
      for (std::size_t i = 0; i < blk.mantissas.size(); ++i) {
        if (blk.mantissas[i] == 0) continue;
        w.put_le(i / blk.cols, iw);
        w.put_le(i % blk.cols, iw);
        w.put_le(static_cast<std::uint32_t>(blk.mantissas[i]), mb);
      }
      break;
    }
    case Representation::kRawFloat:
      for (double v : blk.raw) {
        if (blk.mantissa_bits == 32) {
          w.u32(std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        } else {
          w.put_le(std::bit_cast<std::uint64_t>(v), 8);
        }
      }
      break;
  }
}

void read_payload(std::span<const std::uint8_t> p, ArchiveBlock& blk, std::size_t nnz) {
  const std::size_t count = blk.rows * blk.cols;
  switch (blk.representation) {
    case Representation::kDense: {
      const std::size_t mb = mantissa_bytes(blk.mantissa_bits);
      if (p.size() != count * mb) throw Error(ErrorCode::kCorrupt, "dense payload length");
      blk.mantissas.resize(count);
      std::size_t nonzero = 0;
      for (std::size_t i = 0; i < count; ++i) {
        const std::int32_t m = sign_extend(get_le(p.data() + i * mb, mb), mb);
        if (!mantissa_in_range(m, blk.mantissa_bits)) throw Error(ErrorCode::kCorrupt, "mantissa out of range");
        blk.mantissas[i] = m;
        nonzero += m != 0 ? 1 : 0;
      }
      if (nonzero != nnz) throw Error(ErrorCode::kCorrupt, "dense block nonzero count");
      break;
    }
    case Representation::kSparse: {
      const std::size_t iw = index_width_bytes(blk.rows, blk.cols);
      const std::size_t mb = mantissa_bytes(blk.mantissa_bits);
      const std::size_t stride = 2 * iw + mb;
      if (nnz > count || p.size() != nnz * stride) throw Error(ErrorCode::kCorrupt, "sparse payload length");
      SparseBlock s{blk.rows, blk.cols, blk.mantissa_bits, {}};
      s.entries.reserve(nnz);
      for (std::size_t i = 0; i < nnz; ++i) {
        const std::uint8_t* e = p.data() + i * stride;
        const std::uint64_t row = get_le(e, iw);
        const std::uint64_t col = get_le(e + iw, iw);
        const std::int32_t m = sign_extend(get_le(e + 2 * iw, mb), mb);
        if (row >= blk.rows || col >= blk.cols) throw Error(ErrorCode::kCorrupt, "sparse index out of bounds");
        if (!mantissa_in_range(m, blk.mantissa_bits)) throw Error(ErrorCode::kCorrupt, "mantissa out of range");
        s.entries.push_back({static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(col), m});
      }
      blk.mantissas = decode_sparse(s);
      break;
    }
    case Representation::kRawFloat: {
      const std::size_t width = static_cast<std::size_t>(blk.mantissa_bits / 8);
      if (p.size() != count * width) throw Error(ErrorCode::kCorrupt, "raw payload length");
      blk.raw.resize(count);
      std::size_t nonzero = 0;
      for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t bits = get_le(p.data() + i * width, width);
        const double v = width == 4 ? static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(bits)))
                                    : std::bit_cast<double>(bits);
        if (!std::isfinite(v)) throw Error(ErrorCode::kCorrupt, "non-finite raw value");
        blk.raw[i] = v;
        nonzero += v != 0.0 ? 1 : 0;
      }
      if (nonzero != nnz) throw Error(ErrorCode::kCorrupt, "raw block nonzero count");
      break;
    }
  }
}

}  // namespace

const char* to_string(BlockId id) {
  switch (id) {
    case BlockId::kU: return "U";
    case BlockId::kSigma: return "sigma";
    case BlockId::kV: return "V";
  }
  return "?";
}

std::size_t ArchiveBlock::nnz() const {
  if (representation == Representation::kRawFloat) {
    return static_cast<std::size_t>(std::count_if(raw.begin(), raw.end(), [](double v) { return v != 0.0; }));
  }
  return static_cast<std::size_t>(
      std::count_if(mantissas.begin(), mantissas.end(), [](std::int32_t m) { return m != 0; }));
}

std::size_t ArchiveBlock::payload_bytes() const {
  const std::size_t count = rows * cols;
  switch (representation) {
    case Representation::kDense: return count * mantissa_bytes(mantissa_bits);
    case Representation::kSparse:
      return nnz() * (2 * index_width_bytes(rows, cols) + mantissa_bytes(mantissa_bits));
    case Representation::kRawFloat: return count * static_cast<std::size_t>(mantissa_bits / 8);
  }
  return 0;
}

std::size_t archive_size_bytes(const Archive& a) {
  std::size_t total = kArchiveOverheadBytes;
  for (const ArchiveBlock& b : a.blocks) total += b.payload_bytes();
  return total;
}

std::vector<std::uint8_t> write_archive(const Archive& a) {
  check_writable(a);
  std::vector<std::uint8_t> out;
  out.reserve(archive_size_bytes(a));
  ByteWriter w(out);
  out.insert(out.end(), kArchiveMagic.begin(), kArchiveMagic.end());
  w.u16(kArchiveVersion);
  w.u16(a.flags);
  w.u32(a.m);
  w.u32(a.t);
  w.u32(a.k);
  w.u8(a.mantissa_bits);
  w.put_le(0, 7);
  w.u32(crc32_of(std::span<const std::uint8_t>(out).first(kHeaderBytes - 4)));

  std::array<std::vector<std::uint8_t>, 3> payloads;
  for (std::size_t b = 0; b < 3; ++b) write_payload(a.blocks[b], payloads[b]);
  for (std::size_t b = 0; b < 3; ++b) {
    const ArchiveBlock& blk = a.blocks[b];
    const std::size_t start = out.size();
    w.u8(static_cast<std::uint8_t>(blk.representation));
    w.u8(static_cast<std::uint8_t>(blk.mantissa_bits));
    w.i32(blk.shared_exponent);
    w.u32(static_cast<std::uint32_t>(blk.nnz()));
    w.u32(static_cast<std::uint32_t>(payloads[b].size()));
    w.u32(crc32_of(std::span<const std::uint8_t>(out).subspan(start, kDescriptorBytes - 4), payloads[b]));
  }
  for (const auto& p : payloads) out.insert(out.end(), p.begin(), p.end());
  return out;
}

Archive read_archive(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kArchiveMagic.size() || !std::equal(kArchiveMagic.begin(), kArchiveMagic.end(), bytes.begin())) {
    throw Error(ErrorCode::kBadMagic, "not a TCZ1 archive");
  }
  if (bytes.size() < kHeaderBytes) throw Error(ErrorCode::kLengthOverrun, "archive header truncated");
  const std::uint8_t* h = bytes.data();
  const auto version = static_cast<std::uint16_t>(get_le(h + 4, 2));
  if (version != kArchiveVersion) {
    throw Error(ErrorCode::kUnsupportedVersion, "unsupported archive version " + std::to_string(version));
  }
  if (get_le(h + 28, 4) != crc32_of(bytes.first(kHeaderBytes - 4))) {
    throw Error(ErrorCode::kCrcMismatch, "header CRC mismatch");
  }

  Archive a;
  a.flags = static_cast<std::uint16_t>(get_le(h + 6, 2));
  a.m = static_cast<std::uint32_t>(get_le(h + 8, 4));
  a.t = static_cast<std::uint32_t>(get_le(h + 12, 4));
  a.k = static_cast<std::uint32_t>(get_le(h + 16, 4));
  a.mantissa_bits = h[20];
  const bool normalized = (a.flags & kFlagNormalization) != 0;
  if (a.m == 0 || a.t == 0 || a.k == 0 || a.k > std::min(a.m, a.t) ||
      (a.flags & ~(kFlagNormalization | kFlagSparsity)) != 0 ||
      ((a.flags & kFlagSparsity) != 0 && !normalized)) {
    throw Error(ErrorCode::kCorrupt, "inconsistent archive header");
  }

  if (bytes.size() < kArchiveOverheadBytes) throw Error(ErrorCode::kLengthOverrun, "block descriptors truncated");
  std::size_t offset = kArchiveOverheadBytes;
  for (std::size_t b = 0; b < 3; ++b) {
    const std::uint8_t* d = bytes.data() + kHeaderBytes + b * kDescriptorBytes;
    const std::size_t payload_len = get_le(d + 10, 4);
    if (payload_len > bytes.size() - offset) {
      throw Error(ErrorCode::kLengthOverrun, std::string("payload of block ") +
                                                 to_string(static_cast<BlockId>(b)) + " runs past the end");
    }
    const auto payload = bytes.subspan(offset, payload_len);
    if (get_le(d + 14, 4) != crc32_of(std::span<const std::uint8_t>(d, kDescriptorBytes - 4), payload)) {
      throw Error(ErrorCode::kCrcMismatch,
                  std::string("CRC mismatch in block ") + to_string(static_cast<BlockId>(b)));
    }
    offset += payload_len;

    ArchiveBlock& blk = a.blocks[b];
    if (d[0] > static_cast<std::uint8_t>(Representation::kRawFloat)) {
      throw Error(ErrorCode::kCorrupt, "unknown block representation");
    }
    blk.representation = static_cast<Representation>(d[0]);
    blk.mantissa_bits = d[1];
    blk.shared_exponent = static_cast<std::int32_t>(static_cast<std::uint32_t>(get_le(d + 2, 4)));
    blk.rows = expected_rows(a, static_cast<BlockId>(b));
    blk.cols = a.k;
    const bool raw = blk.representation == Representation::kRawFloat;
    if (raw == normalized || (blk.representation == Representation::kSparse && (a.flags & kFlagSparsity) == 0)) {
      throw Error(ErrorCode::kCorrupt, "block representation disagrees with stage flags");
    }
    if (raw ? (blk.mantissa_bits != 32 && blk.mantissa_bits != 64)
            : (blk.mantissa_bits < kMinMantissaBits || blk.mantissa_bits > kMaxMantissaBits)) {
      throw Error(ErrorCode::kCorrupt, "invalid block width");
    }
    read_payload(payload, blk, get_le(d + 6, 4));
  }
  if (offset != bytes.size()) throw Error(ErrorCode::kCorrupt, "trailing bytes after the last payload");
  return a;
}

void write_archive_file(const std::filesystem::path& path, const Archive& a) {
  const std::vector<std::uint8_t> bytes = write_archive(a);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

Archive read_archive_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return read_archive(bytes);
}

}  // namespace tcz
