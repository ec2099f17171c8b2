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
#include <span>
#include <vector>

namespace tcz {

inline constexpr int kMinMantissaBits = 4;
inline constexpr int kMaxMantissaBits = 32;
inline constexpr int kDefaultMantissaBits = 24;
inline constexpr std::size_t kExponentBytes = 4;

/// Block floating point: value_i = mantissa_i * 2^(shared_exponent - (w - 1)),
/// every mantissa a signed w-bit integer.
struct NormalizedBlock {
  std::int32_t shared_exponent = 0;
  int mantissa_bits = kDefaultMantissaBits;
  std::vector<std::int32_t> mantissas;

  std::size_t length() const noexcept { return mantissas.size(); }
  friend bool operator==(const NormalizedBlock&, const NormalizedBlock&) = default;
};

/// Bytes one mantissa of the given width occupies: ceil(w / 8).
constexpr std::size_t mantissa_bytes(int mantissa_bits) {
  return static_cast<std::size_t>((mantissa_bits + 7) / 8);
}

/// Quantizes to one shared radix-2 exponent with round-half-to-even.
///
/// The exponent is the smallest e at which every rounded mantissa fits the
/// signed w-bit range. That is the frexp exponent of max|value| except when
/// the largest positive value rounds up to 2^(w-1); then e grows by one
/// instead of clamping, which keeps every element within half a step,
/// 2^(e-w). An all-zero input yields e = 0.
///
/// Throws kOutOfRange for w outside [4, 32] and kNonFinite for NaN/inf.
NormalizedBlock normalize(std::span<const double> values, int mantissa_bits = kDefaultMantissaBits);

std::vector<double> denormalize(const NormalizedBlock& block);

/// Largest reconstruction error denormalize() can show for this block.
double half_step(const NormalizedBlock& block);

/// ceil(w/8) * length + 4 exponent bytes.
std::size_t normalized_size_bytes(const NormalizedBlock& block);

/// Checks mantissa widths and ranges; throws kOutOfRange / kCorrupt.
void validate(const NormalizedBlock& block);

}  // namespace tcz
