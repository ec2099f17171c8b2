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

#include "tcz/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tcz/error.hpp"

namespace tcz {
namespace {

void check_width(int mantissa_bits) {
  if (mantissa_bits < kMinMantissaBits || mantissa_bits > kMaxMantissaBits) {
    throw Error(ErrorCode::kOutOfRange,
                "mantissa width " + std::to_string(mantissa_bits) + " outside [4, 32]");
  }
}

// Returns false when some mantissa exceeds the positive limit.
bool quantize_at(std::span<const double> values, int w, int e, std::vector<std::int32_t>& out) {
  const double limit = std::ldexp(1.0, w - 1) - 1.0;
  out.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double q = std::nearbyint(std::ldexp(values[i], w - 1 - e));
    if (q > limit) return false;
    out[i] = static_cast<std::int32_t>(q);
  }
  return true;
}

}  // namespace

NormalizedBlock normalize(std::span<const double> values, int mantissa_bits) {
  check_width(mantissa_bits);
  double max_abs = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "cannot normalize a non-finite value");
    max_abs = std::max(max_abs, std::fabs(v));
  }

  NormalizedBlock block;
  block.mantissa_bits = mantissa_bits;
  if (max_abs == 0.0) {
    block.mantissas.assign(values.size(), 0);
    return block;
  }
  int e = 0;
  std::frexp(max_abs, &e);
  if (!quantize_at(values, mantissa_bits, e, block.mantissas)) {
    ++e;
    quantize_at(values, mantissa_bits, e, block.mantissas);
  }
  block.shared_exponent = e;
  return block;
}

std::vector<double> denormalize(const NormalizedBlock& block) {
  std::vector<double> out(block.length());
  const int shift = block.shared_exponent - (block.mantissa_bits - 1);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::ldexp(static_cast<double>(block.mantissas[i]), shift);
  return out;
}

double half_step(const NormalizedBlock& block) {
  return std::ldexp(1.0, block.shared_exponent - block.mantissa_bits);
}

std::size_t normalized_size_bytes(const NormalizedBlock& block) {
  return mantissa_bytes(block.mantissa_bits) * block.length() + kExponentBytes;
}

void validate(const NormalizedBlock& block) {
  check_width(block.mantissa_bits);
  const std::int64_t hi = (std::int64_t{1} << (block.mantissa_bits - 1)) - 1;
  const std::int64_t lo = -(std::int64_t{1} << (block.mantissa_bits - 1));
  for (std::int32_t m : block.mantissas) {
    if (m < lo || m > hi) throw Error(ErrorCode::kCorrupt, "mantissa outside its declared width");
  }
}

}  // namespace tcz
