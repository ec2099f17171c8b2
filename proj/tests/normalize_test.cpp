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

#include <cmath>
#include <random>

#include "tcz/error.hpp"
#include "tcz/normalize.hpp"
#include "test_support.hpp"

namespace tcz {
namespace {

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> scale(-60, 60);
  const double s = std::ldexp(1.0, scale(rng));
  std::vector<double> v(n);
  for (double& x : v) x = unit(rng) * s;
  return v;
}

TEST(NormalizeTest, ZeroBlock) {
  const NormalizedBlock b = normalize(std::vector<double>{0, 0, 0}, 16);
  EXPECT_EQ(b.shared_exponent, 0);
  EXPECT_EQ(b.mantissas, (std::vector<std::int32_t>{0, 0, 0}));
  EXPECT_EQ(denormalize(b), (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(normalize(std::vector<double>{}, 8).length(), 0u);
}

TEST(NormalizeTest, DyadicExamplesMatchReference) {
  const std::vector<double> one = {1.0};
  const testing::ReferenceQuantized ref1 = testing::reference_quantize(one, 8);
  const NormalizedBlock b1 = normalize(one, 8);
  EXPECT_EQ(ref1.exponent, 1);
  EXPECT_EQ(b1.shared_exponent, 1);
  EXPECT_EQ(b1.mantissas[0], 64);
  EXPECT_EQ(denormalize(b1), one);

  const std::vector<double> two = {3.25, -0.5};
  const testing::ReferenceQuantized ref2 = testing::reference_quantize(two, 16);
  const NormalizedBlock b2 = normalize(two, 16);
  EXPECT_EQ(ref2.exponent, 2);
  EXPECT_EQ(b2.shared_exponent, 2);
  EXPECT_EQ(b2.mantissas, (std::vector<std::int32_t>{26624, -4096}));
  EXPECT_EQ(ref2.mantissas, (std::vector<std::int64_t>{26624, -4096}));
  EXPECT_EQ(denormalize(b2), two);
}

TEST(NormalizeTest, AgreesWithReferenceOnRandomBlocks) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const int w = 4 + static_cast<int>(rng() % 29);
    const std::vector<double> v = random_values(rng, 1 + rng() % 40);
    const testing::ReferenceQuantized ref = testing::reference_quantize(v, w);
    const NormalizedBlock b = normalize(v, w);
    ASSERT_EQ(b.shared_exponent, ref.exponent) << "w=" << w;
    for (std::size_t i = 0; i < v.size(); ++i) ASSERT_EQ(b.mantissas[i], ref.mantissas[i]);
  }
}

TEST(NormalizeTest, RoundsHalfToEven) {
  // 8 bits, e = 1: step = 2^-6, so 0.5 * step offsets land exactly on ties.
  const double step = std::ldexp(1.0, -6);
  const NormalizedBlock b = normalize(std::vector<double>{1.0, 2.5 * step, 3.5 * step, -2.5 * step}, 8);
  EXPECT_EQ(b.shared_exponent, 1);
  EXPECT_EQ(b.mantissas[1], 2);
  EXPECT_EQ(b.mantissas[2], 4);
  EXPECT_EQ(b.mantissas[3], -2);
}

TEST(NormalizeTest, TopCellBumpsExponentInsteadOfClamping) {
  // 0.99 at w = 4 would round to 8 = 2^(w-1) under the frexp exponent.
  const NormalizedBlock b = normalize(std::vector<double>{0.99, 0.1}, 4);
  EXPECT_EQ(b.shared_exponent, 1);
  EXPECT_EQ(b.mantissas[0], 4);
  EXPECT_LE(std::fabs(denormalize(b)[0] - 0.99), half_step(b));
  // The negative extreme fits without a bump.
  const NormalizedBlock n = normalize(std::vector<double>{-0.99}, 4);
  EXPECT_EQ(n.shared_exponent, 0);
  EXPECT_EQ(n.mantissas[0], -8);
}

TEST(NormalizeTest, Errors) {
  EXPECT_THROW(normalize(std::vector<double>{1.0}, 3), Error);
  EXPECT_THROW(normalize(std::vector<double>{1.0}, 33), Error);
  EXPECT_THROW(normalize(std::vector<double>{INFINITY}, 16), Error);
  EXPECT_THROW(normalize(std::vector<double>{std::nan("")}, 16), Error);
}

TEST(NormalizeTest, HalfStepBoundAndTightness) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 2000; ++trial) {
    const int w = 4 + static_cast<int>(rng() % 29);
    const std::vector<double> v = random_values(rng, 1 + rng() % 64);
    const NormalizedBlock b = normalize(v, w);
    const std::vector<double> back = denormalize(b);
    const double bound = std::ldexp(1.0, b.shared_exponent - w);
    ASSERT_EQ(bound, half_step(b));
    std::int64_t peak = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      ASSERT_LE(std::fabs(v[i] - back[i]), bound);
      ASSERT_LE(b.mantissas[i], (std::int64_t{1} << (w - 1)) - 1);
      ASSERT_GE(b.mantissas[i], -(std::int64_t{1} << (w - 1)));
      peak = std::max<std::int64_t>(peak, std::abs(std::int64_t{b.mantissas[i]}));
    }
    EXPECT_GE(peak, std::int64_t{1} << (w - 2));
    // One exponent lower must overflow the signed range.
    bool overflow = false;
    for (double x : v) {
      const double q = std::nearbyint(std::ldexp(x, w - b.shared_exponent));
      overflow = overflow || q > std::ldexp(1.0, w - 1) - 1 || q < -std::ldexp(1.0, w - 1);
    }
    EXPECT_TRUE(overflow);
  }
}

TEST(NormalizeTest, ScaleEquivariance) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const int w = 4 + static_cast<int>(rng() % 29);
    const std::vector<double> v = random_values(rng, 1 + rng() % 20);
    const int shift = static_cast<int>(rng() % 41) - 20;
    std::vector<double> scaled(v);
    for (double& x : scaled) x = std::ldexp(x, shift);
    const NormalizedBlock a = normalize(v, w);
    const NormalizedBlock b = normalize(scaled, w);
    EXPECT_EQ(a.mantissas, b.mantissas);
    EXPECT_EQ(b.shared_exponent, a.shared_exponent + shift);
  }
}

TEST(NormalizeTest, WiderMantissasAreNoWorse) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> v = random_values(rng, 32);
    for (int w = 4; w < 32; ++w) {
      const NormalizedBlock narrow = normalize(v, w);
      const NormalizedBlock wide = normalize(v, w + 1);
      const std::vector<double> a = denormalize(narrow);
      const std::vector<double> b = denormalize(wide);
      for (std::size_t i = 0; i < v.size(); ++i) {
        EXPECT_LE(std::fabs(v[i] - b[i]), std::fabs(v[i] - a[i]) + half_step(wide));
      }
    }
  }
}

TEST(NormalizeTest, WorstCaseErrorSitsMidCell) {
  // Scan one quantization cell [m, m+1] * step on a fine grid; the largest
  // error is half a step and occurs at the midpoint.
  const int w = 10;
  const double anchor = 0.9;  // fixes e = 0
  const double step = std::ldexp(1.0, -(w - 1));
  const double lo = 100 * step;
  double worst = 0.0;
  double worst_at = 0.0;
  const int samples = 1024;
  for (int s = 0; s <= samples; ++s) {
    const double x = lo + step * s / samples;
    const NormalizedBlock b = normalize(std::vector<double>{anchor, x}, w);
    ASSERT_EQ(b.shared_exponent, 0);
    const double err = std::fabs(denormalize(b)[1] - x);
    if (err > worst) {
      worst = err;
      worst_at = (x - lo) / step;
    }
  }
  EXPECT_EQ(worst, step / 2);
  EXPECT_EQ(worst_at, 0.5);
}

TEST(NormalizeTest, SizeModel) {
  NormalizedBlock b;
  b.mantissa_bits = 24;
  b.mantissas.assign(1000, 1);
  EXPECT_EQ(normalized_size_bytes(b), 3004u);
  // Against 4-byte IEEE singles: one exponent byte saved per value.
  EXPECT_NEAR(1.0 - 3004.0 / 4000.0, 0.25, 0.002);
  b.mantissa_bits = 16;
  b.mantissas.assign(10, 1);
  EXPECT_EQ(normalized_size_bytes(b), 24u);
  b.mantissas.clear();
  EXPECT_EQ(normalized_size_bytes(b), 4u);
  EXPECT_EQ(mantissa_bytes(4), 1u);
  EXPECT_EQ(mantissa_bytes(9), 2u);
  EXPECT_EQ(mantissa_bytes(32), 4u);
}

TEST(NormalizeTest, ValidateCatchesOutOfRangeMantissa) {
  NormalizedBlock b{0, 8, {127, -128}};
  EXPECT_NO_THROW(validate(b));
  b.mantissas.push_back(128);
  EXPECT_THROW(validate(b), Error);
}

}  // namespace
}  // namespace tcz
