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
#include "tcz/stats.hpp"
#include "tcz/svd.hpp"
#include "test_support.hpp"

namespace tcz {
namespace {

using testing::orthonormality_defect;

void expect_sign_convention(const SvdFactors& f) {
  for (std::size_t c = 0; c < f.k(); ++c) {
    double best = 0.0;
    double value = 0.0;
    for (std::size_t r = 0; r < f.u.rows(); ++r) {
      if (std::fabs(f.u(r, c)) > best) {
        best = std::fabs(f.u(r, c));
        value = f.u(r, c);
      }
    }
    EXPECT_GE(value, 0.0) << "column " << c;
  }
}

void expect_valid(const SvdFactors& f, const Matrix& x) {
  ASSERT_EQ(f.k(), std::min(x.rows(), x.cols()));
  ASSERT_EQ(f.u.rows(), x.rows());
  ASSERT_EQ(f.v.rows(), x.cols());
  for (std::size_t i = 0; i < f.k(); ++i) {
    EXPECT_GE(f.sigma[i], 0.0);
    if (i > 0) EXPECT_LE(f.sigma[i], f.sigma[i - 1]);
  }
  EXPECT_LE(orthonormality_defect(f.u), 1e-8);
  EXPECT_LE(orthonormality_defect(f.v), 1e-8);
  expect_sign_convention(f);
  const double norm2 = x.frobenius_norm_squared();
  if (norm2 > 0.0) {
    EXPECT_LE(std::sqrt(testing::squared_distance(reconstruct(f).matrix(), x) / norm2), 1e-9);
  }
}

TEST(SvdTest, Diagonal) {
  const Matrix x{{3, 0}, {0, 1}};
  const SvdFactors f = svd(x);
  EXPECT_NEAR(f.sigma[0], 3.0, 1e-15);
  EXPECT_NEAR(f.sigma[1], 1.0, 1e-15);
  EXPECT_NEAR(f.u(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(f.u(1, 1), 1.0, 1e-15);
  EXPECT_NEAR(f.v(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(f.v(1, 1), 1.0, 1e-15);
  expect_valid(f, x);
}

TEST(SvdTest, RankOneTwoByTwoAgainstClosedForm) {
  const auto [s1, s2] = testing::singular_values_2x2(1, 2, 2, 4);
  const auto [v0, v1] = testing::gram_eigenvector_2x2(1, 2, 2, 4, s1 * s1);
  // u = X v / sigma
  const double u0 = (1 * v0 + 2 * v1) / s1;
  const double u1 = (2 * v0 + 4 * v1) / s1;
  const double sign = std::fabs(u0) >= std::fabs(u1) ? (u0 < 0 ? -1.0 : 1.0) : (u1 < 0 ? -1.0 : 1.0);

  const Matrix x{{1, 2}, {2, 4}};
  const SvdFactors f = svd(x);
  EXPECT_NEAR(f.sigma[0], s1, 1e-14);
  EXPECT_NEAR(f.sigma[0], 5.0, 1e-14);
  EXPECT_NEAR(f.sigma[1], s2, 1e-14);
  EXPECT_NEAR(f.u(0, 0), sign * u0, 1e-14);
  EXPECT_NEAR(f.u(1, 0), sign * u1, 1e-14);
  EXPECT_NEAR(f.v(0, 0), sign * v0, 1e-14);
  EXPECT_NEAR(f.v(1, 0), sign * v1, 1e-14);
  EXPECT_NEAR(f.u(1, 0), 2.0 / std::sqrt(5.0), 1e-14);
  expect_valid(f, x);

  const TimeSeriesMatrix back = reconstruct(truncate(f, 1));
  EXPECT_LE(testing::squared_distance(back.matrix(), x), 1e-26);
}

TEST(SvdTest, GeneralTwoByTwoAgainstClosedForm) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-10, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = d(rng), b = d(rng), c = d(rng), e = d(rng);
    const auto [s1, s2] = testing::singular_values_2x2(a, b, c, e);
    const SvdFactors f = svd(Matrix{{a, b}, {c, e}});
    EXPECT_NEAR(f.sigma[0], s1, 1e-12 * s1);
    EXPECT_NEAR(f.sigma[1], s2, 1e-10 * s1);
  }
}

TEST(SvdTest, OrthogonalInputHasUnitSingularValues) {
  std::mt19937_64 rng(9);
  const SvdFactors q = svd(testing::random_matrix(12, 12, rng));
  for (const Matrix& orth : {q.u, q.v}) {
    const SvdFactors f = svd(orth);
    for (double s : f.sigma) EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(SvdTest, RandomShapesSatisfyInvariants) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const Matrix x = testing::random_matrix(1 + rng() % 35, 1 + rng() % 35, rng);
    expect_valid(svd(x), x);
  }
  expect_valid(svd(Matrix{{2.5}}), Matrix{{2.5}});
  expect_valid(svd(Matrix{{-2.5}}), Matrix{{-2.5}});
}

TEST(SvdTest, RankDeficientAndZeroMatricesGetCompleteBases) {
  std::mt19937_64 rng(4);
  const Matrix low = testing::low_rank_matrix(30, 18, {5, 2, 1}, rng);
  const SvdFactors f = svd(low);
  expect_valid(f, low);
  EXPECT_EQ(numerical_rank(f.sigma), 3u);

  const Matrix zero(6, 4);
  const SvdFactors z = svd(zero);
  for (double s : z.sigma) EXPECT_EQ(s, 0.0);
  EXPECT_LE(orthonormality_defect(z.u), 1e-12);
  EXPECT_LE(orthonormality_defect(z.v), 1e-12);
  expect_sign_convention(z);

  // Exactly repeated columns make R rank deficient inside the QR.
  Matrix dup(5, 8);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 8; ++j) dup(i, j) = static_cast<double>((i + 1) * (j % 2 + 1));
  expect_valid(svd(dup), dup);
}

TEST(SvdTest, WideAndTallAgree) {
  std::mt19937_64 rng(13);
  const Matrix x = testing::random_matrix(7, 40, rng);
  const SvdFactors wide = svd(x);
  const SvdFactors tall = svd(x.transpose());
  for (std::size_t i = 0; i < wide.k(); ++i) EXPECT_NEAR(wide.sigma[i], tall.sigma[i], 1e-12);
}

TEST(SvdTest, DeterministicBits) {
  std::mt19937_64 rng(17);
  const Matrix x = testing::random_matrix(23, 31, rng);
  const SvdFactors a = svd(x);
  const SvdFactors b = svd(x);
  EXPECT_EQ(a.u, b.u);
  EXPECT_EQ(a.v, b.v);
  EXPECT_EQ(a.sigma, b.sigma);
}

TEST(SvdTest, TruncateKeepsLeadingTriplets) {
  std::mt19937_64 rng(19);
  const Matrix x = testing::random_matrix(9, 6, rng);
  const SvdFactors f = svd(x);
  const SvdFactors same = truncate(f, f.k());
  EXPECT_EQ(same.u, f.u);
  EXPECT_EQ(same.v, f.v);
  EXPECT_EQ(same.sigma, f.sigma);
  const SvdFactors one = truncate(f, 1);
  ASSERT_EQ(one.k(), 1u);
  EXPECT_EQ(one.sigma[0], f.sigma[0]);
  for (std::size_t r = 0; r < 9; ++r) EXPECT_EQ(one.u(r, 0), f.u(r, 0));
  EXPECT_THROW(truncate(f, 0), Error);
  EXPECT_THROW(truncate(f, 7), Error);
}

TEST(SvdTest, ReconstructZeroSigmaIsZero) {
  std::mt19937_64 rng(2);
  SvdFactors f = svd(testing::random_matrix(4, 5, rng));
  std::fill(f.sigma.begin(), f.sigma.end(), 0.0);
  EXPECT_EQ(reconstruct(f).matrix(), Matrix(4, 5));
}

TEST(SvdTest, EckartYoungAndFrobeniusMonotonicity) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = testing::random_matrix(5 + rng() % 25, 5 + rng() % 40, rng);
    const SvdFactors f = svd(x);
    double previous = INFINITY;
    for (std::size_t k = 1; k <= f.k(); ++k) {
      double tail = 0.0;
      for (std::size_t i = k; i < f.k(); ++i) tail += f.sigma[i] * f.sigma[i];
      const double err = testing::squared_distance(x, reconstruct(truncate(f, k)).matrix());
      EXPECT_NEAR(err, tail, 1e-8 * x.frobenius_norm_squared());
      EXPECT_LE(err, previous + 1e-12 * x.frobenius_norm_squared());
      previous = err;
      // MAE <= RMS error (Cauchy-Schwarz).
      EXPECT_LE(mae(x, reconstruct(truncate(f, k)).matrix()),
                std::sqrt(err / static_cast<double>(x.size())) * (1 + 1e-12) + 1e-15);
    }
  }
}

TEST(StorageModelTest, Entries) {
  EXPECT_EQ(storage_entries(80, 4902, 10), 49830u);
  EXPECT_EQ(storage_entries(2, 2, 1), 5u);
  for (std::size_t m = 1; m < 30; m += 7)
    for (std::size_t t = 1; t < 50; t += 9)
      for (std::size_t k = 1; k <= std::min(m, t); ++k) {
        EXPECT_EQ(storage_entries(m, t, k), m * k + k + t * k);
        EXPECT_EQ(storage_entries(m, t, k) < m * t, entry_ratio(m, t, k) > 1.0);
      }
}

TEST(SelectKTest, EntryCountModel) {
  const KSelection sel = select_k_for_ratio(100, 1000, 100, 25.0);
  EXPECT_EQ(sel.k, 3u);
  EXPECT_FALSE(sel.best_effort);
  EXPECT_NEAR(sel.achieved_ratio, 100000.0 / 3303.0, 1e-12);
  EXPECT_LT(entry_ratio(100, 1000, 4), 25.0);
  for (std::size_t k = 2; k < 100; ++k) EXPECT_LT(entry_ratio(100, 1000, k), entry_ratio(100, 1000, k - 1));

  const KSelection miss = select_k_for_ratio(100, 1000, 100, 1000.0);
  EXPECT_EQ(miss.k, 1u);
  EXPECT_TRUE(miss.best_effort);
  // Bounded by the rank even when larger k would still reach the target.
  EXPECT_EQ(select_k_for_ratio(100, 1000, 2, 4.0).k, 2u);
  EXPECT_EQ(select_k_for_ratio(100, 1000, 0, 4.0).k, 1u);
}

TEST(SelectKTest, GenericScanDoesNotAssumeMonotonicity) {
  const std::vector<double> ratios = {10, 4, 8, 3, 6};
  const auto at = [&](std::size_t k) { return ratios[k - 1]; };
  EXPECT_EQ(select_k(5, 5.0, at).k, 5u);
  EXPECT_EQ(select_k(5, 7.0, at).k, 3u);
  const KSelection miss = select_k(5, 11.0, at);
  EXPECT_EQ(miss.k, 1u);
  EXPECT_TRUE(miss.best_effort);
}

TEST(MaeTest, Basics) {
  const Matrix x{{1, 1}, {1, 1}};
  EXPECT_EQ(mae(x, x), 0.0);
  EXPECT_EQ(mae(x, Matrix(2, 2)), 1.0);
  EXPECT_EQ(max_abs_error(x, Matrix{{1, 1}, {1, -2}}), 3.0);
  EXPECT_THROW(mae(x, Matrix(2, 3)), Error);
}

}  // namespace
}  // namespace tcz
