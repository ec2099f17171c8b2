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
#include <functional>
#include <vector>

#include "tcz/matrix.hpp"

namespace tcz {

/// Truncated singular triplets of an m x t matrix: X ~= u * diag(sigma) * v^T.
///
/// Invariants (established by svd() and preserved by truncate()):
///  - sigma is non-increasing and non-negative;
///  - the columns of u (m x k) and of v (t x k) are orthonormal;
///  - in every column of u the entry of largest magnitude is non-negative,
///    with the matching column of v flipped alongside.
struct SvdFactors {
  Matrix u;
  std::vector<double> sigma;
  Matrix v;

  std::size_t k() const noexcept { return sigma.size(); }
  std::size_t source_rows() const noexcept { return u.rows(); }
  std::size_t source_cols() const noexcept { return v.rows(); }
};

/// Full thin SVD with k = min(m, t).
///
/// The tall orientation (X, or X^T when t > m) is reduced to a square
/// triangular factor by Householder QR, and that factor is diagonalized with
/// one-sided Jacobi rotations. The work is O(min(m,t)^2 * max(m,t)) and
/// strictly sequential, so identical input bits give identical output bits.
/// Singular values at rounding level (below min(m,t) * eps * ||X||_F) are
/// reported as exactly 0 and their directions completed to an orthonormal
/// basis. Throws kConvergence when the rotation sweeps stall.
SvdFactors svd(const Matrix& x);
inline SvdFactors svd(const TimeSeriesMatrix& x) { return svd(x.matrix()); }

/// Leading k triplets; throws kOutOfRange unless 1 <= k <= f.k().
SvdFactors truncate(const SvdFactors& f, std::size_t k);

/// Sum over i of sigma_i * u_i * v_i^T.
TimeSeriesMatrix reconstruct(const SvdFactors& f);

/// Entry count of the rank-k factors: m*k + k + t*k.
std::size_t storage_entries(std::size_t m, std::size_t t, std::size_t k);

/// m*t / storage_entries(m, t, k).
double entry_ratio(std::size_t m, std::size_t t, std::size_t k);

enum class SizeModel {
  kEntryCount,     // raw entries m*t against (m+1+t)k
  kMeasuredBytes,  // raw bytes against the full archive size
};

struct KSelection {
  std::size_t k = 1;
  double achieved_ratio = 0.0;
  bool best_effort = false;  // even k = 1 misses the target
};

/// Largest k in [1, max_k] with ratio_at(k) >= target, scanning every k so
/// no monotonicity is assumed. max_k == 0 is treated as 1.
KSelection select_k(std::size_t max_k, double target,
                    const std::function<double(std::size_t)>& ratio_at);

/// Entry-count model; the ratio is strictly decreasing in k so the scan stops
/// at the first k that misses the target.
KSelection select_k_for_ratio(std::size_t m, std::size_t t, std::size_t rank, double target);

/// Mean absolute elementwise difference; throws kShapeMismatch.
double mae(const Matrix& x, const Matrix& xk);
inline double mae(const TimeSeriesMatrix& x, const TimeSeriesMatrix& xk) {
  return mae(x.matrix(), xk.matrix());
}

double max_abs_error(const Matrix& x, const Matrix& xk);

}  // namespace tcz
