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

#include "tcz/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "tcz/error.hpp"

namespace tcz {
namespace {

constexpr int kMaxSweeps = 80;

/// Column-major scratch matrix; Householder and Jacobi both work on columns.
struct ColMajor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  ColMajor(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double* col(std::size_t j) { return data.data() + j * rows; }
  const double* col(std::size_t j) const { return data.data() + j * rows; }
};

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

struct ThinQr {
  ColMajor q;  // n x p, orthonormal columns
  ColMajor r;  // p x p, upper triangular
};

ThinQr householder_qr(ColMajor a) {
  const std::size_t n = a.rows;
  const std::size_t p = a.cols;
  std::vector<std::vector<double>> reflectors(p);
  std::vector<double> taus(p, 0.0);

  for (std::size_t j = 0; j < p; ++j) {
    double* x = a.col(j) + j;
    const std::size_t len = n - j;
    const double norm = std::sqrt(dot(x, x, len));
    if (norm == 0.0) continue;
    const double alpha = x[0] > 0.0 ? -norm : norm;
    std::vector<double> v(x, x + len);
    v[0] -= alpha;
    const double vv = dot(v.data(), v.data(), len);
    if (vv == 0.0) continue;
    const double tau = 2.0 / vv;
    for (std::size_t c = j + 1; c < p; ++c) {
      double* y = a.col(c) + j;
      const double s = tau * dot(v.data(), y, len);
      for (std::size_t i = 0; i < len; ++i) y[i] -= s * v[i];
    }
    x[0] = alpha;
    std::fill(x + 1, x + len, 0.0);
    reflectors[j] = std::move(v);
    taus[j] = tau;
  }

  ThinQr out{ColMajor(n, p), ColMajor(p, p)};
  for (std::size_t c = 0; c < p; ++c)
    for (std::size_t i = 0; i <= c; ++i) out.r.col(c)[i] = a.col(c)[i];

  for (std::size_t c = 0; c < p; ++c) out.q.col(c)[c] = 1.0;
  for (std::size_t j = p; j-- > 0;) {
    if (taus[j] == 0.0) continue;
    const std::vector<double>& v = reflectors[j];
    const std::size_t len = n - j;
    for (std::size_t c = j; c < p; ++c) {
      double* y = out.q.col(c) + j;
      const double s = taus[j] * dot(v.data(), y, len);
      for (std::size_t i = 0; i < len; ++i) y[i] -= s * v[i];
    }
  }
  return out;
}

double negligible_norm(const ColMajor& b) {
  const double frobenius = std::sqrt(dot(b.data.data(), b.data.data(), b.data.size()));
  return std::numeric_limits<double>::epsilon() * static_cast<double>(std::max<std::size_t>(b.rows, 1)) *
         frobenius;
}

/// One-sided Jacobi: rotates the columns of b until they are mutually
/// orthogonal, accumulating the rotations into v (which starts as identity).
/// Columns at rounding level (below `negligible`) take no part; their
/// direction is noise and gets replaced by a completed basis vector.
void jacobi_orthogonalize(ColMajor& b, ColMajor& v, double negligible) {
  const std::size_t n = b.rows;
  const std::size_t p = b.cols;
  const double tol = std::numeric_limits<double>::epsilon() * static_cast<double>(std::max<std::size_t>(n, 1));
  const double floor2 = negligible * negligible;
  std::vector<double> norms(p);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    for (std::size_t j = 0; j < p; ++j) norms[j] = dot(b.col(j), b.col(j), n);
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < p; ++i) {
      for (std::size_t j = i + 1; j < p; ++j) {
        const double alpha = norms[i];
        const double beta = norms[j];
        if (alpha <= floor2 || beta <= floor2) continue;
        double* bi = b.col(i);
        double* bj = b.col(j);
        const double gamma = dot(bi, bj, n);
        if (std::fabs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t r = 0; r < n; ++r) {
          const double x = bi[r];
          const double y = bj[r];
          bi[r] = c * x - s * y;
          bj[r] = s * x + c * y;
        }
        double* vi = v.col(i);
        double* vj = v.col(j);
        for (std::size_t r = 0; r < v.rows; ++r) {
          const double x = vi[r];
          const double y = vj[r];
          vi[r] = c * x - s * y;
          vj[r] = s * x + c * y;
        }
        norms[i] = alpha - t * gamma;
        norms[j] = beta + t * gamma;
      }
    }
    if (!rotated) return;
  }
  throw Error(ErrorCode::kConvergence,
              "Jacobi SVD did not converge within " + std::to_string(kMaxSweeps) + " sweeps");
}

/// Fills the columns flagged in `missing` with unit vectors orthogonal to all
/// other columns (Gram-Schmidt over the standard basis, applied twice).
void complete_basis(ColMajor& w, const std::vector<bool>& missing) {
  const std::size_t n = w.rows;
  std::size_t candidate = 0;
  std::vector<double> e(n);
  for (std::size_t c = 0; c < w.cols; ++c) {
    if (!missing[c]) continue;
    while (true) {
      if (candidate >= n) throw Error(ErrorCode::kConvergence, "basis completion exhausted");
      std::fill(e.begin(), e.end(), 0.0);
      e[candidate++] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t o = 0; o < w.cols; ++o) {
          if (o == c || (missing[o] && o > c)) continue;
          const double proj = dot(w.col(o), e.data(), n);
          for (std::size_t r = 0; r < n; ++r) e[r] -= proj * w.col(o)[r];
        }
      }
      const double norm = std::sqrt(dot(e.data(), e.data(), n));
      if (norm > 0.5) {
        for (std::size_t r = 0; r < n; ++r) w.col(c)[r] = e[r] / norm;
        break;
      }
    }
  }
}

}  // namespace

SvdFactors svd(const Matrix& x) {
  const std::size_t m = x.rows();
  const std::size_t t = x.cols();
  if (m == 0 || t == 0) throw Error(ErrorCode::kEmptyInput, "svd of an empty matrix");
  const bool transposed = t > m;
  const std::size_t n = transposed ? t : m;
  const std::size_t p = transposed ? m : t;

  ColMajor a(n, p);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < t; ++j) {
      if (transposed) {
        a.col(i)[j] = x(i, j);
      } else {
        a.col(j)[i] = x(i, j);
      }
    }
  }

  ThinQr qr = householder_qr(std::move(a));
  ColMajor right(p, p);
  for (std::size_t c = 0; c < p; ++c) right.col(c)[c] = 1.0;
  const double negligible = negligible_norm(qr.r);
  jacobi_orthogonalize(qr.r, right, negligible);

  std::vector<double> sigma(p);
  std::vector<bool> missing(p, false);
  for (std::size_t c = 0; c < p; ++c) {
    double* col = qr.r.col(c);
    const double s = std::sqrt(dot(col, col, p));
    if (s <= negligible || s < std::numeric_limits<double>::min()) {
      sigma[c] = 0.0;
      missing[c] = true;
      std::fill(col, col + p, 0.0);
    } else {
      sigma[c] = s;
      for (std::size_t r = 0; r < p; ++r) col[r] /= s;
    }
  }
  complete_basis(qr.r, missing);

  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t lhs, std::size_t rhs) { return sigma[lhs] > sigma[rhs]; });

  // Left vectors of the tall matrix are Q * W.
  SvdFactors f{Matrix(m, p), std::vector<double>(p), Matrix(t, p)};
  Matrix& tall_side = transposed ? f.v : f.u;
  Matrix& short_side = transposed ? f.u : f.v;
  std::vector<double> acc(n);
  for (std::size_t out = 0; out < p; ++out) {
    const std::size_t src = order[out];
    f.sigma[out] = sigma[src];
    const double* w = qr.r.col(src);
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t l = 0; l < p; ++l) {
      const double* q = qr.q.col(l);
      for (std::size_t r = 0; r < n; ++r) acc[r] += q[r] * w[l];
    }
    for (std::size_t r = 0; r < n; ++r) tall_side(r, out) = acc[r];
    const double* vr = right.col(src);
    for (std::size_t r = 0; r < p; ++r) short_side(r, out) = vr[r];
  }

  for (std::size_t c = 0; c < p; ++c) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (std::fabs(f.u(r, c)) > best) {
        best = std::fabs(f.u(r, c));
        arg = r;
      }
    }
    if (f.u(arg, c) < 0.0) {
      for (std::size_t r = 0; r < m; ++r) f.u(r, c) = -f.u(r, c);
      for (std::size_t r = 0; r < t; ++r) f.v(r, c) = -f.v(r, c);
    }
  }
  return f;
}

SvdFactors truncate(const SvdFactors& f, std::size_t k) {
  if (k < 1 || k > f.k()) {
    throw Error(ErrorCode::kOutOfRange, "truncation rank " + std::to_string(k) +
                                            " outside [1, " + std::to_string(f.k()) + "]");
  }
  SvdFactors out{Matrix(f.u.rows(), k), std::vector<double>(f.sigma.begin(), f.sigma.begin() + static_cast<std::ptrdiff_t>(k)),
                 Matrix(f.v.rows(), k)};
  for (std::size_t r = 0; r < f.u.rows(); ++r)
    for (std::size_t c = 0; c < k; ++c) out.u(r, c) = f.u(r, c);
  for (std::size_t r = 0; r < f.v.rows(); ++r)
    for (std::size_t c = 0; c < k; ++c) out.v(r, c) = f.v(r, c);
  return out;
}

TimeSeriesMatrix reconstruct(const SvdFactors& f) {
  const std::size_t m = f.u.rows();
  const std::size_t t = f.v.rows();
  const std::size_t k = f.k();
  Matrix x(m, t);
  std::vector<double> scaled(k);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < k; ++l) scaled[l] = f.u(i, l) * f.sigma[l];
    for (std::size_t j = 0; j < t; ++j) x(i, j) = dot(scaled.data(), f.v.row(j).data(), k);
  }
  return TimeSeriesMatrix(std::move(x));
}

std::size_t storage_entries(std::size_t m, std::size_t t, std::size_t k) {
  return (m + 1 + t) * k;
}

double entry_ratio(std::size_t m, std::size_t t, std::size_t k) {
  return static_cast<double>(m * t) / static_cast<double>(storage_entries(m, t, k));
}

KSelection select_k(std::size_t max_k, double target,
                    const std::function<double(std::size_t)>& ratio_at) {
  max_k = std::max<std::size_t>(max_k, 1);
  KSelection best{1, ratio_at(1), true};
  for (std::size_t k = 1; k <= max_k; ++k) {
    const double ratio = k == 1 ? best.achieved_ratio : ratio_at(k);
    if (ratio >= target) best = KSelection{k, ratio, false};
  }
  return best;
}

KSelection select_k_for_ratio(std::size_t m, std::size_t t, std::size_t rank, double target) {
  const std::size_t max_k = std::max<std::size_t>(rank, 1);
  KSelection best{1, entry_ratio(m, t, 1), true};
  for (std::size_t k = 1; k <= max_k; ++k) {
    const double ratio = entry_ratio(m, t, k);
    if (ratio < target) break;
    best = KSelection{k, ratio, false};
  }
  return best;
}

double mae(const Matrix& x, const Matrix& xk) {
  if (x.rows() != xk.rows() || x.cols() != xk.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "mae of differently shaped matrices");
  }
  if (x.empty()) return 0.0;
  double sum = 0.0;
  const auto a = x.values();
  const auto b = xk.values();
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::fabs(a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

double max_abs_error(const Matrix& x, const Matrix& xk) {
  if (x.rows() != xk.rows() || x.cols() != xk.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "max error of differently shaped matrices");
  }
  double worst = 0.0;
  const auto a = x.values();
  const auto b = xk.values();
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] - b[i]));
  return worst;
}

}  // namespace tcz
