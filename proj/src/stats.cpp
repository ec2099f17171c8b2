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

#include "tcz/stats.hpp"

#include "tcz/error.hpp"
#include "tcz/svd.hpp"

namespace tcz {

std::size_t numerical_rank(const std::vector<double>& sigma, double tolerance) {
  if (sigma.empty() || sigma.front() == 0.0) return 0;
  const double cutoff = tolerance * sigma.front();
  std::size_t rank = 0;
  for (double s : sigma) rank += s > cutoff ? 1 : 0;
  return rank;
}

MatrixStats compute_stats(const TimeSeriesMatrix& x, double rank_tolerance) {
  if (!(rank_tolerance >= 0.0)) throw Error(ErrorCode::kOutOfRange, "rank tolerance must be >= 0");
  MatrixStats stats;
  stats.rows = x.rows();
  stats.cols = x.cols();

  std::size_t zeros = 0;
  for (double v : x.matrix().values()) zeros += v == 0.0 ? 1 : 0;
  stats.sparsity = static_cast<double>(zeros) / static_cast<double>(x.matrix().size());

  const SvdFactors f = svd(x);
  stats.numerical_rank = numerical_rank(f.sigma, rank_tolerance);
  stats.eigen_spectrum.reserve(f.k());
  for (double s : f.sigma) stats.eigen_spectrum.push_back(s * s);
  const double top = stats.eigen_spectrum.front();
  stats.normalized_spectrum.reserve(f.k());
  for (double e : stats.eigen_spectrum) stats.normalized_spectrum.push_back(top > 0.0 ? e / top : 0.0);
  return stats;
}

}  // namespace tcz
