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
#include <vector>

#include "tcz/matrix.hpp"

namespace tcz {

inline constexpr double kDefaultRankTolerance = 1e-10;

struct MatrixStats {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t numerical_rank = 0;
  double sparsity = 0.0;  // share of entries exactly equal to 0.0
  std::vector<double> eigen_spectrum;       // sigma_i^2, descending
  std::vector<double> normalized_spectrum;  // eigen_spectrum / eigen_spectrum[0]
};

/// Number of singular values strictly above tolerance * sigma_1.
std::size_t numerical_rank(const std::vector<double>& sigma, double tolerance = kDefaultRankTolerance);

MatrixStats compute_stats(const TimeSeriesMatrix& x, double rank_tolerance = kDefaultRankTolerance);

}  // namespace tcz
