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

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "tcz/pipeline.hpp"

namespace tcz {

/// Target compression ratios of the reference benchmark grid.
inline const std::vector<double> kDefaultSweepRatios = {78, 39, 25, 19, 15, 9, 5, 4};

struct SweepRow {
  double target_ratio = 0.0;
  std::size_t k = 0;
  bool best_effort = false;
  double achieved_ratio_entries = 0.0;
  double achieved_ratio_bytes = 0.0;
  double mae = 0.0;
  double max_abs_error = 0.0;
  double frobenius_error = 0.0;
  double svd_only_mae = 0.0;
  std::array<std::size_t, 3> stage_bytes{};
  std::size_t archive_bytes = 0;
  /// Archive size of the same k with raw factors and no quantization.
  std::size_t baseline_archive_bytes = 0;

  /// How much higher this row's ratio is than the raw-factor baseline, in %.
  double ratio_gain_percent() const;
};

struct SweepTable {
  std::size_t rank = 0;
  std::vector<SweepRow> rows;  // in the order of the requested ratios
};

/// One pipeline run per target ratio, with k chosen under `k_model`. The
/// SVD is computed once. cfg.k_selection is ignored. Throws kOutOfRange when
/// a ratio is not > 1.
SweepTable sweep(const TimeSeriesMatrix& x, const std::vector<double>& ratios, const PipelineConfig& cfg,
                 SizeModel k_model = SizeModel::kEntryCount);

/// target_ratio,k,achieved_ratio_entries,achieved_ratio_bytes,mae,max_abs_error,
/// bytes_stage1,bytes_stage2,bytes_stage3
void write_sweep_csv(std::ostream& out, const SweepTable& table);

/// k,k_over_rank,mae,svd_only_mae, one line per sweep row.
void write_mae_series_csv(std::ostream& out, const SweepTable& table);

}  // namespace tcz
