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

#include "tcz/sweep.hpp"

#include <ostream>
#include <string>

#include "tcz/error.hpp"

namespace tcz {

double SweepRow::ratio_gain_percent() const {
  return 100.0 * (static_cast<double>(baseline_archive_bytes) / static_cast<double>(archive_bytes) - 1.0);
}

SweepTable sweep(const TimeSeriesMatrix& x, const std::vector<double>& ratios, const PipelineConfig& cfg,
                 SizeModel k_model) {
  for (double r : ratios) {
    if (!(r > 1.0)) throw Error(ErrorCode::kOutOfRange, "sweep ratios must exceed 1");
  }
  cfg.validate();
  const CompressionSession session(x);
  const std::size_t m = x.rows();
  const std::size_t t = x.cols();

  // Measured-byte ratios are not monotone in k, so the whole table is built
  // once and every target scans it.
  std::vector<double> measured;
  if (k_model == SizeModel::kMeasuredBytes) {
    const std::size_t max_k = std::max<std::size_t>(session.rank(), 1);
    for (std::size_t k = 1; k <= max_k; ++k) measured.push_back(session.ratio_at(k, k_model, cfg));
  }

  SweepTable table;
  table.rank = session.rank();
  for (double target : ratios) {
    const KSelection sel =
        k_model == SizeModel::kEntryCount
            ? select_k_for_ratio(m, t, session.rank(), target)
            : select_k(measured.size(), target, [&](std::size_t k) { return measured[k - 1]; });
    PipelineConfig row_cfg = cfg;
    row_cfg.k_selection = ExplicitK{sel.k};
    const CompressionReport rep = session.compress(row_cfg).report;

    SweepRow row;
    row.target_ratio = target;
    row.k = sel.k;
    row.best_effort = sel.best_effort;
    row.achieved_ratio_entries = rep.entry_ratio;
    row.achieved_ratio_bytes = rep.compression_ratio;
    row.mae = rep.mae;
    row.max_abs_error = rep.max_abs_error;
    row.frobenius_error = rep.frobenius_error;
    row.svd_only_mae = rep.svd_only_mae;
    row.stage_bytes = rep.stage_bytes;
    row.archive_bytes = rep.archive_bytes;
    row.baseline_archive_bytes =
        kArchiveOverheadBytes + storage_entries(m, t, sel.k) * static_cast<std::size_t>(cfg.raw_float_bytes);
    table.rows.push_back(row);
  }
  return table;
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  out << "target_ratio,k,achieved_ratio_entries,achieved_ratio_bytes,mae,max_abs_error,"
         "bytes_stage1,bytes_stage2,bytes_stage3\n";
  const auto saved = out.precision(17);
  for (const SweepRow& r : table.rows) {
    out << r.target_ratio << ',' << r.k << ',' << r.achieved_ratio_entries << ',' << r.achieved_ratio_bytes << ','
        << r.mae << ',' << r.max_abs_error << ',' << r.stage_bytes[0] << ',' << r.stage_bytes[1] << ','
        << r.stage_bytes[2] << '\n';
  }
  out.precision(saved);
}

void write_mae_series_csv(std::ostream& out, const SweepTable& table) {
  out << "k,k_over_rank,mae,svd_only_mae\n";
  const auto saved = out.precision(17);
  for (const SweepRow& r : table.rows) {
    const double frac = table.rank == 0 ? 0.0 : static_cast<double>(r.k) / static_cast<double>(table.rank);
    out << r.k << ',' << frac << ',' << r.mae << ',' << r.svd_only_mae << '\n';
  }
  out.precision(saved);
}

}  // namespace tcz
