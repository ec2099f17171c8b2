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
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "tcz/archive.hpp"
#include "tcz/matrix.hpp"
#include "tcz/svd.hpp"

namespace tcz {

/// Keep every component above the numerical-rank threshold.
struct FullRank {};
struct ExplicitK {
  std::size_t k = 1;
};
struct TargetRatio {
  double ratio = 0.0;
  SizeModel size_model = SizeModel::kEntryCount;
};

struct PipelineConfig {
  std::variant<FullRank, ExplicitK, TargetRatio> k_selection = FullRank{};
  int mantissa_bits = kDefaultMantissaBits;
  bool normalization = true;
  bool sparsity = true;  // requires normalization
  int raw_float_bytes = 8;  // bytes per uncompressed value, and per raw factor value

  /// Throws kOutOfRange for an impossible combination.
  void validate() const;
};

enum class Stage : std::size_t { kSvd = 0, kNormalization = 1, kSparsity = 2 };

struct BlockReport {
  Representation representation = Representation::kDense;
  int mantissa_bits = 0;
  std::int32_t shared_exponent = 0;
  std::size_t nnz = 0;
  std::size_t payload_bytes = 0;
};

struct CompressionReport {
  std::size_t m = 0;
  std::size_t t = 0;
  std::size_t k = 0;
  std::size_t rank = 0;
  std::size_t uncompressed_bytes = 0;  // m * t * raw_float_bytes
  std::size_t uncompressed_bytes_f32 = 0;
  std::size_t uncompressed_bytes_f64 = 0;
  /// Modeled payload after each stage: raw factors, then normalized blocks
  /// (4-byte exponent each), then the cheaper of dense/sparse per block
  /// (12-byte sparse header). A disabled stage repeats the previous figure.
  std::array<std::size_t, 3> stage_bytes{};
  std::size_t archive_bytes = 0;
  std::size_t container_overhead_bytes = 0;  // archive_bytes - stage_bytes[kSparsity]
  std::size_t stored_entries = 0;            // values actually written
  double compression_ratio = 0.0;            // uncompressed_bytes / archive_bytes
  double entry_ratio = 0.0;                  // m*t / (m+1+t)k
  double mae = 0.0;
  double max_abs_error = 0.0;
  double frobenius_error = 0.0;
  double svd_only_mae = 0.0;  // truncation alone, factors at full precision
  double eckart_young_residual = 0.0;  // sqrt(sum_{i>k} sigma_i^2)
  std::array<BlockReport, 3> blocks{};
  bool best_effort = false;  // a target ratio could not be met even at k = 1
  std::optional<double> target_ratio;
};

struct CompressionResult {
  Archive archive;
  CompressionReport report;
};

/// Holds the SVD of one matrix so repeated compressions (ratio scans, sweeps)
/// pay for the factorization once.
class CompressionSession {
 public:
  explicit CompressionSession(const TimeSeriesMatrix& x);

  const TimeSeriesMatrix& matrix() const noexcept { return x_; }
  const SvdFactors& factors() const noexcept { return factors_; }
  std::size_t rank() const noexcept { return rank_; }

  /// Archive for the leading k components under cfg's stage settings.
  Archive encode(std::size_t k, const PipelineConfig& cfg) const;

  /// Compression ratio for k under the given size model.
  double ratio_at(std::size_t k, SizeModel model, const PipelineConfig& cfg) const;

  KSelection select_k(double target_ratio, SizeModel model, const PipelineConfig& cfg) const;

  CompressionResult compress(const PipelineConfig& cfg) const;

 private:
  TimeSeriesMatrix x_;
  SvdFactors factors_;
  std::size_t rank_;
};

/// SVD -> normalization -> sparsity encoding, with per-stage accounting.
CompressionResult compress(const TimeSeriesMatrix& x, const PipelineConfig& cfg);

/// Inverse cascade: expand blocks, dequantize, then sum the rank-one terms.
TimeSeriesMatrix decompress(const Archive& a);
TimeSeriesMatrix decompress(std::span<const std::uint8_t> bytes);

/// Factor values (not necessarily orthonormal after quantization) carried by
/// an archive.
SvdFactors decode_factors(const Archive& a);

}  // namespace tcz
