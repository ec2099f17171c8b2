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

#include "tcz/pipeline.hpp"

#include <cmath>
#include <string>

#include "tcz/error.hpp"
#include "tcz/normalize.hpp"
#include "tcz/stats.hpp"

namespace tcz {
namespace {

// sigma spans the whole spectrum; when its dynamic range outgrows the
// configured width it is kept at 32 bits (only k values).
int sigma_width(const std::vector<double>& sigma, int mantissa_bits) {
  if (sigma.size() <= 1) return mantissa_bits;
  const double first = sigma.front();
  const double last = sigma.back();
  if (last == 0.0 || first / last > std::ldexp(1.0, mantissa_bits - 4)) return kMaxMantissaBits;
  return mantissa_bits;
}

ArchiveBlock quantized_block(std::span<const double> values, std::size_t rows, std::size_t cols,
                             int width, bool sparsity) {
  NormalizedBlock nb = normalize(values, width);
  ArchiveBlock blk;
  blk.representation = sparsity ? choose_representation(nb, rows, cols) : Representation::kDense;
  blk.mantissa_bits = nb.mantissa_bits;
  blk.shared_exponent = nb.shared_exponent;
  blk.rows = rows;
  blk.cols = cols;
  blk.mantissas = std::move(nb.mantissas);
  return blk;
}

ArchiveBlock raw_block(std::span<const double> values, std::size_t rows, std::size_t cols, int float_bytes) {
  ArchiveBlock blk;
  blk.representation = Representation::kRawFloat;
  blk.mantissa_bits = float_bytes * 8;
  blk.rows = rows;
  blk.cols = cols;
  blk.raw.assign(values.begin(), values.end());
  if (float_bytes == 4) {
    for (double& v : blk.raw) v = static_cast<double>(static_cast<float>(v));
  }
  return blk;
}

std::vector<double> block_values(const ArchiveBlock& blk) {
  if (blk.representation == Representation::kRawFloat) return blk.raw;
  return denormalize(NormalizedBlock{blk.shared_exponent, blk.mantissa_bits, blk.mantissas});
}

std::size_t modeled_block_bytes(const ArchiveBlock& blk, Stage stage) {
  const std::size_t count = blk.rows * blk.cols;
  if (blk.representation == Representation::kRawFloat || stage == Stage::kSvd) return 0;
  const std::size_t dense = count * mantissa_bytes(blk.mantissa_bits) + kExponentBytes;
  if (stage == Stage::kNormalization || blk.representation == Representation::kDense) return dense;
  return sparse_size_bytes(blk.nnz(), blk.rows, blk.cols, blk.mantissa_bits);
}

}  // namespace

void PipelineConfig::validate() const {
  if (mantissa_bits < kMinMantissaBits || mantissa_bits > kMaxMantissaBits) {
    throw Error(ErrorCode::kOutOfRange, "mantissa width " + std::to_string(mantissa_bits) + " outside [4, 32]");
  }
  if (sparsity && !normalization) {
    throw Error(ErrorCode::kOutOfRange, "sparsity encoding requires the normalization stage");
  }
  if (raw_float_bytes != 4 && raw_float_bytes != 8) {
    throw Error(ErrorCode::kOutOfRange, "raw float width must be 4 or 8 bytes");
  }
  if (const auto* target = std::get_if<TargetRatio>(&k_selection); target && !(target->ratio > 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "target compression ratio must exceed 1");
  }
  if (const auto* fixed = std::get_if<ExplicitK>(&k_selection); fixed && fixed->k == 0) {
    throw Error(ErrorCode::kOutOfRange, "k must be at least 1");
  }
}

CompressionSession::CompressionSession(const TimeSeriesMatrix& x)
    : x_(x), factors_(svd(x)), rank_(numerical_rank(factors_.sigma)) {}

Archive CompressionSession::encode(std::size_t k, const PipelineConfig& cfg) const {
  cfg.validate();
  SvdFactors f = truncate(factors_, k);
  // A zero singular value contributes nothing; dropping its directions
  // leaves all-zero (maximally sparse) columns.
  for (std::size_t c = 0; c < k; ++c) {
    if (f.sigma[c] != 0.0) continue;
    for (std::size_t r = 0; r < f.u.rows(); ++r) f.u(r, c) = 0.0;
    for (std::size_t r = 0; r < f.v.rows(); ++r) f.v(r, c) = 0.0;
  }

  Archive a;
  a.m = static_cast<std::uint32_t>(x_.rows());
  a.t = static_cast<std::uint32_t>(x_.cols());
  a.k = static_cast<std::uint32_t>(k);
  a.flags = static_cast<std::uint16_t>((cfg.normalization ? kFlagNormalization : 0) |
                                       (cfg.sparsity ? kFlagSparsity : 0));
  a.mantissa_bits = cfg.normalization ? static_cast<std::uint8_t>(cfg.mantissa_bits) : 0;

  const std::span<const double> sigma(f.sigma);
  if (cfg.normalization) {
    a.block(BlockId::kU) = quantized_block(f.u.values(), f.u.rows(), k, cfg.mantissa_bits, cfg.sparsity);
    a.block(BlockId::kSigma) = quantized_block(sigma, 1, k, sigma_width(f.sigma, cfg.mantissa_bits), cfg.sparsity);
    a.block(BlockId::kV) = quantized_block(f.v.values(), f.v.rows(), k, cfg.mantissa_bits, cfg.sparsity);
  } else {
    a.block(BlockId::kU) = raw_block(f.u.values(), f.u.rows(), k, cfg.raw_float_bytes);
    a.block(BlockId::kSigma) = raw_block(sigma, 1, k, cfg.raw_float_bytes);
    a.block(BlockId::kV) = raw_block(f.v.values(), f.v.rows(), k, cfg.raw_float_bytes);
  }
  return a;
}

double CompressionSession::ratio_at(std::size_t k, SizeModel model, const PipelineConfig& cfg) const {
  if (model == SizeModel::kEntryCount) return entry_ratio(x_.rows(), x_.cols(), k);
  const auto raw = static_cast<double>(x_.rows() * x_.cols() * static_cast<std::size_t>(cfg.raw_float_bytes));
  return raw / static_cast<double>(archive_size_bytes(encode(k, cfg)));
}

KSelection CompressionSession::select_k(double target_ratio, SizeModel model, const PipelineConfig& cfg) const {
  if (model == SizeModel::kEntryCount) return select_k_for_ratio(x_.rows(), x_.cols(), rank_, target_ratio);
  return tcz::select_k(rank_, target_ratio, [&](std::size_t k) { return ratio_at(k, model, cfg); });
}

CompressionResult CompressionSession::compress(const PipelineConfig& cfg) const {
  cfg.validate();
  const std::size_t m = x_.rows();
  const std::size_t t = x_.cols();

  CompressionReport report;
  report.m = m;
  report.t = t;
  report.rank = rank_;
  std::size_t k = std::max<std::size_t>(rank_, 1);
  if (const auto* fixed = std::get_if<ExplicitK>(&cfg.k_selection)) {
    if (fixed->k > factors_.k()) {
      throw Error(ErrorCode::kOutOfRange, "k = " + std::to_string(fixed->k) + " exceeds min(m, t) = " +
                                              std::to_string(factors_.k()));
    }
    k = fixed->k;
  } else if (const auto* target = std::get_if<TargetRatio>(&cfg.k_selection)) {
    const KSelection sel = select_k(target->ratio, target->size_model, cfg);
    k = sel.k;
    report.best_effort = sel.best_effort;
    report.target_ratio = target->ratio;
  }
  report.k = k;

  CompressionResult result{encode(k, cfg), {}};
  const Archive& a = result.archive;

  report.uncompressed_bytes_f32 = m * t * 4;
  report.uncompressed_bytes_f64 = m * t * 8;
  report.uncompressed_bytes = m * t * static_cast<std::size_t>(cfg.raw_float_bytes);
  report.stage_bytes[0] = storage_entries(m, t, k) * static_cast<std::size_t>(cfg.raw_float_bytes);
  report.stage_bytes[1] = report.stage_bytes[0];
  report.stage_bytes[2] = report.stage_bytes[0];
  if (cfg.normalization) {
    report.stage_bytes[1] = 0;
    report.stage_bytes[2] = 0;
    for (const ArchiveBlock& blk : a.blocks) {
      report.stage_bytes[1] += modeled_block_bytes(blk, Stage::kNormalization);
      report.stage_bytes[2] += modeled_block_bytes(blk, Stage::kSparsity);
    }
  }
  report.archive_bytes = archive_size_bytes(a);
  report.container_overhead_bytes = report.archive_bytes - report.stage_bytes[2];
  for (std::size_t b = 0; b < 3; ++b) {
    const ArchiveBlock& blk = a.blocks[b];
    report.blocks[b] = BlockReport{blk.representation, blk.mantissa_bits, blk.shared_exponent, blk.nnz(),
                                   blk.payload_bytes()};
    report.stored_entries += blk.representation == Representation::kSparse ? blk.nnz() : blk.rows * blk.cols;
  }
  report.compression_ratio =
      static_cast<double>(report.uncompressed_bytes) / static_cast<double>(report.archive_bytes);
  report.entry_ratio = entry_ratio(m, t, k);

  const TimeSeriesMatrix restored = decompress(a);
  report.mae = mae(x_, restored);
  report.max_abs_error = max_abs_error(x_.matrix(), restored.matrix());
  double sq = 0.0;
  const auto lhs = x_.matrix().values();
  const auto rhs = restored.matrix().values();
  for (std::size_t i = 0; i < lhs.size(); ++i) sq += (lhs[i] - rhs[i]) * (lhs[i] - rhs[i]);
  report.frobenius_error = std::sqrt(sq);
  report.svd_only_mae = mae(x_, reconstruct(truncate(factors_, k)));
  double tail = 0.0;
  for (std::size_t i = k; i < factors_.k(); ++i) tail += factors_.sigma[i] * factors_.sigma[i];
  report.eckart_young_residual = std::sqrt(tail);

  result.report = report;
  return result;
}

CompressionResult compress(const TimeSeriesMatrix& x, const PipelineConfig& cfg) {
  cfg.validate();
  return CompressionSession(x).compress(cfg);
}

SvdFactors decode_factors(const Archive& a) {
  SvdFactors f{Matrix(a.m, a.k, block_values(a.block(BlockId::kU))), block_values(a.block(BlockId::kSigma)),
               Matrix(a.t, a.k, block_values(a.block(BlockId::kV)))};
  return f;
}

TimeSeriesMatrix decompress(const Archive& a) { return reconstruct(decode_factors(a)); }

TimeSeriesMatrix decompress(std::span<const std::uint8_t> bytes) { return decompress(read_archive(bytes)); }

}  // namespace tcz
