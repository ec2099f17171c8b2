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

// tcz: compress, decompress, analyze and sweep sensor-matrix CSV files.
//
// Exit status: 0 success, 1 usage error, 2 input I/O or parse error,
// 3 archive integrity error, 4 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tcz/archive.hpp"
#include "tcz/csv.hpp"
#include "tcz/error.hpp"
#include "tcz/pipeline.hpp"
#include "tcz/stats.hpp"
#include "tcz/sweep.hpp"

namespace {

using nlohmann::ordered_json;

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInput = 2,
  kExitArchive = 3,
  kExitNumerical = 4,
};

int exit_code_for(tcz::ErrorCode code) {
  switch (code) {
    case tcz::ErrorCode::kParse:
    case tcz::ErrorCode::kRaggedRows:
    case tcz::ErrorCode::kEmptyInput:
    case tcz::ErrorCode::kNonFinite:
    case tcz::ErrorCode::kIo:
      return kExitInput;
    case tcz::ErrorCode::kBadMagic:
    case tcz::ErrorCode::kUnsupportedVersion:
    case tcz::ErrorCode::kLengthOverrun:
    case tcz::ErrorCode::kCrcMismatch:
    case tcz::ErrorCode::kCorrupt:
      return kExitArchive;
    case tcz::ErrorCode::kConvergence:
      return kExitNumerical;
    case tcz::ErrorCode::kShapeMismatch:
    case tcz::ErrorCode::kOutOfRange:
      return kExitUsage;
  }
  return kExitUsage;
}

struct CsvOptions {
  std::string orientation = "devices";
  char delimiter = ',';
  bool header = false;

  tcz::CsvLayout layout() const {
    tcz::CsvLayout l;
    l.delimiter = delimiter;
    l.has_header = header;
    l.orientation = orientation == "timestamps" ? tcz::Orientation::kRowsAreTimestamps
                                                : tcz::Orientation::kRowsAreDevices;
    return l;
  }
};

void add_csv_options(CLI::App* cmd, CsvOptions& opts, bool with_header) {
  cmd->add_option("--orientation", opts.orientation, "CSV rows are devices or timestamps")
      ->check(CLI::IsMember({"devices", "timestamps"}))
      ->capture_default_str();
  cmd->add_option("--delimiter", opts.delimiter, "CSV field delimiter")->capture_default_str();
  if (with_header) cmd->add_flag("--header", opts.header, "skip one header line");
}

struct StageOptions {
  int mantissa_bits = tcz::kDefaultMantissaBits;
  bool no_normalization = false;
  bool no_sparsity = false;
  std::string size_model = "entries";
  int raw_float_bytes = 8;

  tcz::SizeModel model() const {
    return size_model == "bytes" ? tcz::SizeModel::kMeasuredBytes : tcz::SizeModel::kEntryCount;
  }

  tcz::PipelineConfig config() const {
    tcz::PipelineConfig cfg;
    cfg.mantissa_bits = mantissa_bits;
    cfg.normalization = !no_normalization;
    cfg.sparsity = !no_sparsity && !no_normalization;
    cfg.raw_float_bytes = raw_float_bytes;
    return cfg;
  }
};

void add_stage_options(CLI::App* cmd, StageOptions& opts) {
  cmd->add_option("--mantissa-bits", opts.mantissa_bits, "quantizer width in bits")
      ->check(CLI::Range(tcz::kMinMantissaBits, tcz::kMaxMantissaBits))
      ->capture_default_str();
  cmd->add_flag("--no-normalization", opts.no_normalization, "store factors as raw floats (implies --no-sparsity)");
  cmd->add_flag("--no-sparsity", opts.no_sparsity, "always store quantized blocks densely");
  cmd->add_option("--size-model", opts.size_model, "ratio model used to pick k")
      ->check(CLI::IsMember({"entries", "bytes"}))
      ->capture_default_str();
  cmd->add_option("--raw-float-bytes", opts.raw_float_bytes, "bytes per uncompressed value")
      ->check(CLI::IsMember({4, 8}))
      ->capture_default_str();
}

ordered_json report_json(const tcz::CompressionReport& r) {
  ordered_json blocks = ordered_json::object();
  for (std::size_t b = 0; b < 3; ++b) {
    const tcz::BlockReport& blk = r.blocks[b];
    blocks[tcz::to_string(static_cast<tcz::BlockId>(b))] = {
        {"representation", tcz::to_string(blk.representation)},
        {"mantissa_bits", blk.mantissa_bits},
        {"shared_exponent", blk.shared_exponent},
        {"nnz", blk.nnz},
        {"payload_bytes", blk.payload_bytes},
    };
  }
  ordered_json j = {
      {"m", r.m},
      {"t", r.t},
      {"k", r.k},
      {"rank", r.rank},
      {"target_ratio", r.target_ratio ? ordered_json(*r.target_ratio) : ordered_json(nullptr)},
      {"best_effort", r.best_effort},
      {"uncompressed_bytes", r.uncompressed_bytes},
      {"uncompressed_bytes_f32", r.uncompressed_bytes_f32},
      {"uncompressed_bytes_f64", r.uncompressed_bytes_f64},
      {"stage_bytes", {{"svd", r.stage_bytes[0]}, {"normalization", r.stage_bytes[1]}, {"sparsity", r.stage_bytes[2]}}},
      {"archive_bytes", r.archive_bytes},
      {"container_overhead_bytes", r.container_overhead_bytes},
      {"stored_entries", r.stored_entries},
      {"compression_ratio", r.compression_ratio},
      {"entry_ratio", r.entry_ratio},
      {"mae", r.mae},
      {"svd_only_mae", r.svd_only_mae},
      {"max_abs_error", r.max_abs_error},
      {"frobenius_error", r.frobenius_error},
      {"blocks", blocks},
  };
  return j;
}

void print_report(const tcz::CompressionReport& r) {
  std::printf("shape              %zu x %zu (rank %zu)\n", r.m, r.t, r.rank);
  std::printf("k                  %zu%s\n", r.k, r.best_effort ? "  (best effort: target ratio unreachable)" : "");
  std::printf("uncompressed       %zu bytes\n", r.uncompressed_bytes);
  std::printf("after svd          %zu bytes\n", r.stage_bytes[0]);
  std::printf("after normalize    %zu bytes\n", r.stage_bytes[1]);
  std::printf("after sparsity     %zu bytes\n", r.stage_bytes[2]);
  std::printf("archive            %zu bytes\n", r.archive_bytes);
  std::printf("stored entries     %zu\n", r.stored_entries);
  std::printf("ratio (bytes)      %.4f\n", r.compression_ratio);
  std::printf("ratio (entries)    %.4f\n", r.entry_ratio);
  std::printf("mae                %.6g (svd only %.6g)\n", r.mae, r.svd_only_mae);
  std::printf("max abs error      %.6g\n", r.max_abs_error);
  for (std::size_t b = 0; b < 3; ++b) {
    const tcz::BlockReport& blk = r.blocks[b];
    std::printf("block %-6s       %-6s w=%-2d e=%-5d nnz=%zu bytes=%zu\n",
                tcz::to_string(static_cast<tcz::BlockId>(b)), tcz::to_string(blk.representation),
                blk.mantissa_bits, blk.shared_exponent, blk.nnz, blk.payload_bytes);
  }
}

int run_compress(const std::string& input, const std::string& output, std::optional<std::size_t> k,
                 std::optional<double> target, const StageOptions& stages, const CsvOptions& csv, bool json) {
  const tcz::TimeSeriesMatrix x = tcz::load_csv_file(input, csv.layout());
  tcz::PipelineConfig cfg = stages.config();
  if (k) {
    cfg.k_selection = tcz::ExplicitK{*k};
  } else if (target) {
    cfg.k_selection = tcz::TargetRatio{*target, stages.model()};
  }
  const tcz::CompressionResult result = tcz::compress(x, cfg);
  tcz::write_archive_file(output, result.archive);
  if (result.report.best_effort) {
    std::cerr << "warning: target ratio " << *result.report.target_ratio
              << " is unreachable; using k = 1\n";
  }
  if (json) {
    std::cout << report_json(result.report).dump(2) << '\n';
  } else {
    print_report(result.report);
  }
  return kExitOk;
}

int run_decompress(const std::string& input, const std::string& output, const CsvOptions& csv) {
  const tcz::Archive a = tcz::read_archive_file(input);
  const tcz::TimeSeriesMatrix x = tcz::decompress(a);
  tcz::write_csv_file(output, x.matrix(), csv.layout());
  return kExitOk;
}

int run_analyze(const std::string& input, std::string spectrum_path, double tolerance, const CsvOptions& csv,
                bool json) {
  const tcz::TimeSeriesMatrix x = tcz::load_csv_file(input, csv.layout());
  const tcz::MatrixStats s = tcz::compute_stats(x, tolerance);
  if (spectrum_path.empty()) {
    spectrum_path = std::filesystem::path(input).replace_extension(".spectrum.csv").string();
  }
  {
    std::ofstream out(spectrum_path);
    if (!out) throw tcz::Error(tcz::ErrorCode::kIo, "cannot create " + spectrum_path);
    out.precision(17);
    out << "index,k_over_rank,eigenvalue,normalized_eigenvalue\n";
    for (std::size_t i = 0; i < s.eigen_spectrum.size(); ++i) {
      const double frac =
          s.numerical_rank == 0 ? 0.0 : static_cast<double>(i + 1) / static_cast<double>(s.numerical_rank);
      out << i + 1 << ',' << frac << ',' << s.eigen_spectrum[i] << ',' << s.normalized_spectrum[i] << '\n';
    }
  }
  const double kb = static_cast<double>(s.rows * s.cols * 8) / 1000.0;
  if (json) {
    ordered_json j = {
        {"m", s.rows},
        {"t", s.cols},
        {"rank", s.numerical_rank},
        {"sparsity", s.sparsity},
        {"uncompressed_kb", kb},
        {"uncompressed_kb_f32", kb / 2.0},
        {"spectrum_csv", spectrum_path},
    };
    std::cout << j.dump(2) << '\n';
  } else {
    std::printf("size (m x t)       %zu x %zu\n", s.rows, s.cols);
    std::printf("rank               %zu\n", s.numerical_rank);
    std::printf("sparsity           %.6f\n", s.sparsity);
    std::printf("uncompressed       %.3f kB (8-byte values), %.3f kB (4-byte)\n", kb, kb / 2.0);
    std::printf("spectrum           %s\n", spectrum_path.c_str());
  }
  return kExitOk;
}

int run_sweep(const std::string& input, const std::vector<double>& ratios, const std::string& output,
              std::string mae_path, const StageOptions& stages, const CsvOptions& csv, bool json) {
  const tcz::TimeSeriesMatrix x = tcz::load_csv_file(input, csv.layout());
  const tcz::SweepTable table = tcz::sweep(x, ratios, stages.config(), stages.model());
  for (const tcz::SweepRow& r : table.rows) {
    if (r.best_effort) std::cerr << "warning: target ratio " << r.target_ratio << " is unreachable; using k = 1\n";
  }
  if (output.empty()) {
    if (!json) tcz::write_sweep_csv(std::cout, table);
  } else {
    std::ofstream out(output);
    if (!out) throw tcz::Error(tcz::ErrorCode::kIo, "cannot create " + output);
    tcz::write_sweep_csv(out, table);
    if (mae_path.empty()) mae_path = std::filesystem::path(output).replace_extension(".mae.csv").string();
  }
  if (!mae_path.empty()) {
    std::ofstream out(mae_path);
    if (!out) throw tcz::Error(tcz::ErrorCode::kIo, "cannot create " + mae_path);
    tcz::write_mae_series_csv(out, table);
  }
  if (json) {
    ordered_json rows = ordered_json::array();
    for (const tcz::SweepRow& r : table.rows) {
      rows.push_back({{"target_ratio", r.target_ratio},
                      {"k", r.k},
                      {"best_effort", r.best_effort},
                      {"achieved_ratio_entries", r.achieved_ratio_entries},
                      {"achieved_ratio_bytes", r.achieved_ratio_bytes},
                      {"mae", r.mae},
                      {"svd_only_mae", r.svd_only_mae},
                      {"max_abs_error", r.max_abs_error},
                      {"archive_bytes", r.archive_bytes},
                      {"baseline_archive_bytes", r.baseline_archive_bytes},
                      {"ratio_gain_percent", r.ratio_gain_percent()}});
    }
    std::cout << ordered_json{{"rank", table.rank}, {"rows", rows}}.dump(2) << '\n';
  } else if (!output.empty()) {
    std::printf("%8s %6s %12s %12s %14s %10s\n", "target", "k", "ratio(ent)", "ratio(B)", "mae", "gain%");
    for (const tcz::SweepRow& r : table.rows) {
      std::printf("%8.2f %6zu %12.4f %12.4f %14.6g %10.2f%s\n", r.target_ratio, r.k, r.achieved_ratio_entries,
                  r.achieved_ratio_bytes, r.mae, r.ratio_gain_percent(), r.best_effort ? "  best-effort" : "");
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tcz: cascaded SVD / shared-exponent / sparse compression for sensor matrices"};
  app.require_subcommand(1);

  CsvOptions csv;
  StageOptions stages;
  bool json = false;

  std::string input;
  std::string output;
  std::optional<std::size_t> k;
  std::optional<double> target;
  auto* compress = app.add_subcommand("compress", "compress a CSV matrix into a .tcz archive");
  compress->add_option("input", input, "input CSV")->required();
  compress->add_option("output", output, "output archive")->required();
  auto* k_opt = compress->add_option("-k", k, "number of retained components");
  auto* ratio_opt = compress->add_option("--target-ratio", target, "pick the largest k reaching this ratio");
  k_opt->excludes(ratio_opt);
  add_stage_options(compress, stages);
  add_csv_options(compress, csv, true);
  compress->add_flag("--json", json, "machine-readable report");

  auto* decompress = app.add_subcommand("decompress", "restore a CSV matrix from a .tcz archive");
  decompress->add_option("input", input, "input archive")->required();
  decompress->add_option("output", output, "output CSV")->required();
  add_csv_options(decompress, csv, false);

  std::string spectrum;
  double tolerance = tcz::kDefaultRankTolerance;
  auto* analyze = app.add_subcommand("analyze", "shape, rank, sparsity and eigen spectrum of a CSV matrix");
  analyze->add_option("input", input, "input CSV")->required();
  analyze->add_option("--spectrum", spectrum, "normalized eigen spectrum CSV (default <input>.spectrum.csv)");
  analyze->add_option("--rank-tolerance", tolerance, "relative singular value cutoff")->capture_default_str();
  add_csv_options(analyze, csv, true);
  analyze->add_flag("--json", json, "machine-readable report");

  std::vector<double> ratios = tcz::kDefaultSweepRatios;
  std::string mae_series;
  auto* sweep = app.add_subcommand("sweep", "compress at a grid of target ratios");
  sweep->add_option("input", input, "input CSV")->required();
  sweep->add_option("--ratios", ratios, "target ratios")->delimiter(',')->capture_default_str();
  sweep->add_option("-o,--output", output, "sweep table CSV (default: standard output)");
  sweep->add_option("--mae-series", mae_series, "MAE vs k/rank CSV (default <output>.mae.csv)");
  add_stage_options(sweep, stages);
  add_csv_options(sweep, csv, true);
  sweep->add_flag("--json", json, "per-row summary as JSON instead of the table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*compress) return run_compress(input, output, k, target, stages, csv, json);
    if (*decompress) return run_decompress(input, output, csv);
    if (*analyze) return run_analyze(input, spectrum, tolerance, csv, json);
    if (*sweep) return run_sweep(input, ratios, output, mae_series, stages, csv, json);
  } catch (const tcz::Error& e) {
    std::cerr << "tcz: " << tcz::to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "tcz: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitUsage;
}
