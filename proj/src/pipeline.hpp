#pragma once

#include <cstdint>
#include <string>

#include "fusetrack/config.hpp"
#include "fusetrack/metrics.hpp"

namespace fusetrack {

// Command-level entry points shared by the C API and the tests. Every command
// takes an optional config file plus newline-separated key=value overrides;
// overrides win. File outputs are written atomically.

struct GenerateResult {
  std::string gt_path;
  std::string measurements_path;
  std::string echo_path;
  std::uint64_t n_tracks = 0;
  std::uint64_t n_measurements = 0;
};

// Writes gt.jsonl, measurements.jsonl and spec.echo into out_dir. spec.echo
// is the canonical form of the effective spec; feeding it back as the config
// regenerates the other two files byte-identically.
GenerateResult cmd_generate(const std::string& config_path, const std::string& overrides,
                            const std::string& out_dir);

struct TrackCmdResult {
  std::uint64_t n_outputs = 0;
  std::uint64_t n_rejected = 0;
};

// Runs the configured fusion mode over a measurement file. Ground truth
// (config key paths.gt) provides the track set and each track's initial
// position; only its first samples are read, never its later positions.
TrackCmdResult cmd_track(const std::string& config_path, const std::string& overrides,
                         const std::string& measurements_path,
                         const std::string& predictions_path);

struct EvalCmdResult {
  EvalReport report;
  std::string report_text;
};

// gt_path overrides the config's paths.gt when nonempty; csv_path may be
// empty to skip the per-track table.
EvalCmdResult cmd_eval(const std::string& config_path, const std::string& overrides,
                       const std::string& predictions_path, const std::string& gt_path,
                       const std::string& report_path, const std::string& csv_path);

std::string eval_report_text(const EvalReport& report);
std::string eval_report_csv(const EvalReport& report);

struct GradcheckResult {
  std::uint64_t cases = 0;
  std::uint64_t kinks_skipped = 0;
  double max_rel_err_jacobian = 0.0;
  double max_rel_err_loss = 0.0;
  bool pass = false;
};

// Pinned acceptance thresholds for the finite-difference comparison.
inline constexpr double kGradcheckJacobianTol = 1e-5;
inline constexpr double kGradcheckLossTol = 1e-4;

GradcheckResult cmd_gradcheck(std::uint64_t seed, std::uint64_t cases);

struct BenchResult {
  std::uint64_t iterations = 0;
  double mean_step_ns = 0.0;
  double checksum = 0.0;  // keeps the loop honest under optimization
};

BenchResult cmd_bench(std::uint64_t iterations);

}  // namespace fusetrack
