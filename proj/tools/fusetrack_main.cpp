// Command-line front end; talks to the library exclusively through the C API.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fusetrack.h"

namespace {

int die(const char* cmd, ft_status st) {
  std::fprintf(stderr, "fusetrack %s: %s: %s\n", cmd, ft_status_name(st), ft_last_error());
  return 2;
}

std::string join_overrides(const std::vector<std::string>& sets, std::uint64_t* seed,
                           const std::string* mode) {
  std::string out;
  for (const auto& s : sets) {
    out += s;
    out += '\n';
  }
  if (seed) out += "seed=" + std::to_string(*seed) + '\n';
  if (mode && !mode->empty()) out += "mode=" + *mode + '\n';
  return out;
}

void print_file(const std::string& path) {
  std::ifstream in(path);
  std::cout << in.rdbuf();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"event/frame feature-track fusion pipeline"};
  app.require_subcommand(1);

  std::string config;
  std::vector<std::string> sets;
  app.add_option("--config", config, "key=value config file")->check(CLI::ExistingFile);
  app.add_option("--set", sets, "extra key=value override (repeatable)");

  auto* gen = app.add_subcommand("generate", "synthesize a scenario");
  std::uint64_t gen_seed = 0;
  bool gen_has_seed = false;
  std::string gen_out = "out";
  gen->add_option("--seed", gen_seed, "scenario seed")->each([&](const std::string&) {
    gen_has_seed = true;
  });
  gen->add_option("--out", gen_out, "output directory");

  auto* track = app.add_subcommand("track", "run a fusion mode over measurements");
  std::string track_meas, track_gt, track_out = "predictions.jsonl", track_mode;
  track->add_option("--measurements", track_meas, "measurements.jsonl")
      ->required()
      ->check(CLI::ExistingFile);
  track->add_option("--gt", track_gt, "gt.jsonl (track set and initial positions)")
      ->check(CLI::ExistingFile);
  track->add_option("--out", track_out, "predictions output path");
  track->add_option("--mode", track_mode,
                    "event_only | frame_only | naive_combo | kalman_fused");

  auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
  std::string eval_pred, eval_gt, eval_report = "report.txt", eval_csv;
  eval->add_option("--predictions", eval_pred, "predictions.jsonl")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--gt", eval_gt, "gt.jsonl")->check(CLI::ExistingFile);
  eval->add_option("--report", eval_report, "report output path");
  eval->add_option("--csv", eval_csv, "per-track csv output path");

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
  std::uint64_t gc_seed = 2024, gc_cases = 1000;
  gradcheck->add_option("--seed", gc_seed, "case generator seed");
  gradcheck->add_option("--cases", gc_cases, "number of random cases");

  auto* bench = app.add_subcommand("bench", "time one predict+update cycle");
  std::uint64_t bench_iters = 1000000;
  bench->add_option("--iterations", bench_iters, "filter steps to time");

  CLI11_PARSE(app, argc, argv);

  const char* cfg = config.empty() ? nullptr : config.c_str();

  if (gen->parsed()) {
    const std::string overrides = join_overrides(sets, gen_has_seed ? &gen_seed : nullptr, nullptr);
    ft_generate_result res;
    const ft_status st = ft_generate(cfg, overrides.c_str(), gen_out.c_str(), &res);
    if (st != FT_OK) return die("generate", st);
    std::printf("generated %" PRIu64 " tracks, %" PRIu64 " measurements -> %s\n", res.n_tracks,
                res.n_measurements, gen_out.c_str());
    return 0;
  }

  if (track->parsed()) {
    std::string overrides = join_overrides(sets, nullptr, &track_mode);
    if (!track_gt.empty()) overrides += "paths.gt=" + track_gt + '\n';
    ft_track_result res;
    const ft_status st = ft_track(cfg, overrides.c_str(), track_meas.c_str(), track_out.c_str(),
                                  &res);
    if (st != FT_OK) return die("track", st);
    std::printf("wrote %" PRIu64 " outputs (%" PRIu64 " rejected) -> %s\n", res.n_outputs,
                res.n_rejected, track_out.c_str());
    return 0;
  }

  if (eval->parsed()) {
    const std::string overrides = join_overrides(sets, nullptr, nullptr);
    ft_eval_result res;
    const ft_status st =
        ft_eval(cfg, overrides.c_str(), eval_pred.c_str(), eval_gt.empty() ? nullptr : eval_gt.c_str(),
                eval_report.c_str(), eval_csv.empty() ? nullptr : eval_csv.c_str(), &res);
    if (st != FT_OK) return die("eval", st);
    print_file(eval_report);
    return 0;
  }

  if (gradcheck->parsed()) {
    ft_gradcheck_result res;
    const ft_status st = ft_gradcheck(gc_seed, gc_cases, &res);
    if (st != FT_OK) return die("gradcheck", st);
    std::printf("cases = %" PRIu64 " (kinks skipped: %" PRIu64 ")\n", res.cases,
                res.kinks_skipped);
    std::printf("max_rel_err_jacobian = %.3e\n", res.max_rel_err_jacobian);
    std::printf("max_rel_err_loss = %.3e\n", res.max_rel_err_loss);
    std::printf("%s\n", res.pass ? "PASS" : "FAIL");
    return res.pass ? 0 : 1;
  }

  if (bench->parsed()) {
    ft_bench_result res;
    const ft_status st = ft_bench(bench_iters, &res);
    if (st != FT_OK) return die("bench", st);
    std::printf("iterations = %" PRIu64 "\n", res.iterations);
    std::printf("mean predict+update = %.1f ns\n", res.mean_step_ns);
    std::printf("checksum = %.6f\n", res.checksum);
    return 0;
  }

  return 0;
}
