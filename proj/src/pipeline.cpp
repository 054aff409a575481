#include "pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>

#include "fusetrack/io.hpp"
#include "fusetrack/losses.hpp"
#include "fusetrack/rng.hpp"

namespace fusetrack {

namespace {

Config load_config(const std::string& config_path, const std::string& overrides) {
  Config cfg = config_path.empty() ? Config() : Config::parse_file(config_path);
  if (!overrides.empty()) cfg.merge_overrides(overrides);
  return cfg;
}

}  // namespace

GenerateResult cmd_generate(const std::string& config_path, const std::string& overrides,
                            const std::string& out_dir) {
  Config cfg = load_config(config_path, overrides);
  cfg.check_known(scenario_config_keys());
  const ScenarioSpec spec = scenario_from_config(cfg);
  const ScenarioData data = generate_scenario(spec);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(Errc::io, "cannot create output directory '" + out_dir + "': " + ec.message());

  GenerateResult res;
  res.gt_path = (std::filesystem::path(out_dir) / "gt.jsonl").string();
  res.measurements_path = (std::filesystem::path(out_dir) / "measurements.jsonl").string();
  res.echo_path = (std::filesystem::path(out_dir) / "spec.echo").string();
  write_text_atomic(res.gt_path, gt_to_jsonl(data.gt.tracks));
  write_text_atomic(res.measurements_path, measurements_to_jsonl(data.measurements));
  write_text_atomic(res.echo_path, scenario_to_config_text(spec));
  res.n_tracks = data.gt.tracks.size();
  res.n_measurements = data.measurements.size();
  return res;
}

TrackCmdResult cmd_track(const std::string& config_path, const std::string& overrides,
                         const std::string& measurements_path,
                         const std::string& predictions_path) {
  Config cfg = load_config(config_path, overrides);
  cfg.check_known(run_config_keys());
  const RunParams rp = run_from_config(cfg);
  if (rp.gt_path.empty()) fail(Errc::parse, "missing required config key 'paths.gt'");

  const auto measurements =
      measurements_from_jsonl(read_text(measurements_path), measurements_path);
  const auto gts = gt_from_jsonl(read_text(rp.gt_path), rp.gt_path);

  std::map<std::int64_t, TrackConfig> configs;
  for (const auto& gt : gts) {
    if (gt.samples.empty()) continue;
    TrackConfig tc;
    tc.p_ref = gt.samples.front().pos;
    tc.t0 = gt.samples.front().t;
    tc.init_pos_var = rp.init_pos_var;
    tc.init_vel_var = rp.init_vel_var;
    tc.ooo_policy = rp.ooo_policy;
    tc.ooo_window = rp.ooo_window;
    configs.emplace(gt.track_id, tc);
  }

  const ScenarioRun run = run_scenario(measurements, configs, rp.mode, rp.pm, rp.maps);
  write_text_atomic(predictions_path, predictions_to_jsonl(run.outputs));

  TrackCmdResult res;
  for (const auto& [id, outputs] : run.outputs) res.n_outputs += outputs.size();
  res.n_rejected = run.rejected;
  return res;
}

namespace {

std::string opt_value(const std::optional<double>& v) {
  return v ? format_g17(*v) : std::string("nan");
}

std::string join_ids(const std::vector<std::int64_t>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ids[i]);
  }
  return out;
}

}  // namespace

std::string eval_report_text(const EvalReport& report) {
  std::string out;
  auto put = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += "\n";
  };
  put("n_tracks_evaluated", std::to_string(report.per_track.size()));
  put("fa_mean", format_g17(report.fa_mean));
  put("expected_fa", format_g17(report.expected_fa));
  if (report.delta_vis) put("delta_vis", format_g17(*report.delta_vis));
  if (report.delta_occ) put("delta_occ", format_g17(*report.delta_occ));
  if (report.delta_all) put("delta_all", format_g17(*report.delta_all));
  put("n_vis", std::to_string(report.n_vis));
  put("n_occ", std::to_string(report.n_occ));
  put("n_excluded", std::to_string(report.n_excluded));
  if (!report.missing_pred_tracks.empty()) {
    put("missing_pred_tracks", join_ids(report.missing_pred_tracks));
  }
  if (!report.missing_gt_tracks.empty()) {
    put("missing_gt_tracks", join_ids(report.missing_gt_tracks));
  }
  return out;
}

std::string eval_report_csv(const EvalReport& report) {
  std::string out = "track_id,fa,delta_vis,delta_occ,delta_all,n_vis,n_occ,n_excluded\n";
  for (const auto& te : report.per_track) {
    out += std::to_string(te.track_id) + ',' + format_g17(te.fa) + ',' +
           opt_value(te.delta.vis) + ',' + opt_value(te.delta.occ) + ',' +
           opt_value(te.delta.all) + ',' + std::to_string(te.delta.n_vis) + ',' +
           std::to_string(te.delta.n_occ) + ',' + std::to_string(te.delta.n_excluded) + '\n';
  }
  return out;
}

EvalCmdResult cmd_eval(const std::string& config_path, const std::string& overrides,
                       const std::string& predictions_path, const std::string& gt_path,
                       const std::string& report_path, const std::string& csv_path) {
  Config cfg = load_config(config_path, overrides);
  // Accept a shared config file: tracking keys are legal here and ignored.
  std::set<std::string> known = eval_config_keys();
  known.insert(run_config_keys().begin(), run_config_keys().end());
  cfg.check_known(known);
  const EvalConfig ec = eval_from_config(cfg);

  std::string gt = gt_path.empty() ? cfg.get_string("paths.gt", "") : gt_path;
  if (gt.empty()) fail(Errc::parse, "no ground truth: pass a gt path or set paths.gt");

  const auto preds = predictions_from_jsonl(read_text(predictions_path), predictions_path);
  const auto gts = gt_from_jsonl(read_text(gt), gt);

  EvalCmdResult res;
  res.report = evaluate(preds, gts, ec);
  res.report_text = eval_report_text(res.report);
  if (!report_path.empty()) write_text_atomic(report_path, res.report_text);
  if (!csv_path.empty()) write_text_atomic(csv_path, eval_report_csv(res.report));
  return res;
}

namespace {

// Symmetric 4x4 with eigenvalues well inside the conditioning guard.
Mat4 random_spd(Rng& rng) {
  Mat4 A;
  for (int r = 0; r < 4; ++r) {
    const Vec2 g1 = rng.gauss2(1.0);
    const Vec2 g2 = rng.gauss2(1.0);
    A.row(r) << g1.x(), g1.y(), g2.x(), g2.y();
  }
  Mat4 P = 2.0 * A * A.transpose();
  P += 0.05 * Mat4::Identity();
  return P;
}

}  // namespace

GradcheckResult cmd_gradcheck(std::uint64_t seed, std::uint64_t cases) {
  if (cases == 0) fail(Errc::invalid_argument, "gradcheck needs at least one case");
  Rng rng(seed_for(seed, 5));
  const DisplacementLossSpec dspec;
  const UncertaintyLossSpec uspec;

  GradcheckResult res;
  res.cases = cases;
  for (std::uint64_t i = 0; i < cases; ++i) {
    LossStep step;
    step.state_pred.P = random_spd(rng);
    const Vec2 pos(rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0));
    const Vec2 vel(rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0));
    step.state_pred.x << pos, vel;
    step.prev_pos = pos + rng.gauss2(2.0);
    step.z = pos + rng.gauss2(3.0);
    step.map.sigma2_min = rng.uniform(0.2, 1.5);
    step.map.sigma2_max = rng.uniform(8.0, 80.0);
    const double p_vis = rng.uniform(0.05, 0.95);
    step.report.p_vis = p_vis;
    step.report.p_occ = 1.0 - p_vis;
    if (rng.bernoulli(0.8)) {
      step.dp_gt = Vec2(rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0));
    } else {
      // Past the gate: each coordinate at least 8, so the L1 norm exceeds it.
      const double sx = rng.bernoulli(0.5) ? 1.0 : -1.0;
      const double sy = rng.bernoulli(0.5) ? 1.0 : -1.0;
      step.dp_gt = Vec2(sx * rng.uniform(8.0, 20.0), sy * rng.uniform(8.0, 20.0));
    }
    step.visible_gt = rng.bernoulli(0.5);

    Observation obs;
    obs.z = step.z;
    obs.R = remap(step.report, step.map);
    const KalmanJacobians jac = kalman_jacobians(step.state_pred, obs);

    // Finite-difference check of both sensitivity blocks, at two step sizes.
    for (const double h : {1e-5, 1e-6}) {
      for (int c = 0; c < 2; ++c) {
        Observation op = obs, om = obs;
        op.z(c) += h;
        om.z(c) -= h;
        const Vec4 num =
            (update(step.state_pred, op).first.x - update(step.state_pred, om).first.x) /
            (2.0 * h);
        for (int r = 0; r < 4; ++r) {
          const double a = jac.dx_dz(r, c);
          const double rel = std::abs(a - num(r)) / std::max({1.0, std::abs(a), std::abs(num(r))});
          res.max_rel_err_jacobian = std::max(res.max_rel_err_jacobian, rel);
        }
        op = obs;
        om = obs;
        op.R(c, c) += h;
        om.R(c, c) -= h;
        const Vec4 numR =
            (update(step.state_pred, op).first.x - update(step.state_pred, om).first.x) /
            (2.0 * h);
        for (int r = 0; r < 4; ++r) {
          const double a = jac.dx_dRdiag(r, c);
          const double rel =
              std::abs(a - numR(r)) / std::max({1.0, std::abs(a), std::abs(numR(r))});
          res.max_rel_err_jacobian = std::max(res.max_rel_err_jacobian, rel);
        }
      }
    }

    const GradReport grad = loss_gradients(step, dspec, uspec);
    if (grad.kink) {
      ++res.kinks_skipped;
      continue;
    }
    res.max_rel_err_loss = std::max(res.max_rel_err_loss, grad.max_rel_err);
  }
  res.pass = res.max_rel_err_jacobian < kGradcheckJacobianTol &&
             res.max_rel_err_loss < kGradcheckLossTol;
  return res;
}

BenchResult cmd_bench(std::uint64_t iterations) {
  if (iterations == 0) fail(Errc::invalid_argument, "bench needs at least one iteration");
  const ProcessModel pm;
  StateEstimate s;
  s.x << 320.0, 240.0, 5.0, -3.0;
  s.P = Mat4::Identity();
  s.P(2, 2) = s.P(3, 3) = 25.0;

  Observation obs;
  obs.R = Mat2::Identity();
  const double wobble[4][2] = {{0.3, -0.2}, {-0.1, 0.4}, {0.2, 0.1}, {-0.4, -0.3}};

  BenchResult res;
  res.iterations = iterations;
  const auto start = std::chrono::steady_clock::now();
  for (std::uint64_t j = 0; j < iterations; ++j) {
    const auto* w = wobble[j & 3];
    obs.z = Vec2(320.0 + w[0], 240.0 + w[1]);
    s = predict_update(s, 0.01, pm, obs).first;
    res.checksum += s.x(0);
  }
  const auto stop = std::chrono::steady_clock::now();
  const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
  res.mean_step_ns = static_cast<double>(ns) / static_cast<double>(iterations);
  return res;
}

}  // namespace fusetrack
