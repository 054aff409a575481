#include "fusetrack.h"

#include <cmath>
#include <cstring>
#include <string>

#include "fusetrack/fusion.hpp"
#include "fusetrack/losses.hpp"
#include "pipeline.hpp"

namespace {

thread_local std::string g_last_error;

ft_status to_status(fusetrack::Errc c) {
  switch (c) {
    case fusetrack::Errc::invalid_argument: return FT_ERR_INVALID_ARGUMENT;
    case fusetrack::Errc::out_of_order: return FT_ERR_OUT_OF_ORDER;
    case fusetrack::Errc::singular: return FT_ERR_SINGULAR;
    case fusetrack::Errc::parse: return FT_ERR_PARSE;
    case fusetrack::Errc::io: return FT_ERR_IO;
    case fusetrack::Errc::unknown_track: return FT_ERR_UNKNOWN_TRACK;
    case fusetrack::Errc::internal: return FT_ERR_INTERNAL;
  }
  return FT_ERR_INTERNAL;
}

template <typename Fn>
ft_status guarded(Fn&& fn) {
  try {
    fn();
    return FT_OK;
  } catch (const fusetrack::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FT_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return FT_ERR_INTERNAL;
  }
}

ft_status bad_arg(const char* what) {
  g_last_error = what;
  return FT_ERR_INVALID_ARGUMENT;
}

void copy_state(const fusetrack::StateEstimate& s, double x_out[4], double P_out[16],
                double* t_out) {
  for (int i = 0; i < 4; ++i) x_out[i] = s.x(i);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) P_out[4 * r + c] = s.P(r, c);
  }
  if (t_out) *t_out = s.t;
}

fusetrack::StateEstimate read_state(const double x[4], const double P[16], double t) {
  fusetrack::StateEstimate s;
  for (int i = 0; i < 4; ++i) s.x(i) = x[i];
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) s.P(r, c) = P[4 * r + c];
  }
  s.t = t;
  return s;
}

void copy_output(const fusetrack::TrackOutput& o, ft_output* out) {
  out->t = o.t;
  out->pos[0] = o.pos.x();
  out->pos[1] = o.pos.y();
  out->cov_pos[0] = o.cov_pos(0, 0);
  out->cov_pos[1] = o.cov_pos(0, 1);
  out->cov_pos[2] = o.cov_pos(1, 0);
  out->cov_pos[3] = o.cov_pos(1, 1);
  out->p_vis_used = o.p_vis_used;
  out->emitted = 1;
}

std::string opt_str(const char* s) { return s ? std::string(s) : std::string(); }

}  // namespace

extern "C" {

struct ft_tracker {
  fusetrack::Tracker impl;
  fusetrack::TrackOutput initial;
};

const char* ft_last_error(void) { return g_last_error.c_str(); }

const char* ft_status_name(ft_status status) {
  switch (status) {
    case FT_OK: return "ok";
    case FT_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case FT_ERR_OUT_OF_ORDER: return "out_of_order";
    case FT_ERR_SINGULAR: return "singular";
    case FT_ERR_PARSE: return "parse";
    case FT_ERR_IO: return "io";
    case FT_ERR_UNKNOWN_TRACK: return "unknown_track";
    case FT_ERR_INTERNAL: return "internal";
  }
  return "?";
}

ft_status ft_kalman_predict(const double x[4], const double P[16], double t, double dt,
                            double q_pos, double q_vel, double x_out[4], double P_out[16],
                            double* t_out) {
  if (!x || !P || !x_out || !P_out) return bad_arg("ft_kalman_predict: NULL argument");
  return guarded([&] {
    fusetrack::ProcessModel pm;
    pm.q_pos = q_pos;
    pm.q_vel = q_vel;
    const auto out = fusetrack::predict(read_state(x, P, t), dt, pm);
    copy_state(out, x_out, P_out, t_out);
  });
}

ft_status ft_kalman_update(const double x[4], const double P[16], const double z[2],
                           const double R[4], double x_out[4], double P_out[16]) {
  if (!x || !P || !z || !R || !x_out || !P_out) return bad_arg("ft_kalman_update: NULL argument");
  return guarded([&] {
    fusetrack::Observation obs;
    obs.z = fusetrack::Vec2(z[0], z[1]);
    obs.R << R[0], R[1], R[2], R[3];
    const auto out = fusetrack::update(read_state(x, P, 0.0), obs).first;
    copy_state(out, x_out, P_out, nullptr);
  });
}

ft_status ft_remap_variance(double p_vis, double sigma2_min, double sigma2_max,
                            double* sigma2_out) {
  if (!sigma2_out) return bad_arg("ft_remap_variance: NULL output");
  return guarded([&] {
    fusetrack::NoiseMap map;
    map.sigma2_min = sigma2_min;
    map.sigma2_max = sigma2_max;
    *sigma2_out = fusetrack::remap_variance(p_vis, map);
  });
}

void ft_tracker_params_init(ft_tracker_params* params) {
  if (!params) return;
  std::memset(params, 0, sizeof(*params));
  params->t0 = 0.0;
  params->init_pos_var = 1.0;
  params->init_vel_var = 100.0;
  params->mode = FT_MODE_KALMAN_FUSED;
  params->ooo_policy = FT_OOO_REJECT;
  params->ooo_window = 0.0;
  const fusetrack::ProcessModel pm;
  params->q_pos = pm.q_pos;
  params->q_vel = 3000.0;
  params->event_sigma2_min = 0.4;
  params->event_sigma2_max = 1.0e4;
  params->frame_sigma2_min = 0.49;
  params->frame_sigma2_max = 1.0e4;
}

ft_status ft_tracker_create(const ft_tracker_params* params, ft_tracker** out) {
  if (!params || !out) return bad_arg("ft_tracker_create: NULL argument");
  if (params->mode < 0 || params->mode > FT_MODE_KALMAN_FUSED) {
    return bad_arg("ft_tracker_create: bad mode");
  }
  if (params->ooo_policy < 0 || params->ooo_policy > FT_OOO_BUFFER) {
    return bad_arg("ft_tracker_create: bad ooo_policy");
  }
  return guarded([&] {
    fusetrack::TrackConfig cfg;
    cfg.p_ref = fusetrack::Vec2(params->p_ref[0], params->p_ref[1]);
    cfg.t0 = params->t0;
    cfg.init_pos_var = params->init_pos_var;
    cfg.init_vel_var = params->init_vel_var;
    cfg.ooo_policy = params->ooo_policy == FT_OOO_BUFFER ? fusetrack::OooPolicy::buffer
                                                         : fusetrack::OooPolicy::reject;
    cfg.ooo_window = params->ooo_window;
    fusetrack::ProcessModel pm;
    pm.q_pos = params->q_pos;
    pm.q_vel = params->q_vel;
    fusetrack::NoiseMaps maps;
    maps.event.sigma2_min = params->event_sigma2_min;
    maps.event.sigma2_max = params->event_sigma2_max;
    maps.frame.sigma2_min = params->frame_sigma2_min;
    maps.frame.sigma2_max = params->frame_sigma2_max;
    const auto mode = static_cast<fusetrack::FusionMode>(params->mode);
    auto* t = new ft_tracker{fusetrack::Tracker(cfg, mode, pm, maps), {}};
    t->initial = t->impl.initial_output();
    *out = t;
  });
}

void ft_tracker_destroy(ft_tracker* tracker) { delete tracker; }

ft_status ft_tracker_ingest(ft_tracker* tracker, const ft_measurement* measurement,
                            ft_output* out) {
  if (!tracker || !measurement || !out) return bad_arg("ft_tracker_ingest: NULL argument");
  if (measurement->source != FT_SOURCE_EVENT && measurement->source != FT_SOURCE_FRAME) {
    return bad_arg("ft_tracker_ingest: bad source");
  }
  if (measurement->kind != FT_KIND_ABSOLUTE && measurement->kind != FT_KIND_RELATIVE) {
    return bad_arg("ft_tracker_ingest: bad kind");
  }
  return guarded([&] {
    fusetrack::SourcedMeasurement m;
    m.t = measurement->t;
    m.track_id = measurement->track_id;
    m.source = measurement->source == FT_SOURCE_EVENT ? fusetrack::Source::event
                                                      : fusetrack::Source::frame;
    m.kind = measurement->kind == FT_KIND_RELATIVE ? fusetrack::MeasKind::relative
                                                   : fusetrack::MeasKind::absolute;
    m.z_raw = fusetrack::Vec2(measurement->z[0], measurement->z[1]);
    m.report.p_vis = measurement->p_vis;
    m.report.p_occ = 1.0 - measurement->p_vis;
    const auto res = tracker->impl.ingest(m);
    if (res) {
      copy_output(*res, out);
    } else {
      std::memset(out, 0, sizeof(*out));
      out->emitted = 0;
    }
  });
}

ft_status ft_tracker_initial_output(const ft_tracker* tracker, ft_output* out) {
  if (!tracker || !out) return bad_arg("ft_tracker_initial_output: NULL argument");
  copy_output(tracker->initial, out);
  return FT_OK;
}

ft_status ft_tracker_state(const ft_tracker* tracker, double x_out[4], double P_out[16],
                           double* t_out) {
  if (!tracker || !x_out || !P_out) return bad_arg("ft_tracker_state: NULL argument");
  copy_state(tracker->impl.state(), x_out, P_out, t_out);
  return FT_OK;
}

ft_status ft_tracker_rejected_count(const ft_tracker* tracker, uint64_t* count_out) {
  if (!tracker || !count_out) return bad_arg("ft_tracker_rejected_count: NULL argument");
  *count_out = tracker->impl.rejected_count();
  return FT_OK;
}

ft_status ft_generate(const char* config_path, const char* overrides, const char* out_dir,
                      ft_generate_result* result) {
  if (!out_dir) return bad_arg("ft_generate: NULL out_dir");
  return guarded([&] {
    const auto res = fusetrack::cmd_generate(opt_str(config_path), opt_str(overrides), out_dir);
    if (result) {
      result->n_tracks = res.n_tracks;
      result->n_measurements = res.n_measurements;
    }
  });
}

ft_status ft_track(const char* config_path, const char* overrides, const char* measurements_path,
                   const char* predictions_path, ft_track_result* result) {
  if (!measurements_path || !predictions_path) return bad_arg("ft_track: NULL path");
  return guarded([&] {
    const auto res = fusetrack::cmd_track(opt_str(config_path), opt_str(overrides),
                                          measurements_path, predictions_path);
    if (result) {
      result->n_outputs = res.n_outputs;
      result->n_rejected = res.n_rejected;
    }
  });
}

ft_status ft_eval(const char* config_path, const char* overrides, const char* predictions_path,
                  const char* gt_path, const char* report_path, const char* csv_path,
                  ft_eval_result* result) {
  if (!predictions_path || !report_path) return bad_arg("ft_eval: NULL path");
  return guarded([&] {
    const auto res = fusetrack::cmd_eval(opt_str(config_path), opt_str(overrides),
                                         predictions_path, opt_str(gt_path), report_path,
                                         opt_str(csv_path));
    if (result) {
      const auto nan = std::nan("");
      result->fa_mean = res.report.fa_mean;
      result->expected_fa = res.report.expected_fa;
      result->delta_vis = res.report.delta_vis.value_or(nan);
      result->delta_occ = res.report.delta_occ.value_or(nan);
      result->delta_all = res.report.delta_all.value_or(nan);
      result->n_vis = res.report.n_vis;
      result->n_occ = res.report.n_occ;
      result->n_excluded = res.report.n_excluded;
      result->n_tracks_evaluated = res.report.per_track.size();
    }
  });
}

ft_status ft_gradcheck(uint64_t seed, uint64_t cases, ft_gradcheck_result* result) {
  if (!result) return bad_arg("ft_gradcheck: NULL result");
  return guarded([&] {
    const auto res = fusetrack::cmd_gradcheck(seed, cases);
    result->cases = res.cases;
    result->kinks_skipped = res.kinks_skipped;
    result->max_rel_err_jacobian = res.max_rel_err_jacobian;
    result->max_rel_err_loss = res.max_rel_err_loss;
    result->pass = res.pass ? 1 : 0;
  });
}

ft_status ft_bench(uint64_t iterations, ft_bench_result* result) {
  if (!result) return bad_arg("ft_bench: NULL result");
  return guarded([&] {
    const auto res = fusetrack::cmd_bench(iterations);
    result->iterations = res.iterations;
    result->mean_step_ns = res.mean_step_ns;
    result->checksum = res.checksum;
  });
}

}  // extern "C"
