#include "fusetrack/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fusetrack {

const char* fusion_mode_name(FusionMode m) {
  switch (m) {
    case FusionMode::event_only: return "event_only";
    case FusionMode::frame_only: return "frame_only";
    case FusionMode::naive_combo: return "naive_combo";
    case FusionMode::kalman_fused: return "kalman_fused";
  }
  return "?";
}

FusionMode fusion_mode_from_name(const std::string& s) {
  if (s == "event_only") return FusionMode::event_only;
  if (s == "frame_only") return FusionMode::frame_only;
  if (s == "naive_combo") return FusionMode::naive_combo;
  if (s == "kalman_fused") return FusionMode::kalman_fused;
  fail(Errc::parse, "unknown fusion mode '" + s + "'");
}

Vec2 anchor_to_absolute(const SourcedMeasurement& m, const std::optional<Vec2>& anchor) {
  if (m.kind != MeasKind::relative) {
    fail(Errc::invalid_argument, "anchor_to_absolute: measurement is not relative");
  }
  if (!anchor) {
    fail(Errc::invalid_argument, "anchor_to_absolute: no anchor available");
  }
  return *anchor + m.z_raw;
}

Tracker::Tracker(const TrackConfig& cfg, FusionMode mode, const ProcessModel& pm,
                 const NoiseMaps& maps)
    : cfg_(cfg), mode_(mode), pm_(pm), maps_(maps), anchor_(cfg.p_ref) {
  if (!(cfg.init_pos_var > 0.0) || !(cfg.init_vel_var > 0.0)) {
    fail(Errc::invalid_argument, "initial variances must be positive");
  }
  if (cfg.ooo_policy == OooPolicy::buffer && !(cfg.ooo_window >= 0.0)) {
    fail(Errc::invalid_argument, "ooo_window must be nonnegative");
  }
  maps_.event.validate();
  maps_.frame.validate();
  state_.x << cfg.p_ref, 0.0, 0.0;
  state_.P = Mat4::Zero();
  state_.P(0, 0) = state_.P(1, 1) = cfg.init_pos_var;
  state_.P(2, 2) = state_.P(3, 3) = cfg.init_vel_var;
  state_.t = cfg.t0;
}

TrackOutput Tracker::initial_output() const {
  TrackOutput out;
  out.t = cfg_.t0;
  out.pos = cfg_.p_ref;
  out.cov_pos = cfg_.init_pos_var * Mat2::Identity();
  out.p_vis_used = 1.0;
  return out;
}

std::optional<TrackOutput> Tracker::ingest(const SourcedMeasurement& m) {
  if (mode_ == FusionMode::event_only && m.source != Source::event) return std::nullopt;
  if (mode_ == FusionMode::frame_only && m.source != Source::frame) return std::nullopt;
  if (!std::isfinite(m.t)) fail(Errc::invalid_argument, "measurement time must be finite");
  if (m.kind == MeasKind::relative && m.source != Source::event) {
    fail(Errc::invalid_argument, "relative measurements must come from the event source");
  }
  m.report.validate();

  double dt = m.t - state_.t;
  if (dt < 0.0) {
    // Late arrival. Either drop it, or (buffer policy) fuse it at the current
    // state time when it is still within the window. The output then carries
    // the state time, which keeps per-track outputs time-ordered.
    const bool accept = cfg_.ooo_policy == OooPolicy::buffer && -dt <= cfg_.ooo_window;
    if (!accept) {
      ++rejected_;
      return std::nullopt;
    }
    dt = 0.0;
  }

  const Vec2 z_abs =
      m.kind == MeasKind::relative ? anchor_to_absolute(m, anchor_) : m.z_raw;

  if (mode_ == FusionMode::naive_combo) {
    const Vec2 prev = state_.x.head<2>();
    if (dt > 0.0) state_.x.tail<2>() = (z_abs - prev) / dt;
    state_.x.head<2>() = z_abs;
    state_.t += dt;
  } else {
    state_ = predict(state_, dt, pm_);
    Observation obs;
    obs.z = z_abs;
    obs.R = remap(m.report, maps_.for_source(m.source));
    state_ = update(state_, obs).first;
  }

  TrackOutput out;
  out.t = state_.t;
  out.pos = state_.x.head<2>();
  out.cov_pos = state_.P.topLeftCorner<2, 2>();
  out.p_vis_used = m.report.p_vis;
  if (m.source == Source::event) anchor_ = out.pos;
  return out;
}

ScenarioRun run_scenario(const std::vector<SourcedMeasurement>& measurements,
                         const std::map<std::int64_t, TrackConfig>& configs, FusionMode mode,
                         const ProcessModel& pm, const NoiseMaps& maps) {
  std::vector<std::size_t> order(measurements.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ma = measurements[a];
    const auto& mb = measurements[b];
    if (ma.t != mb.t) return ma.t < mb.t;
    // Frames before events at equal timestamps: the frame provides the
    // absolute fix, the event then refines from the fresher anchor.
    const int ra = ma.source == Source::frame ? 0 : 1;
    const int rb = mb.source == Source::frame ? 0 : 1;
    if (ra != rb) return ra < rb;
    return ma.track_id < mb.track_id;
  });

  std::map<std::int64_t, Tracker> trackers;
  ScenarioRun run;
  for (const auto& [id, cfg] : configs) {
    auto [it, ok] = trackers.emplace(id, Tracker(cfg, mode, pm, maps));
    (void)ok;
    run.outputs[id].push_back(it->second.initial_output());
  }
  for (std::size_t idx : order) {
    const auto& m = measurements[idx];
    auto it = trackers.find(m.track_id);
    if (it == trackers.end()) {
      fail(Errc::unknown_track, "no configuration for track " + std::to_string(m.track_id));
    }
    if (auto out = it->second.ingest(m)) run.outputs[m.track_id].push_back(*out);
  }
  for (const auto& [id, tr] : trackers) run.rejected += tr.rejected_count();
  return run;
}

}  // namespace fusetrack
