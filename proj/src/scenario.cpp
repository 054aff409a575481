#include "fusetrack/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fusetrack/rng.hpp"

namespace fusetrack {

namespace {

// Seed-derivation tags; part of the reproducibility contract.
constexpr std::uint64_t kTagTrack = 1;
constexpr std::uint64_t kTagOccluder = 2;
constexpr std::uint64_t kTagStream = 3;
constexpr std::uint64_t kTagBench = 4;

// Per-stream sub-purposes.
constexpr std::uint64_t kSubBias = 1;
constexpr std::uint64_t kSubNoise = 2;
constexpr std::uint64_t kSubFlip = 3;
constexpr std::uint64_t kSubGarbage = 4;

}  // namespace

const char* occluded_behavior_name(OccludedBehavior b) {
  return b == OccludedBehavior::stuck ? "stuck" : "uniform_garbage";
}

OccludedBehavior occluded_behavior_from_name(const std::string& s) {
  if (s == "stuck") return OccludedBehavior::stuck;
  if (s == "uniform_garbage") return OccludedBehavior::uniform_garbage;
  fail(Errc::parse, "unknown occluded behavior '" + s + "'");
}

void SourceModel::validate() const {
  if (!(rate_hz > 0.0)) fail(Errc::invalid_argument, "source rate must be positive");
  if (noise_std < 0.0 || drift_std < 0.0 || garbage_radius < 0.0) {
    fail(Errc::invalid_argument, "source noise parameters must be nonnegative");
  }
  if (!(vis_flip_prob >= 0.0 && vis_flip_prob < 1.0)) {
    fail(Errc::invalid_argument, "vis_flip_prob must lie in [0, 1)");
  }
}

SourceModel default_event_model() {
  SourceModel m;
  m.source = Source::event;
  m.rate_hz = 100.0;
  m.noise_std = 0.1;
  m.drift_std = 0.08;
  m.behavior = OccludedBehavior::stuck;
  m.garbage_radius = 10.0;
  m.vis_flip_prob = 0.002;
  return m;
}

SourceModel default_frame_model() {
  SourceModel m;
  m.source = Source::frame;
  m.rate_hz = 24.0;
  m.noise_std = 0.7;
  m.drift_std = 0.0;
  m.behavior = OccludedBehavior::uniform_garbage;
  m.garbage_radius = 10.0;
  m.vis_flip_prob = 0.005;
  return m;
}

void ScenarioSpec::validate() const {
  if (!(duration_s > 0.0)) fail(Errc::invalid_argument, "duration must be positive");
  if (!(master_rate_hz > 0.0)) fail(Errc::invalid_argument, "master rate must be positive");
  if (n_tracks < 0) fail(Errc::invalid_argument, "n_tracks must be nonnegative");
  if (!(arena_w > 0.0) || !(arena_h > 0.0)) fail(Errc::invalid_argument, "arena must be nonempty");
  if (!(motion.max_speed > 0.0) || motion.accel_std < 0.0 || !(motion.accel_segment_s > 0.0)) {
    fail(Errc::invalid_argument, "bad motion parameters");
  }
  if (!(occluder.size_min > 0.0) || occluder.size_max < occluder.size_min) {
    fail(Errc::invalid_argument, "bad occluder sizes");
  }
  if (occluder.coverage_min < 0.0 || occluder.coverage_max > 1.0 ||
      occluder.coverage_max < occluder.coverage_min) {
    fail(Errc::invalid_argument, "bad occluder coverage band");
  }
  if (!(occluder.window_min_s > 0.0) || occluder.window_max_s < occluder.window_min_s) {
    fail(Errc::invalid_argument, "bad occluder windows");
  }
  event_source.validate();
  frame_source.validate();
  if (event_source.source != Source::event || frame_source.source != Source::frame) {
    fail(Errc::invalid_argument, "source models are tied to their slots");
  }
}

Vec2 gt_position_at(const GroundTruthTrack& track, double t) {
  if (track.samples.empty()) fail(Errc::invalid_argument, "track has no samples");
  const auto& ss = track.samples;
  if (t <= ss.front().t) return ss.front().pos;
  if (t >= ss.back().t) return ss.back().pos;
  auto it = std::lower_bound(ss.begin(), ss.end(), t,
                             [](const GroundTruthSample& s, double tt) { return s.t < tt; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double den = b.t - a.t;
  if (den <= 0.0) return a.pos;
  const double w = (t - a.t) / den;
  return a.pos + w * (b.pos - a.pos);
}

namespace {

GroundTruthTrack make_track(const ScenarioSpec& spec, int index) {
  Rng rng(seed_for(spec.seed, kTagTrack, static_cast<std::uint64_t>(index)));
  const auto& mp = spec.motion;
  const double dt = 1.0 / spec.master_rate_hz;
  const auto n_steps = static_cast<std::int64_t>(std::floor(spec.duration_s * spec.master_rate_hz + 1e-9));
  const Vec2 center(0.5 * spec.arena_w, 0.5 * spec.arena_h);

  GroundTruthTrack track;
  track.track_id = index;
  track.samples.reserve(static_cast<std::size_t>(n_steps) + 1);

  Vec2 p(rng.uniform(0.15 * spec.arena_w, 0.85 * spec.arena_w),
         rng.uniform(0.15 * spec.arena_h, 0.85 * spec.arena_h));
  const double speed = rng.uniform(0.2, 0.7) * mp.max_speed;
  const double heading = rng.uniform(0.0, 6.283185307179586);
  Vec2 v = speed * Vec2(std::cos(heading), std::sin(heading));
  track.samples.push_back({0.0, p, true});

  const auto seg_steps = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::llround(mp.accel_segment_s * spec.master_rate_hz)));
  Vec2 a = Vec2::Zero();
  for (std::int64_t k = 0; k < n_steps; ++k) {
    if (k % seg_steps == 0) {
      a = rng.gauss2(mp.accel_std) + mp.steer_gain * (center - p);
      const double norm = a.norm();
      const double cap = 3.0 * mp.accel_std;
      if (norm > cap && norm > 0.0) a *= cap / norm;
    }
    v += a * dt;
    const double vnorm = v.norm();
    if (vnorm > mp.max_speed) v *= mp.max_speed / vnorm;
    p += v * dt;
    track.samples.push_back({static_cast<double>(k + 1) / spec.master_rate_hz, p, true});
  }
  return track;
}

struct CoverageLedger {
  std::vector<std::vector<int>> hits;  // [track][sample] overlap count
  std::int64_t covered = 0;
  std::int64_t total = 0;

  explicit CoverageLedger(const std::vector<GroundTruthTrack>& tracks) {
    hits.reserve(tracks.size());
    for (const auto& tr : tracks) {
      hits.emplace_back(tr.samples.size(), 0);
      total += static_cast<std::int64_t>(tr.samples.size());
    }
  }

  double fraction() const { return total > 0 ? static_cast<double>(covered) / total : 0.0; }

  // Applies one occluder, returning the touched (track, sample) pairs so the
  // caller can revert an overshooting placement.
  std::vector<std::pair<std::size_t, std::size_t>> add(const std::vector<GroundTruthTrack>& tracks,
                                                       const Occluder& occ) {
    std::vector<std::pair<std::size_t, std::size_t>> touched;
    for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
      const auto& ss = tracks[ti].samples;
      for (std::size_t si = 0; si < ss.size(); ++si) {
        if (occ.contains(ss[si].pos, ss[si].t)) {
          if (hits[ti][si]++ == 0) ++covered;
          touched.emplace_back(ti, si);
        }
      }
    }
    return touched;
  }

  void revert(const std::vector<std::pair<std::size_t, std::size_t>>& touched) {
    for (const auto& [ti, si] : touched) {
      if (--hits[ti][si] == 0) --covered;
    }
  }
};

OccluderSet place_occluders(const ScenarioSpec& spec, std::vector<GroundTruthTrack>& tracks) {
  OccluderSet set;
  const auto& op = spec.occluder;
  CoverageLedger ledger(tracks);
  if (ledger.total == 0 || op.coverage_max <= 0.0 || op.max_attempts <= 0) return set;

  Rng rng(seed_for(spec.seed, kTagOccluder));
  const double band = op.coverage_max - op.coverage_min;
  const double pad = std::min(0.2 * band, 0.03);
  const double target = rng.uniform(op.coverage_min + pad, op.coverage_max - pad);
  double window_hi = op.window_max_s;

  for (int attempt = 0; attempt < op.max_attempts && ledger.fraction() < target; ++attempt) {
    const auto ti = rng.uniform_index(tracks.size());
    const auto& track = tracks[ti];
    const double t_mid = rng.uniform(0.12, 0.88) * spec.duration_s;
    double len = rng.uniform(op.window_min_s, window_hi);
    const double t_lo = std::max(0.0, t_mid - 0.5 * len);
    const double t_hi = std::min(spec.duration_s, t_mid + 0.5 * len);

    // Moving occluders follow the target's mean velocity over the window, so
    // the bounding box is taken in the co-moving frame.
    Vec2 vel = Vec2::Zero();
    if (rng.bernoulli(op.moving_frac) && t_hi > t_lo) {
      vel = (gt_position_at(track, t_hi) - gt_position_at(track, t_lo)) / (t_hi - t_lo);
    }
    const double margin = rng.uniform(op.margin_min, op.margin_max);

    Vec2 lo(1e300, 1e300), hi(-1e300, -1e300);
    for (const auto& s : track.samples) {
      if (s.t < t_lo || s.t > t_hi) continue;
      const Vec2 q = s.pos - vel * s.t;
      lo = lo.cwiseMin(q);
      hi = hi.cwiseMax(q);
    }
    if (lo.x() > hi.x()) continue;  // no samples in window

    Occluder occ;
    occ.vel = vel;
    occ.c0 = 0.5 * (lo + hi);
    occ.w = hi.x() - lo.x() + 2.0 * margin;
    occ.h = hi.y() - lo.y() + 2.0 * margin;
    if (occ.w > op.size_max || occ.h > op.size_max) {
      // Track wanders too far for this window; try shorter ones from now on.
      window_hi = std::max(op.window_min_s, 0.8 * window_hi);
      continue;
    }
    occ.w = std::max(occ.w, op.size_min);
    occ.h = std::max(occ.h, op.size_min);

    auto touched = ledger.add(tracks, occ);
    if (ledger.fraction() > op.coverage_max - 0.01) {
      ledger.revert(touched);
      window_hi = std::max(op.window_min_s, 0.8 * window_hi);
      continue;
    }
    set.rects.push_back(occ);
  }

  const double f = ledger.fraction();
  if (f < op.coverage_min || f > op.coverage_max) {
    fail(Errc::internal, "occluder placement missed the coverage band: reached " +
                             std::to_string(f) + " for seed " + std::to_string(spec.seed));
  }
  for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
    auto& ss = tracks[ti].samples;
    for (auto& s : ss) s.visible = !set.occluded(s.pos, s.t);
  }
  return set;
}

}  // namespace

GeneratedScenario generate_tracks(const ScenarioSpec& spec) {
  spec.validate();
  GeneratedScenario out;
  out.tracks.reserve(static_cast<std::size_t>(spec.n_tracks));
  for (int i = 0; i < spec.n_tracks; ++i) out.tracks.push_back(make_track(spec, i));
  out.occluders = place_occluders(spec, out.tracks);
  return out;
}

SimulatedStream simulate_source(const GroundTruthTrack& track, const OccluderSet& occluders,
                                const SourceModel& model, std::uint64_t stream_seed) {
  model.validate();
  if (track.samples.empty()) fail(Errc::invalid_argument, "track has no samples");

  Rng bias_rng(seed_for(stream_seed, kSubBias));
  Rng noise_rng(seed_for(stream_seed, kSubNoise));
  Rng flip_rng(seed_for(stream_seed, kSubFlip));
  Rng garbage_rng(seed_for(stream_seed, kSubGarbage));

  const double duration = track.samples.back().t;
  const auto n = static_cast<std::int64_t>(std::floor(duration * model.rate_hz + 1e-9));
  const Vec2 start = track.samples.front().pos;
  // Frames relocalize against the whole image, so their bias is pinned at
  // zero regardless of the configured drift. The draw still happens to keep
  // the substream layout independent of the parameter.
  const double drift = model.source == Source::frame ? 0.0 : model.drift_std;

  SimulatedStream out;
  out.measurements.reserve(static_cast<std::size_t>(n));
  out.absolutes.reserve(static_cast<std::size_t>(n));

  Vec2 bias = Vec2::Zero();
  Vec2 chain_prev = start;
  Vec2 last_visible = start;
  for (std::int64_t j = 1; j <= n; ++j) {
    const double t = static_cast<double>(j) / model.rate_hz;
    const Vec2 gt = gt_position_at(track, t);
    const bool visible = !occluders.occluded(gt, t);

    bias += bias_rng.gauss2(drift);
    const Vec2 noise = noise_rng.gauss2(model.noise_std);

    Vec2 z_abs;
    if (visible) {
      z_abs = gt + noise + bias;
      last_visible = z_abs;
    } else if (model.behavior == OccludedBehavior::stuck) {
      z_abs = last_visible;
    } else {
      const double u = garbage_rng.uniform01();
      const double ang = 6.283185307179586 * garbage_rng.uniform01();
      const double r = model.garbage_radius * std::sqrt(u);
      z_abs = last_visible + r * Vec2(std::cos(ang), std::sin(ang));
    }

    const bool reported = flip_rng.bernoulli(model.vis_flip_prob) ? !visible : visible;

    SourcedMeasurement m;
    m.t = t;
    m.track_id = track.track_id;
    m.source = model.source;
    m.kind = model.source == Source::event ? MeasKind::relative : MeasKind::absolute;
    m.z_raw = m.kind == MeasKind::relative ? Vec2(z_abs - chain_prev) : z_abs;
    m.report.p_vis = reported ? 1.0 : 0.0;
    m.report.p_occ = 1.0 - m.report.p_vis;
    out.measurements.push_back(m);
    out.absolutes.push_back(z_abs);
    chain_prev = z_abs;
  }
  out.terminal_bias = bias;
  return out;
}

ScenarioData generate_scenario(const ScenarioSpec& spec) {
  ScenarioData data;
  data.gt = generate_tracks(spec);
  for (const auto& track : data.gt.tracks) {
    auto stream = simulate_source(
        track, data.gt.occluders, spec.event_source,
        seed_for(spec.seed, kTagStream, 0, static_cast<std::uint64_t>(track.track_id)));
    data.measurements.insert(data.measurements.end(), stream.measurements.begin(),
                             stream.measurements.end());
  }
  for (const auto& track : data.gt.tracks) {
    auto stream = simulate_source(
        track, data.gt.occluders, spec.frame_source,
        seed_for(spec.seed, kTagStream, 1, static_cast<std::uint64_t>(track.track_id)));
    data.measurements.insert(data.measurements.end(), stream.measurements.begin(),
                             stream.measurements.end());
  }
  return data;
}

std::vector<ScenarioSpec> benchmark_suite(std::uint64_t base_seed) {
  std::vector<ScenarioSpec> specs;
  specs.reserve(100);
  for (std::uint64_t i = 0; i < 100; ++i) {
    ScenarioSpec spec;  // defaults are the benchmark operating point
    spec.seed = seed_for(base_seed, kTagBench, i);
    specs.push_back(spec);
  }
  return specs;
}

}  // namespace fusetrack
