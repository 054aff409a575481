#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fusetrack/types.hpp"

namespace fusetrack {

enum class OccludedBehavior { stuck, uniform_garbage };

const char* occluded_behavior_name(OccludedBehavior b);
OccludedBehavior occluded_behavior_from_name(const std::string& s);

// One simulated sensor. Visible samples report gt + white noise + a
// random-walk bias (drift_std per step; zero keeps the bias identically
// zero). Occluded samples either repeat the last visible position (stuck) or
// draw uniformly from a disk around it (uniform_garbage). The reported
// visibility is the true one flipped with probability vis_flip_prob.
struct SourceModel {
  Source source = Source::frame;
  double rate_hz = 24.0;
  double noise_std = 0.7;
  double drift_std = 0.0;
  OccludedBehavior behavior = OccludedBehavior::uniform_garbage;
  double garbage_radius = 10.0;
  double vis_flip_prob = 0.005;

  void validate() const;
};

SourceModel default_event_model();
SourceModel default_frame_model();

struct MotionParams {
  double max_speed = 20.0;       // px/s, hard clamp on integrated velocity
  double accel_std = 20.0;       // px/s^2, per-segment random acceleration
  double accel_segment_s = 0.3;  // acceleration held constant per segment
  double steer_gain = 0.3;       // 1/s^2 pull toward the arena center
};

struct OccluderParams {
  double size_min = 24.0;
  double size_max = 96.0;
  double coverage_min = 0.15;  // fraction of gt samples occluded, per scenario
  double coverage_max = 0.35;
  double window_min_s = 0.30;  // per-occluder targeted time window
  double window_max_s = 0.60;
  double margin_min = 5.0;
  double margin_max = 12.0;
  double moving_frac = 0.15;  // probability an occluder tracks mean target velocity
  int max_attempts = 400;
};

struct ScenarioSpec {
  std::uint64_t seed = 1;
  double duration_s = 2.0;
  double master_rate_hz = 1000.0;
  int n_tracks = 20;
  double arena_w = 640.0;
  double arena_h = 480.0;
  MotionParams motion;
  OccluderParams occluder;
  SourceModel event_source = default_event_model();
  SourceModel frame_source = default_frame_model();

  void validate() const;
};

// Axis-aligned rectangle moving at constant velocity; containment is closed.
struct Occluder {
  Vec2 c0 = Vec2::Zero();  // center at t = 0
  Vec2 vel = Vec2::Zero();
  double w = 0.0;
  double h = 0.0;

  Vec2 center_at(double t) const { return c0 + vel * t; }
  bool contains(const Vec2& p, double t) const {
    const Vec2 c = center_at(t);
    return std::abs(p.x() - c.x()) <= 0.5 * w && std::abs(p.y() - c.y()) <= 0.5 * h;
  }
};

struct OccluderSet {
  std::vector<Occluder> rects;

  bool occluded(const Vec2& p, double t) const {
    for (const auto& r : rects) {
      if (r.contains(p, t)) return true;
    }
    return false;
  }
};

struct GeneratedScenario {
  std::vector<GroundTruthTrack> tracks;
  OccluderSet occluders;
};

// Ground truth: piecewise-constant random acceleration integrated at the
// master rate with a hard speed clamp, plus greedily placed occluders sized
// to hit the per-scenario coverage band. Sample visibility flags reflect the
// placed occluders. Throws Errc::internal if the coverage band cannot be met.
GeneratedScenario generate_tracks(const ScenarioSpec& spec);

// Position linearly interpolated between gt samples (clamped at the ends).
Vec2 gt_position_at(const GroundTruthTrack& track, double t);

struct SimulatedStream {
  std::vector<SourcedMeasurement> measurements;
  std::vector<Vec2> absolutes;  // internal absolute chain, one per measurement
  Vec2 terminal_bias = Vec2::Zero();
};

// Samples one source over one track at t = j/rate_hz for j = 1..floor(T*rate);
// there is intentionally no measurement at t = 0, which the trackers cover
// with their initial output. Event sources emit relative displacements of
// their own absolute chain (chain starts at gt(0)); frame sources emit the
// chain values directly.
SimulatedStream simulate_source(const GroundTruthTrack& track, const OccluderSet& occluders,
                                const SourceModel& model, std::uint64_t stream_seed);

struct ScenarioData {
  GeneratedScenario gt;
  std::vector<SourcedMeasurement> measurements;  // events then frames, track-major
};

ScenarioData generate_scenario(const ScenarioSpec& spec);

// 100 specs at the benchmark operating point: 2 s scenarios, 1 kHz master
// rate, 20 tracks each, 100 Hz event stream, 24 Hz frame stream.
std::vector<ScenarioSpec> benchmark_suite(std::uint64_t base_seed);

}  // namespace fusetrack
