#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "fusetrack/kalman.hpp"
#include "fusetrack/uncertainty.hpp"

namespace fusetrack {

enum class FusionMode { event_only, frame_only, naive_combo, kalman_fused };

const char* fusion_mode_name(FusionMode m);
FusionMode fusion_mode_from_name(const std::string& s);

// What to do with a measurement that arrives behind the current state time.
// reject drops it (counted); buffer fuses it at the current state time as long
// as it is no older than ooo_window seconds, and drops it beyond that.
enum class OooPolicy { reject, buffer };

struct TrackConfig {
  Vec2 p_ref = Vec2::Zero();  // initial position, also the first event anchor
  double t0 = 0.0;
  double init_pos_var = 1.0;
  double init_vel_var = 100.0;
  OooPolicy ooo_policy = OooPolicy::reject;
  double ooo_window = 0.0;
};

struct NoiseMaps {
  NoiseMap event;
  NoiseMap frame;

  const NoiseMap& for_source(Source s) const { return s == Source::event ? event : frame; }
};

// Converts a relative measurement into an absolute position by adding the
// anchor. The anchor is the fused output at the previous event step (p_ref
// before any event has been processed); a missing anchor is an error.
Vec2 anchor_to_absolute(const SourcedMeasurement& m, const std::optional<Vec2>& anchor);

// Single-track fusion state machine. One instance per track; ingest accepts
// measurements in nondecreasing time order (subject to the out-of-order
// policy) and emits one output per processed measurement.
//
// Mode semantics:
//   event_only / frame_only  measurements from the other source are ignored
//                            (no output, not an error);
//   kalman_fused             every measurement runs predict + update with the
//                            per-source remapped covariance;
//   naive_combo              position is overwritten by the measurement and
//                            velocity re-estimated by finite difference; the
//                            covariance is never updated.
//
// Relative event measurements are anchored to this tracker's own fused output
// at the previous event step, in every mode.
class Tracker {
 public:
  Tracker(const TrackConfig& cfg, FusionMode mode, const ProcessModel& pm, const NoiseMaps& maps);

  // Output for the processed measurement, or nullopt when the measurement was
  // ignored (non-matching source) or dropped by the out-of-order policy.
  std::optional<TrackOutput> ingest(const SourcedMeasurement& m);

  // Output at t0, before any measurement.
  TrackOutput initial_output() const;

  const StateEstimate& state() const { return state_; }
  const Vec2& event_anchor() const { return anchor_; }
  std::uint64_t rejected_count() const { return rejected_; }

 private:
  TrackConfig cfg_;
  FusionMode mode_;
  ProcessModel pm_;
  NoiseMaps maps_;
  StateEstimate state_;
  Vec2 anchor_;
  std::uint64_t rejected_ = 0;
};

struct ScenarioRun {
  std::map<std::int64_t, std::vector<TrackOutput>> outputs;  // first entry is at t0
  std::uint64_t rejected = 0;
};

// Runs one tracker per configured track over the merged measurement set.
// The input may be any concatenation of per-source time-sorted streams; it is
// stable-sorted by (t, source, track_id) with frames before events at equal
// timestamps, so interleaving across sources does not affect the result.
// A measurement whose track_id has no configuration is an error.
ScenarioRun run_scenario(const std::vector<SourcedMeasurement>& measurements,
                         const std::map<std::int64_t, TrackConfig>& configs, FusionMode mode,
                         const ProcessModel& pm, const NoiseMaps& maps);

}  // namespace fusetrack
