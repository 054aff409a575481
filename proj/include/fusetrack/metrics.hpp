#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "fusetrack/types.hpp"

namespace fusetrack {

struct EvalConfig {
  double fa_dist_threshold = 5.0;  // px, feature-age failure distance
  std::vector<double> delta_thresholds{1.0, 2.0, 4.0, 8.0, 16.0};
  double stable_min_age = 0.1;  // tracks below this feature age count as lost

  void validate() const;
};

// Prediction position at time t, linearly interpolated between neighbouring
// outputs; a t that exactly hits an output returns that output's position
// without interpolation. t must lie inside [first.t, last.t].
Vec2 interpolate_at(const std::vector<TrackOutput>& outputs, double t);

// Normalized time until the prediction first drifts more than
// fa_dist_threshold from ground truth (strictly greater), evaluated at the
// gt sample times; 1.0 if it never does. Gt samples outside the prediction's
// time range are skipped.
double feature_age(const std::vector<TrackOutput>& pred, const GroundTruthTrack& gt,
                   const EvalConfig& cfg);

// Mean feature age over stable tracks (fa >= stable_min_age), scaled by the
// fraction of tracks that are stable; 0 when no track is stable.
double expected_feature_age(const std::vector<double>& per_track_fa, const EvalConfig& cfg);

// Fraction of evaluated points with error strictly below each threshold,
// averaged over the thresholds. Splits follow the gt visibility flag; a split
// with no points has no value rather than a zero.
struct DeltaSplits {
  std::optional<double> vis;
  std::optional<double> occ;
  std::optional<double> all;
  std::uint64_t n_vis = 0;
  std::uint64_t n_occ = 0;
  std::uint64_t n_excluded = 0;  // gt samples outside the prediction range
};

DeltaSplits delta_avg(const std::vector<TrackOutput>& pred, const GroundTruthTrack& gt,
                      const EvalConfig& cfg);

struct TrackEval {
  std::int64_t track_id = 0;
  double fa = 0.0;
  DeltaSplits delta;
};

struct EvalReport {
  std::vector<TrackEval> per_track;
  double fa_mean = 0.0;
  double expected_fa = 0.0;
  // Aggregate deltas pool the evaluated points of every track before
  // thresholding; they are not means of the per-track values.
  std::optional<double> delta_vis;
  std::optional<double> delta_occ;
  std::optional<double> delta_all;
  std::uint64_t n_vis = 0;
  std::uint64_t n_occ = 0;
  std::uint64_t n_excluded = 0;
  std::vector<std::int64_t> missing_pred_tracks;  // gt ids with no predictions
  std::vector<std::int64_t> missing_gt_tracks;    // prediction ids with no gt
};

// Pairs predictions with ground truth by track id. Ids present on only one
// side are listed, not errors; with no common ids the report is empty apart
// from those lists.
EvalReport evaluate(const std::map<std::int64_t, std::vector<TrackOutput>>& preds,
                    const std::vector<GroundTruthTrack>& gts, const EvalConfig& cfg);

}  // namespace fusetrack
