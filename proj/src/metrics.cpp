#include "fusetrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace fusetrack {

void EvalConfig::validate() const {
  if (!(fa_dist_threshold > 0.0)) fail(Errc::invalid_argument, "fa_dist_threshold must be positive");
  if (delta_thresholds.empty()) fail(Errc::invalid_argument, "delta_thresholds must be nonempty");
  for (double d : delta_thresholds) {
    if (!(d > 0.0)) fail(Errc::invalid_argument, "delta thresholds must be positive");
  }
  if (!(stable_min_age >= 0.0 && stable_min_age <= 1.0)) {
    fail(Errc::invalid_argument, "stable_min_age must lie in [0, 1]");
  }
}

Vec2 interpolate_at(const std::vector<TrackOutput>& outputs, double t) {
  if (outputs.empty()) fail(Errc::invalid_argument, "interpolate_at: no outputs");
  if (t < outputs.front().t || t > outputs.back().t) {
    fail(Errc::invalid_argument, "interpolate_at: t outside the output range");
  }
  auto it = std::lower_bound(outputs.begin(), outputs.end(), t,
                             [](const TrackOutput& o, double tt) { return o.t < tt; });
  if (it == outputs.end()) return outputs.back().pos;
  if (it->t == t || it == outputs.begin()) return it->pos;
  const auto& a = *(it - 1);
  const double den = it->t - a.t;
  if (den <= 0.0) return a.pos;
  const double w = (t - a.t) / den;
  return a.pos + w * (it->pos - a.pos);
}

namespace {

bool in_range(const std::vector<TrackOutput>& pred, double t) {
  return t >= pred.front().t && t <= pred.back().t;
}

}  // namespace

double feature_age(const std::vector<TrackOutput>& pred, const GroundTruthTrack& gt,
                   const EvalConfig& cfg) {
  cfg.validate();
  if (pred.empty()) fail(Errc::invalid_argument, "feature_age: no predictions");
  if (gt.samples.empty()) fail(Errc::invalid_argument, "feature_age: no gt samples");
  const double t0 = gt.samples.front().t;
  const double t_end = gt.samples.back().t;
  for (const auto& s : gt.samples) {
    if (!in_range(pred, s.t)) continue;
    const double err = (interpolate_at(pred, s.t) - s.pos).norm();
    if (err > cfg.fa_dist_threshold) {
      return t_end > t0 ? (s.t - t0) / (t_end - t0) : 0.0;
    }
  }
  return 1.0;
}

double expected_feature_age(const std::vector<double>& per_track_fa, const EvalConfig& cfg) {
  cfg.validate();
  if (per_track_fa.empty()) fail(Errc::invalid_argument, "expected_feature_age: no tracks");
  double sum = 0.0;
  std::size_t stable = 0;
  for (double fa : per_track_fa) {
    if (fa >= cfg.stable_min_age) {
      sum += fa;
      ++stable;
    }
  }
  if (stable == 0) return 0.0;
  const double mean = sum / static_cast<double>(stable);
  return mean * (static_cast<double>(stable) / static_cast<double>(per_track_fa.size()));
}

namespace {

struct DeltaAccum {
  std::vector<std::uint64_t> hits_vis, hits_occ;
  std::uint64_t n_vis = 0, n_occ = 0, n_excluded = 0;

  explicit DeltaAccum(std::size_t n_thresholds)
      : hits_vis(n_thresholds, 0), hits_occ(n_thresholds, 0) {}

  void add(const std::vector<TrackOutput>& pred, const GroundTruthTrack& gt,
           const EvalConfig& cfg) {
    for (const auto& s : gt.samples) {
      if (!in_range(pred, s.t)) {
        ++n_excluded;
        continue;
      }
      const double err = (interpolate_at(pred, s.t) - s.pos).norm();
      auto& hits = s.visible ? hits_vis : hits_occ;
      (s.visible ? n_vis : n_occ)++;
      for (std::size_t i = 0; i < cfg.delta_thresholds.size(); ++i) {
        if (err < cfg.delta_thresholds[i]) ++hits[i];
      }
    }
  }

  DeltaSplits splits(std::size_t n_thresholds) const {
    DeltaSplits out;
    out.n_vis = n_vis;
    out.n_occ = n_occ;
    out.n_excluded = n_excluded;
    auto mean_frac = [n_thresholds](const std::vector<std::uint64_t>& a,
                                    const std::vector<std::uint64_t>& b, std::uint64_t n,
                                    bool use_b) -> std::optional<double> {
      if (n == 0) return std::nullopt;
      double acc = 0.0;
      for (std::size_t i = 0; i < n_thresholds; ++i) {
        acc += static_cast<double>(a[i] + (use_b ? b[i] : 0)) / static_cast<double>(n);
      }
      return acc / static_cast<double>(n_thresholds);
    };
    out.vis = mean_frac(hits_vis, hits_occ, n_vis, false);
    out.occ = mean_frac(hits_occ, hits_vis, n_occ, false);
    out.all = mean_frac(hits_vis, hits_occ, n_vis + n_occ, true);
    return out;
  }
};

}  // namespace

DeltaSplits delta_avg(const std::vector<TrackOutput>& pred, const GroundTruthTrack& gt,
                      const EvalConfig& cfg) {
  cfg.validate();
  if (pred.empty()) fail(Errc::invalid_argument, "delta_avg: no predictions");
  DeltaAccum acc(cfg.delta_thresholds.size());
  acc.add(pred, gt, cfg);
  return acc.splits(cfg.delta_thresholds.size());
}

EvalReport evaluate(const std::map<std::int64_t, std::vector<TrackOutput>>& preds,
                    const std::vector<GroundTruthTrack>& gts, const EvalConfig& cfg) {
  cfg.validate();
  std::map<std::int64_t, const GroundTruthTrack*> gt_by_id;
  for (const auto& gt : gts) {
    if (!gt_by_id.emplace(gt.track_id, &gt).second) {
      fail(Errc::invalid_argument, "duplicate gt track id " + std::to_string(gt.track_id));
    }
  }

  EvalReport report;
  for (const auto& gt : gts) {
    if (preds.find(gt.track_id) == preds.end()) report.missing_pred_tracks.push_back(gt.track_id);
  }
  for (const auto& [id, pred] : preds) {
    (void)pred;
    if (gt_by_id.find(id) == gt_by_id.end()) report.missing_gt_tracks.push_back(id);
  }
  std::sort(report.missing_pred_tracks.begin(), report.missing_pred_tracks.end());

  DeltaAccum pooled(cfg.delta_thresholds.size());
  std::vector<double> fas;
  for (const auto& [id, pred] : preds) {
    auto it = gt_by_id.find(id);
    if (it == gt_by_id.end()) continue;
    const auto& gt = *it->second;
    TrackEval te;
    te.track_id = id;
    te.fa = feature_age(pred, gt, cfg);
    te.delta = delta_avg(pred, gt, cfg);
    pooled.add(pred, gt, cfg);
    fas.push_back(te.fa);
    report.per_track.push_back(std::move(te));
  }

  if (!fas.empty()) {
    double sum = 0.0;
    for (double fa : fas) sum += fa;
    report.fa_mean = sum / static_cast<double>(fas.size());
    report.expected_fa = expected_feature_age(fas, cfg);
  }
  auto agg = pooled.splits(cfg.delta_thresholds.size());
  report.delta_vis = agg.vis;
  report.delta_occ = agg.occ;
  report.delta_all = agg.all;
  report.n_vis = agg.n_vis;
  report.n_occ = agg.n_occ;
  report.n_excluded = agg.n_excluded;
  return report;
}

}  // namespace fusetrack
