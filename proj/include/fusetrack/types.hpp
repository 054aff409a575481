#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "fusetrack/error.hpp"

namespace fusetrack {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Mat42 = Eigen::Matrix<double, 4, 2>;

enum class Source { event, frame };
enum class MeasKind { absolute, relative };

const char* source_name(Source s);
const char* kind_name(MeasKind k);
Source source_from_name(const std::string& s);
MeasKind kind_from_name(const std::string& s);

// Complementary visibility probabilities as reported by a source.
// p_occ + p_vis must stay within 1e-9 of 1.
struct VisibilityReport {
  double p_occ = 0.0;
  double p_vis = 1.0;

  void validate() const;
};

struct SourcedMeasurement {
  double t = 0.0;
  std::int64_t track_id = 0;
  Source source = Source::frame;
  MeasKind kind = MeasKind::absolute;
  Vec2 z_raw = Vec2::Zero();  // absolute position, or a displacement when kind == relative
  VisibilityReport report;
};

struct TrackOutput {
  double t = 0.0;
  Vec2 pos = Vec2::Zero();
  Mat2 cov_pos = Mat2::Identity();
  double p_vis_used = 1.0;
};

struct GroundTruthSample {
  double t = 0.0;
  Vec2 pos = Vec2::Zero();
  bool visible = true;
};

struct GroundTruthTrack {
  std::int64_t track_id = 0;
  std::vector<GroundTruthSample> samples;
};

}  // namespace fusetrack
