#pragma once

#include "fusetrack/types.hpp"

namespace fusetrack {

// Per-source bounds for the visibility-to-variance remap.
struct NoiseMap {
  double sigma2_min = 0.25;
  double sigma2_max = 64.0;

  void validate() const;
};

// sigma^2(p_vis) = sigma2_min + (sigma2_max - sigma2_min) * (1 - p_vis)^2.
// Fully visible measurements get the floor variance, fully occluded ones the
// ceiling, and the parabola keeps the transition flat near p_vis = 1.
double remap_variance(double p_vis, const NoiseMap& map);

// Isotropic measurement covariance sigma^2(p_vis) * I2.
Mat2 remap(const VisibilityReport& report, const NoiseMap& map);

}  // namespace fusetrack
