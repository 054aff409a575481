#include "fusetrack/uncertainty.hpp"

#include <cmath>
#include <string>

namespace fusetrack {

void VisibilityReport::validate() const {
  if (!(p_vis >= 0.0 && p_vis <= 1.0) || !(p_occ >= 0.0 && p_occ <= 1.0)) {
    fail(Errc::invalid_argument, "visibility probabilities must lie in [0, 1]");
  }
  if (std::abs(p_occ + p_vis - 1.0) > 1e-9) {
    fail(Errc::invalid_argument,
         "visibility probabilities must sum to 1, got " + std::to_string(p_occ + p_vis));
  }
}

void NoiseMap::validate() const {
  if (!(sigma2_min > 0.0) || !(sigma2_max > sigma2_min)) {
    fail(Errc::invalid_argument, "noise map requires 0 < sigma2_min < sigma2_max");
  }
}

double remap_variance(double p_vis, const NoiseMap& map) {
  map.validate();
  if (!(p_vis >= 0.0 && p_vis <= 1.0)) {
    fail(Errc::invalid_argument, "remap_variance: p_vis outside [0, 1]");
  }
  const double q = 1.0 - p_vis;
  return map.sigma2_min + (map.sigma2_max - map.sigma2_min) * q * q;
}

Mat2 remap(const VisibilityReport& report, const NoiseMap& map) {
  report.validate();
  return remap_variance(report.p_vis, map) * Mat2::Identity();
}

}  // namespace fusetrack
