#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fusetrack/uncertainty.hpp"

using namespace fusetrack;

namespace {

VisibilityReport vis(double p) { return VisibilityReport{1.0 - p, p}; }

}  // namespace

TEST_CASE("full visibility hits the variance floor") {
  NoiseMap m{0.25, 64.0};
  const Mat2 r = remap(vis(1.0), m);
  CHECK(r(0, 0) == 0.25);
  CHECK(r(1, 1) == 0.25);
}

TEST_CASE("zero visibility hits the ceiling") {
  NoiseMap m{0.25, 64.0};
  CHECK(remap_variance(0.0, m) == 64.0);
}

TEST_CASE("midpoint value of the parabola") {
  NoiseMap m{0.25, 64.0};
  CHECK(remap_variance(0.5, m) == doctest::Approx(16.1875).epsilon(1e-15));
}

TEST_CASE("strictly decreasing in p_vis") {
  NoiseMap m{0.5, 100.0};
  double prev = remap_variance(0.0, m);
  for (int i = 1; i <= 100; ++i) {
    const double cur = remap_variance(i / 100.0, m);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("output stays inside the configured band") {
  NoiseMap m{0.01, 9.0};
  for (int i = 0; i <= 50; ++i) {
    const double v = remap_variance(i / 50.0, m);
    CHECK(v >= m.sigma2_min);
    CHECK(v <= m.sigma2_max);
  }
}

TEST_CASE("covariance is exactly isotropic") {
  NoiseMap m{0.25, 64.0};
  const Mat2 r = remap(vis(0.37), m);
  CHECK(r(0, 1) == 0.0);
  CHECK(r(1, 0) == 0.0);
  CHECK(r(0, 0) == r(1, 1));
}

TEST_CASE("p_vis outside [0,1] is rejected") {
  NoiseMap m{0.25, 64.0};
  CHECK_THROWS_AS(remap_variance(-0.01, m), Error);
  CHECK_THROWS_AS(remap_variance(1.01, m), Error);
}

TEST_CASE("degenerate noise maps are rejected") {
  CHECK_THROWS_AS((NoiseMap{0.0, 64.0}.validate()), Error);
  CHECK_THROWS_AS((NoiseMap{2.0, 2.0}.validate()), Error);
  CHECK_THROWS_AS((NoiseMap{4.0, 1.0}.validate()), Error);
  CHECK_NOTHROW((NoiseMap{0.25, 64.0}.validate()));
}

TEST_CASE("visibility reports must be a two-point distribution") {
  CHECK_NOTHROW((VisibilityReport{0.3, 0.7}.validate()));
  CHECK_THROWS_AS((VisibilityReport{0.5, 0.6}.validate()), Error);
  CHECK_THROWS_AS((VisibilityReport{-0.1, 1.1}.validate()), Error);
}
