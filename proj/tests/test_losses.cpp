#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fusetrack/losses.hpp"
#include "fusetrack/rng.hpp"

using namespace fusetrack;

namespace {

VisibilityReport vis(double p) { return VisibilityReport{1.0 - p, p}; }

StateEstimate random_pred_state(Rng& rng) {
  StateEstimate s;
  s.x = Vec4(rng.uniform(-30, 30), rng.uniform(-30, 30), rng.uniform(-5, 5), rng.uniform(-5, 5));
  Mat4 a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = rng.uniform(-1, 1);
  s.P = a * a.transpose() + 0.5 * Mat4::Identity();
  return s;
}

LossStep random_step(Rng& rng) {
  LossStep step;
  step.state_pred = random_pred_state(rng);
  step.prev_pos = step.state_pred.x.head<2>() + Vec2(rng.uniform(-2, 2), rng.uniform(-2, 2));
  step.z = step.state_pred.x.head<2>() + Vec2(rng.uniform(-3, 3), rng.uniform(-3, 3));
  const double p = rng.uniform(0.05, 0.95);
  step.report = vis(p);
  step.map = NoiseMap{0.25, 64.0};
  step.dp_gt = Vec2(rng.uniform(-4, 4), rng.uniform(-4, 4));
  step.visible_gt = rng.bernoulli(0.5);
  return step;
}

}  // namespace

TEST_CASE("displacement loss is a plain gated L1") {
  DisplacementLossSpec spec{15.0};
  CHECK(displacement_loss(Vec2(1, 1), Vec2(0, 0), spec) == 2.0);
  CHECK(displacement_loss(Vec2(3, -4), Vec2(3, -4), spec) == 0.0);
}

TEST_CASE("the gate is a strict inequality") {
  DisplacementLossSpec spec{15.0};
  // |dp_gt|_1 exactly at the radius: contributes nothing.
  CHECK(displacement_loss(Vec2(100, 100), Vec2(10, 5), spec) == 0.0);
  // Just inside: contributes fully.
  CHECK(displacement_loss(Vec2(0, 0), Vec2(10, 4.9), spec) == doctest::Approx(14.9));
  // Beyond: nothing.
  CHECK(displacement_loss(Vec2(0, 0), Vec2(20, 20), spec) == 0.0);
}

TEST_CASE("cross-entropy values") {
  CHECK(uncertainty_loss(vis(0.5), true) == doctest::Approx(0.6931471805599453).epsilon(1e-15));
  CHECK(uncertainty_loss(vis(0.5), false) == doctest::Approx(0.6931471805599453).epsilon(1e-15));
  CHECK(uncertainty_loss(vis(1.0), true) == 0.0);
  CHECK(uncertainty_loss(vis(0.9), false) == doctest::Approx(2.302585092994046).epsilon(1e-15));
}

TEST_CASE("zero probabilities are clamped before the log") {
  const double worst = uncertainty_loss(vis(0.0), true);
  CHECK(worst == doctest::Approx(-std::log(1e-12)).epsilon(1e-12));
  CHECK(std::isfinite(worst));
}

TEST_CASE("combined loss is the exact weighted sum") {
  DisplacementLossSpec d{15.0};
  UncertaintyLossSpec u{2.0};
  CHECK(event_loss(Vec2(0, 0), Vec2(0, 0), vis(1.0), true, d, u) == 0.0);
  // 2 + 2*ln 2.
  CHECK(event_loss(Vec2(1, 1), Vec2(0, 0), vis(0.5), true, d, u) ==
        doctest::Approx(3.3862943611198906).epsilon(1e-15));
  // Gate closed: only the weighted cross-entropy remains.
  CHECK(event_loss(Vec2(7, 7), Vec2(20, 20), vis(0.5), true, d, u) ==
        doctest::Approx(2.0 * 0.6931471805599453).epsilon(1e-15));

  Rng rng(3);
  for (int k = 0; k < 200; ++k) {
    const Vec2 dp_hat(rng.uniform(-10, 10), rng.uniform(-10, 10));
    const Vec2 dp_gt(rng.uniform(-20, 20), rng.uniform(-20, 20));
    const auto report = vis(rng.uniform(0.01, 0.99));
    const bool v = rng.bernoulli(0.5);
    const double combined = event_loss(dp_hat, dp_gt, report, v, d, u);
    const double parts = displacement_loss(dp_hat, dp_gt, d) + u.w1 * uncertainty_loss(report, v);
    CHECK(combined == parts);
  }
}

TEST_CASE("state sensitivity to the measurement is the Kalman gain") {
  Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    const auto s = random_pred_state(rng);
    Observation obs;
    obs.z = s.x.head<2>() + Vec2(rng.uniform(-3, 3), rng.uniform(-3, 3));
    obs.R = remap(vis(rng.uniform(0.05, 0.95)), NoiseMap{0.25, 64.0});
    const auto jac = kalman_jacobians(s, obs);
    const auto [post, mid] = update(s, obs);
    CHECK(jac.dx_dz == mid.K);
  }
}

TEST_CASE("infinite noise kills both sensitivities") {
  Rng rng(9);
  const auto s = random_pred_state(rng);
  Observation obs;
  obs.z = s.x.head<2>() + Vec2(2, -1);
  obs.R = 1e12 * Mat2::Identity();
  const auto jac = kalman_jacobians(s, obs);
  CHECK(jac.dx_dz.cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(jac.dx_dRdiag.cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("jacobians match central finite differences") {
  Rng rng(2024);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto s = random_pred_state(rng);
    Observation obs;
    obs.z = s.x.head<2>() + Vec2(rng.uniform(-3, 3), rng.uniform(-3, 3));
    obs.R = remap(vis(rng.uniform(0.1, 0.9)), NoiseMap{0.25, 64.0});
    const auto jac = kalman_jacobians(s, obs);

    const double h = 1e-5;
    for (int c = 0; c < 2; ++c) {
      Observation hi = obs, lo = obs;
      hi.z(c) += h;
      lo.z(c) -= h;
      const Vec4 fd = (update(s, hi).first.x - update(s, lo).first.x) / (2 * h);
      for (int r = 0; r < 4; ++r) {
        const double scale = std::max(1.0, std::abs(fd(r)));
        worst = std::max(worst, std::abs(jac.dx_dz(r, c) - fd(r)) / scale);
      }

      hi = obs;
      lo = obs;
      hi.R(c, c) += h;
      lo.R(c, c) -= h;
      const Vec4 fdr = (update(s, hi).first.x - update(s, lo).first.x) / (2 * h);
      for (int r = 0; r < 4; ++r) {
        const double scale = std::max(1.0, std::abs(fdr(r)));
        worst = std::max(worst, std::abs(jac.dx_dRdiag(r, c) - fdr(r)) / scale);
      }
    }
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("closed gate zeroes the measurement gradient of the loss") {
  Rng rng(77);
  LossStep step = random_step(rng);
  step.dp_gt = Vec2(30, 30);  // far outside the gate
  const auto rep = loss_gradients(step, DisplacementLossSpec{15.0}, UncertaintyLossSpec{2.0});
  CHECK(rep.analytic(0) == 0.0);
  CHECK(rep.analytic(1) == 0.0);
}

TEST_CASE("chained loss gradients match finite differences away from kinks") {
  Rng rng(123);
  DisplacementLossSpec d{15.0};
  UncertaintyLossSpec u{2.0};
  double worst = 0.0;
  int used = 0;
  for (int k = 0; k < 200; ++k) {
    const auto step = random_step(rng);
    const auto rep = loss_gradients(step, d, u);
    if (rep.kink) continue;
    ++used;
    worst = std::max(worst, rep.max_rel_err);
  }
  CHECK(used > 150);
  CHECK(worst < 1e-4);
}

TEST_CASE("loss decreases along the negative gradient") {
  Rng rng(456);
  DisplacementLossSpec d{15.0};
  UncertaintyLossSpec u{2.0};
  int checked = 0;
  for (int k = 0; k < 50 && checked < 30; ++k) {
    const auto step = random_step(rng);
    const auto rep = loss_gradients(step, d, u);
    if (rep.kink || rep.analytic.norm() < 1e-6) continue;
    const double p0 = step.report.p_vis;
    const double base = event_loss_at(step, step.z, p0, d, u);
    const double alpha = 1e-6 / rep.analytic.norm();
    const Vec2 z2 = step.z - alpha * rep.analytic.head<2>();
    double p2 = p0 - alpha * rep.analytic(2);
    if (p2 <= 0.0 || p2 >= 1.0) continue;
    const double moved = event_loss_at(step, z2, p2, d, u);
    CHECK(moved < base + 1e-15);
    ++checked;
  }
  CHECK(checked >= 30);
}

TEST_CASE("gradient pushes visibility down for a wild measurement") {
  // The reported position is far off while the true displacement is small, so
  // trusting the measurement more can only hurt. The loss gradient in p_vis
  // must be positive (step toward lower visibility = downweighting).
  LossStep step;
  step.state_pred.x = Vec4(0, 0, 0, 0);
  step.state_pred.P = Mat4::Identity();
  step.prev_pos = Vec2(0, 0);
  step.z = Vec2(40, 3);
  step.report = vis(0.6);
  step.map = NoiseMap{0.25, 64.0};
  step.dp_gt = Vec2(0.5, 0.3);
  step.visible_gt = false;
  const auto rep = loss_gradients(step, DisplacementLossSpec{15.0}, UncertaintyLossSpec{2.0});
  REQUIRE(!rep.kink);
  CHECK(rep.analytic(2) > 0.0);
  CHECK(rep.numeric(2) > 0.0);
}
