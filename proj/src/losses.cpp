#include "fusetrack/losses.hpp"

#include <algorithm>
#include <cmath>

namespace fusetrack {

namespace {
constexpr double kProbClamp = 1e-12;
constexpr double kKinkEps = 1e-6;
constexpr double kFdStep = 1e-5;

double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }
}  // namespace

double displacement_loss(const Vec2& dp_hat, const Vec2& dp_gt, const DisplacementLossSpec& spec) {
  if (!(spec.gate_radius > 0.0)) fail(Errc::invalid_argument, "gate_radius must be positive");
  if (dp_gt.lpNorm<1>() >= spec.gate_radius) return 0.0;
  return (dp_hat - dp_gt).lpNorm<1>();
}

double uncertainty_loss(const VisibilityReport& report, bool visible) {
  report.validate();
  const double p = visible ? report.p_vis : report.p_occ;
  return -std::log(std::max(p, kProbClamp));
}

double event_loss(const Vec2& dp_hat, const Vec2& dp_gt, const VisibilityReport& report,
                  bool visible, const DisplacementLossSpec& dspec,
                  const UncertaintyLossSpec& uspec) {
  return displacement_loss(dp_hat, dp_gt, dspec) + uspec.w1 * uncertainty_loss(report, visible);
}

KalmanJacobians kalman_jacobians(const StateEstimate& s, const Observation& obs) {
  const auto mid = update(s, obs).second;
  KalmanJacobians jac;
  jac.dx_dz = mid.K;
  const Vec2 u = mid.S_inv * mid.y;
  jac.dx_dRdiag.col(0) = -u(0) * mid.K.col(0);
  jac.dx_dRdiag.col(1) = -u(1) * mid.K.col(1);
  return jac;
}

double event_loss_at(const LossStep& step, const Vec2& z, double p_vis,
                     const DisplacementLossSpec& dspec, const UncertaintyLossSpec& uspec) {
  VisibilityReport report;
  report.p_vis = p_vis;
  report.p_occ = 1.0 - p_vis;
  Observation obs;
  obs.z = z;
  obs.R = remap(report, step.map);
  const auto post = update(step.state_pred, obs).first;
  const Vec2 dp_hat = post.x.head<2>() - step.prev_pos;
  return event_loss(dp_hat, step.dp_gt, report, step.visible_gt, dspec, uspec);
}

GradReport loss_gradients(const LossStep& step, const DisplacementLossSpec& dspec,
                          const UncertaintyLossSpec& uspec) {
  step.report.validate();
  const double p_vis = step.report.p_vis;

  Observation obs;
  obs.z = step.z;
  obs.R = remap(step.report, step.map);
  const auto [post, mid] = update(step.state_pred, obs);
  const Vec2 dp_hat = post.x.head<2>() - step.prev_pos;
  const Vec2 e = dp_hat - step.dp_gt;
  const bool gate_open = step.dp_gt.lpNorm<1>() < dspec.gate_radius;

  GradReport rep;
  rep.kink = gate_open && (std::abs(e.x()) < kKinkEps || std::abs(e.y()) < kKinkEps);

  const Mat2 HK = mid.K.topRows<2>();
  const Vec2 s(sign0(e.x()), sign0(e.y()));

  Vec2 dL_dz = Vec2::Zero();
  double dLdisp_dp = 0.0;
  if (gate_open) {
    dL_dz = HK.transpose() * s;
    const Vec2 u = mid.S_inv * mid.y;
    const Vec2 ddp_dsigma2 = -(HK * u);  // sum over both diagonal entries of R
    const double dsigma2_dp =
        -2.0 * (step.map.sigma2_max - step.map.sigma2_min) * (1.0 - p_vis);
    dLdisp_dp = s.dot(ddp_dsigma2) * dsigma2_dp;
  }

  double dce_dp = 0.0;
  if (step.visible_gt) {
    if (step.report.p_vis > kProbClamp) dce_dp = -1.0 / step.report.p_vis;
  } else {
    if (step.report.p_occ > kProbClamp) dce_dp = 1.0 / step.report.p_occ;
  }

  rep.analytic << dL_dz.x(), dL_dz.y(), dLdisp_dp + uspec.w1 * dce_dp;

  for (int i = 0; i < 2; ++i) {
    Vec2 zp = step.z, zm = step.z;
    zp(i) += kFdStep;
    zm(i) -= kFdStep;
    rep.numeric(i) = (event_loss_at(step, zp, p_vis, dspec, uspec) -
                      event_loss_at(step, zm, p_vis, dspec, uspec)) /
                     (2.0 * kFdStep);
  }
  const double p_hi = std::min(1.0, p_vis + kFdStep);
  const double p_lo = std::max(0.0, p_vis - kFdStep);
  rep.numeric(2) = (event_loss_at(step, step.z, p_hi, dspec, uspec) -
                    event_loss_at(step, step.z, p_lo, dspec, uspec)) /
                   (p_hi - p_lo);

  for (int i = 0; i < 3; ++i) {
    const double a = rep.analytic(i);
    const double n = rep.numeric(i);
    const double rel = std::abs(a - n) / std::max({1.0, std::abs(a), std::abs(n)});
    rep.max_rel_err = std::max(rep.max_rel_err, rel);
  }
  return rep;
}

}  // namespace fusetrack
