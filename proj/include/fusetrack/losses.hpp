#pragma once

#include "fusetrack/kalman.hpp"
#include "fusetrack/uncertainty.hpp"

namespace fusetrack {

struct DisplacementLossSpec {
  double gate_radius = 15.0;  // L1 gate on the ground-truth displacement
};

struct UncertaintyLossSpec {
  double w1 = 2.0;  // weight of the visibility term in the combined loss
};

// Gated L1: |dp_hat - dp_gt|_1 when |dp_gt|_1 < gate_radius (strictly),
// otherwise 0. The gate depends only on ground truth, so it is constant
// under perturbations of the estimate.
double displacement_loss(const Vec2& dp_hat, const Vec2& dp_gt, const DisplacementLossSpec& spec);

// Cross-entropy on the reported visibility: -ln p_vis when the target is
// visible, -ln p_occ when occluded, with the probability clamped at 1e-12.
double uncertainty_loss(const VisibilityReport& report, bool visible);

// displacement_loss + w1 * uncertainty_loss.
double event_loss(const Vec2& dp_hat, const Vec2& dp_gt, const VisibilityReport& report,
                  bool visible, const DisplacementLossSpec& dspec, const UncertaintyLossSpec& uspec);

// Sensitivities of the posterior state to the update inputs:
//   d x_post / d z     = K                       (columns of dx_dz)
//   d x_post / d R_ii  = -P H^T S^-1 E_ii S^-1 y (column i of dx_dRdiag)
// Everything is evaluated at the given pre-update state and observation.
struct KalmanJacobians {
  Mat42 dx_dz = Mat42::Zero();
  Mat42 dx_dRdiag = Mat42::Zero();
};

KalmanJacobians kalman_jacobians(const StateEstimate& s, const Observation& obs);

// One differentiable tracking step: a pre-update state, a measurement with
// its visibility report, and the loss targets. The estimated displacement is
// dp_hat = H x_post - prev_pos.
struct LossStep {
  StateEstimate state_pred;
  Vec2 prev_pos = Vec2::Zero();
  Vec2 z = Vec2::Zero();
  VisibilityReport report;
  NoiseMap map;
  Vec2 dp_gt = Vec2::Zero();
  bool visible_gt = true;
};

double event_loss_at(const LossStep& step, const Vec2& z, double p_vis,
                     const DisplacementLossSpec& dspec, const UncertaintyLossSpec& uspec);

// Analytic gradient of the combined loss with respect to [z0, z1, p_vis],
// chained through the variance remap and the Kalman update, next to a
// central-difference estimate (step 1e-5). The L1 subgradient at zero is 0;
// `kink` flags steps whose displacement error has a coordinate within 1e-6
// of the kink, where finite differences are meaningless.
struct GradReport {
  Eigen::Vector3d analytic = Eigen::Vector3d::Zero();
  Eigen::Vector3d numeric = Eigen::Vector3d::Zero();
  double max_rel_err = 0.0;
  bool kink = false;
};

GradReport loss_gradients(const LossStep& step, const DisplacementLossSpec& dspec,
                          const UncertaintyLossSpec& uspec);

}  // namespace fusetrack
