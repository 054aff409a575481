#include "fusetrack/kalman.hpp"

#include <cmath>

namespace fusetrack {

Mat4 transition(double dt) {
  Mat4 F = Mat4::Identity();
  F(0, 2) = dt;
  F(1, 3) = dt;
  return F;
}

Mat4 process_noise(double dt, const ProcessModel& pm) {
  if (pm.q_pos < 0.0 || pm.q_vel < 0.0) {
    fail(Errc::invalid_argument, "process noise intensities must be nonnegative");
  }
  const double q_pp = pm.q_pos * dt + pm.q_vel * dt * dt * dt / 3.0;
  const double q_pv = pm.q_vel * dt * dt / 2.0;
  const double q_vv = pm.q_vel * dt;
  Mat4 Q = Mat4::Zero();
  for (int axis = 0; axis < 2; ++axis) {
    Q(axis, axis) = q_pp;
    Q(axis, axis + 2) = q_pv;
    Q(axis + 2, axis) = q_pv;
    Q(axis + 2, axis + 2) = q_vv;
  }
  return Q;
}

StateEstimate predict(const StateEstimate& s, double dt, const ProcessModel& pm) {
  if (!std::isfinite(dt)) fail(Errc::invalid_argument, "predict: dt must be finite");
  if (dt < 0.0) fail(Errc::out_of_order, "predict: negative dt");
  const Mat4 F = transition(dt);
  StateEstimate out;
  out.x = F * s.x;
  out.P = F * s.P * F.transpose() + process_noise(dt, pm);
  out.P = 0.5 * (out.P + out.P.transpose()).eval();
  out.t = s.t + dt;
  return out;
}

Mat2 invert_innovation(const Mat2& S) {
  const double a = S(0, 0);
  const double b = S(0, 1);
  const double c = S(1, 1);
  const double det = a * c - b * S(1, 0);
  if (!std::isfinite(det) || std::abs(det) < 1e-24) {
    fail(Errc::singular, "innovation covariance is singular");
  }
  // Eigenvalues of the symmetric part, for the conditioning guard.
  const double mean = 0.5 * (a + c);
  const double disc = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  const double lo = mean - disc;
  const double hi = mean + disc;
  if (!(lo > 0.0) || hi > 1e12 * lo) {
    fail(Errc::singular, "innovation covariance is ill-conditioned");
  }
  Mat2 inv;
  inv << c, -b, -S(1, 0), a;
  return inv / det;
}

std::pair<StateEstimate, UpdateIntermediates> update(const StateEstimate& s,
                                                     const Observation& obs) {
  UpdateIntermediates mid;
  mid.y = obs.z - s.x.head<2>();
  Mat2 S = s.P.topLeftCorner<2, 2>() + obs.R;
  S = 0.5 * (S + S.transpose()).eval();
  mid.S = S;
  mid.S_inv = invert_innovation(S);
  mid.K = s.P.leftCols<2>() * mid.S_inv;  // P H^T S^-1

  StateEstimate out;
  out.t = s.t;
  out.x = s.x + mid.K * mid.y;

  Mat4 A = Mat4::Identity();  // I - K H
  A.leftCols<2>() -= mid.K;
  out.P = A * s.P * A.transpose() + mid.K * obs.R * mid.K.transpose();
  out.P = 0.5 * (out.P + out.P.transpose()).eval();
  return {out, mid};
}

std::pair<StateEstimate, UpdateIntermediates> predict_update(const StateEstimate& s, double dt,
                                                             const ProcessModel& pm,
                                                             const Observation& obs) {
  return update(predict(s, dt, pm), obs);
}

}  // namespace fusetrack
