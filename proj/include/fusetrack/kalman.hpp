#pragma once

#include <utility>

#include "fusetrack/types.hpp"

namespace fusetrack {

// Constant-velocity filter over x = [px, py, vx, vy] with position-only
// observations z = H x, H = [I2 | 02].

struct StateEstimate {
  Vec4 x = Vec4::Zero();
  Mat4 P = Mat4::Identity();
  double t = 0.0;
};

// Piecewise-white-noise process intensities, per axis.
// q_pos in px^2/s, q_vel in px^2/s^3.
struct ProcessModel {
  double q_pos = 0.0;
  double q_vel = 25.0;
};

struct Observation {
  Vec2 z = Vec2::Zero();
  Mat2 R = Mat2::Identity();
};

// Innovation quantities produced by an update, kept for downstream gradients.
struct UpdateIntermediates {
  Vec2 y = Vec2::Zero();    // z - H x_pred
  Mat2 S = Mat2::Zero();    // H P H^T + R
  Mat2 S_inv = Mat2::Zero();
  Mat42 K = Mat42::Zero();  // P H^T S^-1
};

// Transition matrix: position += velocity * dt.
Mat4 transition(double dt);

// Q(dt) per axis: Q_pp = q_pos*dt + q_vel*dt^3/3, Q_pv = q_vel*dt^2/2,
// Q_vv = q_vel*dt. The two axes are independent and identical.
Mat4 process_noise(double dt, const ProcessModel& pm);

// x <- F x, P <- F P F^T + Q, t <- t + dt. Negative dt is rejected with
// Errc::out_of_order so callers can apply their own late-data policy.
StateEstimate predict(const StateEstimate& s, double dt, const ProcessModel& pm);

// Closed-form inverse of the 2x2 innovation covariance. Fails with
// Errc::singular when |det| < 1e-24 or the eigenvalue ratio exceeds 1e12.
Mat2 invert_innovation(const Mat2& S);

// Measurement update with Joseph-form covariance
//   P <- (I - K H) P (I - K H)^T + K R K^T
// followed by symmetrization P <- (P + P^T)/2.
std::pair<StateEstimate, UpdateIntermediates> update(const StateEstimate& s,
                                                     const Observation& obs);

// predict() then update(); byte-for-byte identical to calling the two steps.
std::pair<StateEstimate, UpdateIntermediates> predict_update(const StateEstimate& s, double dt,
                                                             const ProcessModel& pm,
                                                             const Observation& obs);

}  // namespace fusetrack
