#pragma once

// Straight-line reference arithmetic for the filter steps, written against
// plain C arrays with explicit index loops. Deliberately shares no code with
// the library; everything is spelled out so a reviewer can check it against
// the textbook formulas by eye.

#include <cstddef>

namespace oracle {

inline void mat4_mul(const double a[4][4], const double b[4][4], double out[4][4]) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += a[i][k] * b[k][j];
      out[i][j] = s;
    }
}

inline void mat4_transpose(const double a[4][4], double out[4][4]) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i][j] = a[j][i];
}

struct State {
  double x[4];
  double P[4][4];
};

// x <- F x, P <- F P F^T + Q with the constant-velocity F and the
// piecewise-white-noise Q (independent identical axes).
inline State predict(const State& in, double dt, double q_pos, double q_vel) {
  double F[4][4] = {{1, 0, dt, 0}, {0, 1, 0, dt}, {0, 0, 1, 0}, {0, 0, 0, 1}};

  State out{};
  for (int i = 0; i < 4; ++i) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += F[i][k] * in.x[k];
    out.x[i] = s;
  }

  double FP[4][4], Ft[4][4], FPFt[4][4];
  mat4_mul(F, in.P, FP);
  mat4_transpose(F, Ft);
  mat4_mul(FP, Ft, FPFt);

  const double q_pp = q_pos * dt + q_vel * dt * dt * dt / 3.0;
  const double q_pv = q_vel * dt * dt / 2.0;
  const double q_vv = q_vel * dt;
  double Q[4][4] = {{q_pp, 0, q_pv, 0}, {0, q_pp, 0, q_pv}, {q_pv, 0, q_vv, 0}, {0, q_pv, 0, q_vv}};

  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.P[i][j] = FPFt[i][j] + Q[i][j];
  return out;
}

// Position-only update, H = [I2 | 02], with the Joseph-form covariance.
// Returns false when S is numerically singular.
inline bool update(const State& in, const double z[2], const double R[2][2], State& out,
                   double K_out[4][2]) {
  const double y[2] = {z[0] - in.x[0], z[1] - in.x[1]};
  const double S[2][2] = {{in.P[0][0] + R[0][0], in.P[0][1] + R[0][1]},
                          {in.P[1][0] + R[1][0], in.P[1][1] + R[1][1]}};
  const double det = S[0][0] * S[1][1] - S[0][1] * S[1][0];
  if (det < 1e-300 && det > -1e-300) return false;
  const double Si[2][2] = {{S[1][1] / det, -S[0][1] / det}, {-S[1][0] / det, S[0][0] / det}};

  // K = P H^T S^-1; P H^T is just the first two columns of P.
  double K[4][2];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) K[i][j] = in.P[i][0] * Si[0][j] + in.P[i][1] * Si[1][j];

  for (int i = 0; i < 4; ++i) out.x[i] = in.x[i] + K[i][0] * y[0] + K[i][1] * y[1];

  // A = I - K H: subtracting K from the first two columns of the identity.
  double A[4][4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
  for (int i = 0; i < 4; ++i) {
    A[i][0] -= K[i][0];
    A[i][1] -= K[i][1];
  }

  double AP[4][4], At[4][4], APAt[4][4];
  mat4_mul(A, in.P, AP);
  mat4_transpose(A, At);
  mat4_mul(AP, At, APAt);

  // K R K^T, expanded through the 2x2 R.
  double KR[4][2];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) KR[i][j] = K[i][0] * R[0][j] + K[i][1] * R[1][j];
  double KRKt[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) KRKt[i][j] = KR[i][0] * K[j][0] + KR[i][1] * K[j][1];

  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.P[i][j] = APAt[i][j] + KRKt[i][j];
  // Match the library's final symmetrization.
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      const double m = 0.5 * (out.P[i][j] + out.P[j][i]);
      out.P[i][j] = m;
      out.P[j][i] = m;
    }

  if (K_out != nullptr)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 2; ++j) K_out[i][j] = K[i][j];
  return true;
}

}  // namespace oracle
