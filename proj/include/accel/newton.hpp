#ifndef ACCEL_NEWTON_HPP
#define ACCEL_NEWTON_HPP

#include "accel/trace.hpp"
#include "accel/types.hpp"

namespace accel {

/// Rank-one type-I secant update: J' = J + (df - J dx) dx^T / (dx^T dx).
/// Afterwards J' dx = df and J' q = J q for q orthogonal to dx.
Matrix broyden1_update(const Matrix& J, const Vector& dx, const Vector& df);

/// Rank-one type-II (inverse) update: G' = G + (dx - G df) df^T / (df^T df).
Matrix broyden2_update(const Matrix& G, const Vector& dx, const Vector& df);

/// Block inverse-Jacobian update G = -beta I + (X + beta F)(F^T F)^{-1} F^T.
/// Satisfies G F = X and G q = -beta q for q orthogonal to range(F), and is
/// Frobenius-minimal among updates of -beta I with that block secant.
struct MultisecantOperator {
  Matrix X;
  Matrix F;
  double beta = 1.0;
  Matrix solveFtF;  // (F^T F)^{-1}, cached

  Vector apply(const Vector& q) const;
  Matrix to_dense() const;
};

MultisecantOperator multisecant_update(const Matrix& X, const Matrix& F,
                                       double beta);

/// Directional finite difference (f(x + eps p) - f(x)) / eps with the cached
/// value fx = f(x). eps <= 0 selects sqrt(unit roundoff)(1 + ||x||)/||p||.
Vector frechet_apply(const CountedMap& f, const Vector& x, const Vector& fx,
                     const Vector& p, double eps = 0.0);

/// Forcing-term schedule for the inexact outer iteration: the inner solve
/// tolerance tracks |previous nonlinear reduction - previous linear
/// residual|, capped at eta_max and safeguarded against premature decrease.
struct ForcingSchedule {
  double eta0 = 0.5;
  double eta_max = 0.9;
};

struct NewtonConfig {
  int inner_window = 0;       // <= 0: full window
  long inner_max_matvecs = 200;
  ForcingSchedule forcing;
};

/// Outer Newton loop with a truncated-GCR inner solve of J(x) delta = -f(x)
/// (Jacobian action by directional differences) to the current forcing
/// tolerance. Events record the forcing value and inner stagnation.
ConvergenceTrace inexact_newton_solve(const CountedMap& f, const Vector& x0,
                                      const NewtonConfig& cfg,
                                      const StoppingRule& stop);

}  // namespace accel

#endif  // ACCEL_NEWTON_HPP
