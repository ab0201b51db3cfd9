#ifndef ACCEL_LINEAR_HPP
#define ACCEL_LINEAR_HPP

#include <utility>
#include <vector>

#include "accel/trace.hpp"
#include "accel/types.hpp"

namespace accel {

/// Matrix-free linear map. Tests probe linearity; it is not enforced here.
struct LinearOperator {
  std::function<Vector(const Vector&)> apply;
  int n = 0;

  Vector operator()(const Vector& x) const { return apply(x); }

  static LinearOperator dense(Matrix A);
  static LinearOperator diagonal(Vector d);
};

/// x_{j+1} = x_j + gamma_j r_j. The schedule is cycled; a single entry gives
/// the stationary iteration.
ConvergenceTrace richardson_solve(const LinearOperator& A, const Vector& b,
                                  const Vector& x0,
                                  const std::vector<double>& gamma_schedule,
                                  const StoppingRule& stop);

/// Single residual-norm-minimizing step: gamma = (r,Ar)/(Ar,Ar).
Vector mr_step(const LinearOperator& A, const Vector& b, const Vector& x);

/// Single steepest-descent step for SPD A: gamma = (r,r)/(Ar,r).
Vector sd_step(const LinearOperator& A, const Vector& b, const Vector& x);

/// Polynomial acceleration over a caller-supplied spectral bracket
/// [alpha, beta_ev]; no inner products. alpha == beta_ev degenerates to the
/// exact one-step solve x0 + r0/theta.
ConvergenceTrace chebyshev_solve(const LinearOperator& A, const Vector& b,
                                 const Vector& x0, double alpha,
                                 double beta_ev, const StoppingRule& stop);

/// Same recurrence with the ratio frozen at its limit
/// rho = theta/delta - sqrt((theta/delta)^2 - 1); identical to heavy_ball
/// with eta = rho^2, nu = 2 rho / delta.
ConvergenceTrace stationary_chebyshev_solve(const LinearOperator& A,
                                            const Vector& b, const Vector& x0,
                                            double alpha, double beta_ev,
                                            const StoppingRule& stop);

struct MomentumParams {
  double eta = 0.0;  // momentum coefficient
  double nu = 1.0;   // step size
};

/// w_j = eta w_{j-1} + grad(x_j); x_{j+1} = x_j - nu w_j; w_{-1} = 0.
ConvergenceTrace heavy_ball(const CountedMap& grad, const Vector& x0,
                            const MomentumParams& params,
                            const StoppingRule& stop);

/// x_{j+1} = x_j + eta dx_{j-1} - nu grad(x_j + eta dx_{j-1}).
ConvergenceTrace nesterov(const CountedMap& grad, const Vector& x0,
                          const MomentumParams& params,
                          const StoppingRule& stop);

/// Smaller root of eta^2 - 2(2/theta2 - 1) eta + 1 = 0; the roots multiply
/// to 1, so the result is <= 1. Throws NoRealRoot for theta2 > 1.
double nesterov_tuning(double theta2);

/// Moduli of the two iteration-matrix eigenvalues mu_j +- sqrt(mu_j^2 - eta)
/// per spectrum point; a complex pair collapses to modulus sqrt(eta).
std::vector<std::pair<double, double>> momentum_spectrum(
    const std::vector<double>& mu, double eta);

/// Conjugate gradients for SPD A; throws Breakdown when (Ap,p) <= 0.
ConvergenceTrace cg_solve(const LinearOperator& A, const Vector& b,
                          const Vector& x0, const StoppingRule& stop);

/// Coupled direction bases with V orthonormal; a ring buffer when capacity
/// is positive, unbounded otherwise.
struct PairedDirections {
  std::vector<Vector> P;
  std::vector<Vector> V;
  int capacity = 0;  // <= 0: unbounded

  int live() const { return static_cast<int>(V.size()); }
  void push(Vector p, Vector v) {
    if (capacity > 0 && live() >= capacity) {
      P.erase(P.begin());
      V.erase(V.begin());
    }
    P.push_back(std::move(p));
    V.push_back(std::move(v));
  }
  void clear() {
    P.clear();
    V.clear();
  }
};

/// Truncated generalized conjugate residual with window m (m <= 0 for the
/// full-window, minimal-residual case). One update per step:
/// x += <r,v_j> p_j with the newest pair, new pair orthonormalized against
/// the live window by modified Gram-Schmidt. Optionally logs every iterate.
std::pair<ConvergenceTrace, PairedDirections> tgcr_solve(
    const LinearOperator& A, const Vector& b, const Vector& x0, int m,
    const StoppingRule& stop, std::vector<Vector>* iterate_log = nullptr);

}  // namespace accel

#endif  // ACCEL_LINEAR_HPP
