#include "accel/newton.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "accel/linear.hpp"

namespace accel {

Matrix broyden1_update(const Matrix& J, const Vector& dx, const Vector& df) {
  const double d = dx.squaredNorm();
  if (d <= 0.0) throw DegenerateDenominator("broyden1: zero step");
  return J + ((df - J * dx) / d) * dx.transpose();
}

Matrix broyden2_update(const Matrix& G, const Vector& dx, const Vector& df) {
  const double d = df.squaredNorm();
  if (d <= 0.0)
    throw DegenerateDenominator("broyden2: zero residual difference");
  return G + ((dx - G * df) / d) * df.transpose();
}

Vector MultisecantOperator::apply(const Vector& q) const {
  return -beta * q + (X + beta * F) * (solveFtF * (F.transpose() * q));
}

Matrix MultisecantOperator::to_dense() const {
  const int n = static_cast<int>(F.rows());
  return -beta * Matrix::Identity(n, n) +
         (X + beta * F) * solveFtF * F.transpose();
}

MultisecantOperator multisecant_update(const Matrix& X, const Matrix& F,
                                       double beta) {
  const Matrix N = F.transpose() * F;
  Eigen::FullPivLU<Matrix> lu(N);
  if (!lu.isInvertible())
    throw RankDeficient("multisecant: F^T F is singular");
  return {X, F, beta, lu.inverse()};
}

Vector frechet_apply(const CountedMap& f, const Vector& x, const Vector& fx,
                     const Vector& p, double eps) {
  const double pnorm = p.norm();
  if (pnorm == 0.0) throw ZeroDirection("frechet: zero direction");
  if (eps <= 0.0) {
    eps = std::sqrt(std::numeric_limits<double>::epsilon()) *
          (1.0 + x.norm()) / pnorm;
  }
  return (f(x + eps * p) - fx) / eps;
}

ConvergenceTrace inexact_newton_solve(const CountedMap& f, const Vector& x0,
                                      const NewtonConfig& cfg,
                                      const StoppingRule& stop) {
  ConvergenceTrace trace;
  const long feval_base = f.count();
  Vector x = x0;
  Vector fx = f(x);
  const double res0 = fx.norm();
  long j = 0;
  trace.add(j, f.count() - feval_base, res0);
  if (res0 <= 0.0) {
    trace.converged = true;
    return trace;
  }

  double eta = cfg.forcing.eta0;
  double prev_resnorm = res0;
  double prev_lin_res = 0.0;
  constexpr double kSafeguardPower = 1.618033988749895;  // (1 + sqrt(5)) / 2

  while (f.count() - feval_base < stop.max_fevals) {
    if (j > 0) {
      const double candidate =
          std::abs(fx.norm() - prev_lin_res) / prev_resnorm;
      const double safeguard = std::pow(eta, kSafeguardPower);
      double next = std::min(cfg.forcing.eta_max, candidate);
      if (safeguard > 0.1) next = std::max(next, safeguard);
      eta = std::min(cfg.forcing.eta_max, std::max(next, 1e-10));
      prev_resnorm = fx.norm();
    }

    // Inner minimal-residual solve of J delta = -fx around the current x.
    LinearOperator J{
        [&](const Vector& p) -> Vector {
          // The inner solve starts from a zero correction; a linear map
          // sends zero to zero without needing a difference quotient.
          if (p.norm() == 0.0) return Vector::Zero(p.size());
          return frechet_apply(f, x, fx, p);
        },
        static_cast<int>(x.size())};
    StoppingRule inner_stop{eta, cfg.inner_max_matvecs};
    std::vector<Vector> inner_iterates;
    Vector delta = Vector::Zero(x.size());
    double lin_res = fx.norm();
    char eta_buf[32];
    std::snprintf(eta_buf, sizeof(eta_buf), "eta=%.6g", eta);
    std::string event = eta_buf;
    try {
      auto [inner_trace, dirs] = tgcr_solve(J, -fx, delta, cfg.inner_window,
                                            inner_stop, &inner_iterates);
      delta = inner_iterates.back();
      lin_res = inner_trace.final_resnorm();
      if (!inner_trace.converged) event += ";inner-stagnation";
    } catch (const Breakdown&) {
      if (!inner_iterates.empty()) delta = inner_iterates.back();
      event += ";inner-breakdown";
    }

    x += delta;
    fx = f(x);
    prev_lin_res = lin_res;
    const double resnorm = fx.norm();
    trace.add(++j, f.count() - feval_base, resnorm, 0.0, event);
    if (resnorm <= stop.tol * res0) {
      trace.converged = true;
      break;
    }
    if (resnorm >= 1e6 * res0) {
      trace.diverged = true;
      break;
    }
  }
  return trace;
}

}  // namespace accel
