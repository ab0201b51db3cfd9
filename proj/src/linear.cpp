#include "accel/linear.hpp"

#include <cmath>

namespace accel {

namespace {

constexpr double kDivergenceFactor = 1e6;

}  // namespace

LinearOperator LinearOperator::dense(Matrix A) {
  const int n = static_cast<int>(A.rows());
  return {[A = std::move(A)](const Vector& x) -> Vector { return A * x; }, n};
}

LinearOperator LinearOperator::diagonal(Vector d) {
  const int n = static_cast<int>(d.size());
  return {[d = std::move(d)](const Vector& x) -> Vector {
            return d.cwiseProduct(x);
          },
          n};
}

ConvergenceTrace richardson_solve(const LinearOperator& A, const Vector& b,
                                  const Vector& x0,
                                  const std::vector<double>& gamma_schedule,
                                  const StoppingRule& stop) {
  if (gamma_schedule.empty())
    throw std::logic_error("richardson: empty step schedule");
  ConvergenceTrace trace;
  Vector x = x0;
  Vector r = b - A(x);
  const double res0 = r.norm();
  long fevals = 1;
  trace.add(0, fevals, res0);
  if (res0 <= 0.0) {
    trace.converged = true;
    return trace;
  }
  long j = 0;
  while (fevals < stop.max_fevals) {
    const double gamma = gamma_schedule[j % gamma_schedule.size()];
    x += gamma * r;
    r = b - A(x);
    ++fevals;
    const double resnorm = r.norm();
    trace.add(++j, fevals, resnorm);
    if (resnorm <= stop.tol * res0) {
      trace.converged = true;
      break;
    }
    if (resnorm >= kDivergenceFactor * res0) {
      trace.diverged = true;
      break;
    }
  }
  return trace;
}

Vector mr_step(const LinearOperator& A, const Vector& b, const Vector& x) {
  const Vector r = b - A(x);
  if (r.norm() == 0.0) return x;
  const Vector ar = A(r);
  const double denom = ar.squaredNorm();
  if (denom <= 0.0)
    throw StationaryResidual("mr_step: A r vanishes");
  return x + (r.dot(ar) / denom) * r;
}

Vector sd_step(const LinearOperator& A, const Vector& b, const Vector& x) {
  const Vector r = b - A(x);
  if (r.norm() == 0.0) return x;
  const Vector ar = A(r);
  const double denom = ar.dot(r);
  if (denom == 0.0)
    throw StationaryResidual("sd_step: (Ar, r) vanishes");
  return x + (r.squaredNorm() / denom) * r;
}

namespace {

// Shared body of the two Chebyshev variants: stationary < 0 means use the
// adaptive ratio recurrence, otherwise the frozen ratio value.
ConvergenceTrace chebyshev_core(const LinearOperator& A, const Vector& b,
                                const Vector& x0, double alpha, double beta_ev,
                                const StoppingRule& stop, bool stationary) {
  if (!(alpha > 0.0) || beta_ev < alpha)
    throw std::logic_error("chebyshev: need 0 < alpha <= beta");
  ConvergenceTrace trace;
  Vector x = x0;
  Vector r = b - A(x);
  long fevals = 1;
  const double res0 = r.norm();
  trace.add(0, fevals, res0);
  if (res0 <= 0.0) {
    trace.converged = true;
    return trace;
  }
  const double theta = 0.5 * (beta_ev + alpha);
  const double delta = 0.5 * (beta_ev - alpha);
  if (delta == 0.0) {
    // Single-point spectrum: one exact step.
    x += r / theta;
    r = b - A(x);
    ++fevals;
    trace.add(1, fevals, r.norm());
    trace.converged = r.norm() <= stop.tol * res0;
    return trace;
  }
  const double sigma1 = theta / delta;
  const double rho_limit = sigma1 - std::sqrt(sigma1 * sigma1 - 1.0);
  double rho = stationary ? rho_limit : 1.0 / sigma1;
  Vector d = stationary ? Vector((2.0 * rho_limit / delta) * r)
                        : Vector(r / theta);
  long j = 0;
  while (fevals < stop.max_fevals) {
    x += d;
    const Vector ad = A(d);
    ++fevals;
    r -= ad;
    const double resnorm = r.norm();
    trace.add(++j, fevals, resnorm);
    if (resnorm <= stop.tol * res0) {
      trace.converged = true;
      break;
    }
    if (resnorm >= kDivergenceFactor * res0) {
      trace.diverged = true;
      break;
    }
    const double rho_next =
        stationary ? rho_limit : 1.0 / (2.0 * sigma1 - rho);
    d = (2.0 * rho_next / delta) * r + (rho_next * rho) * d;
    rho = rho_next;
  }
  return trace;
}

}  // namespace

ConvergenceTrace chebyshev_solve(const LinearOperator& A, const Vector& b,
                                 const Vector& x0, double alpha,
                                 double beta_ev, const StoppingRule& stop) {
  return chebyshev_core(A, b, x0, alpha, beta_ev, stop, false);
}

ConvergenceTrace stationary_chebyshev_solve(const LinearOperator& A,
                                            const Vector& b, const Vector& x0,
                                            double alpha, double beta_ev,
                                            const StoppingRule& stop) {
  return chebyshev_core(A, b, x0, alpha, beta_ev, stop, true);
}

ConvergenceTrace heavy_ball(const CountedMap& grad, const Vector& x0,
                            const MomentumParams& params,
                            const StoppingRule& stop) {
  ConvergenceTrace trace;
  const long feval_base = grad.count();
  Vector x = x0;
  Vector w = Vector::Zero(x.size());
  double res0 = -1.0;
  long j = 0;
  while (grad.count() - feval_base < stop.max_fevals) {
    const Vector g = grad(x);
    const double resnorm = g.norm();
    if (res0 < 0.0) res0 = resnorm;
    trace.add(j++, grad.count() - feval_base, resnorm);
    if (resnorm <= stop.tol * res0) {
      trace.converged = true;
      break;
    }
    if (resnorm >= kDivergenceFactor * res0) {
      trace.diverged = true;
      break;
    }
    w = params.eta * w + g;
    x -= params.nu * w;
  }
  return trace;
}

ConvergenceTrace nesterov(const CountedMap& grad, const Vector& x0,
                          const MomentumParams& params,
                          const StoppingRule& stop) {
  ConvergenceTrace trace;
  const long feval_base = grad.count();
  Vector x = x0;
  Vector dx_prev = Vector::Zero(x.size());
  double res0 = -1.0;
  long j = 0;
  while (grad.count() - feval_base < stop.max_fevals) {
    const Vector probe = x + params.eta * dx_prev;
    const Vector g = grad(probe);
    const double resnorm = g.norm();
    if (res0 < 0.0) res0 = resnorm;
    trace.add(j++, grad.count() - feval_base, resnorm);
    if (resnorm <= stop.tol * res0) {
      trace.converged = true;
      break;
    }
    if (resnorm >= kDivergenceFactor * res0) {
      trace.diverged = true;
      break;
    }
    const Vector x_next = probe - params.nu * g;
    dx_prev = x_next - x;
    x = x_next;
  }
  return trace;
}

double nesterov_tuning(double theta2) {
  if (!(theta2 > 0.0)) throw std::logic_error("nesterov_tuning: theta2 <= 0");
  if (theta2 > 1.0)
    throw NoRealRoot("nesterov_tuning: no real root for theta2 > 1");
  const double c = 2.0 / theta2 - 1.0;
  return c - std::sqrt(std::max(0.0, c * c - 1.0));
}

std::vector<std::pair<double, double>> momentum_spectrum(
    const std::vector<double>& mu, double eta) {
  std::vector<std::pair<double, double>> out;
  out.reserve(mu.size());
  for (double m : mu) {
    const double disc = m * m - eta;
    if (disc < 0.0) {
      const double mod = std::sqrt(eta);
      out.emplace_back(mod, mod);
    } else {
      const double root = std::sqrt(disc);
      out.emplace_back(std::abs(m + root), std::abs(m - root));
    }
  }
  return out;
}

ConvergenceTrace cg_solve(const LinearOperator& A, const Vector& b,
                          const Vector& x0, const StoppingRule& stop) {
  ConvergenceTrace trace;
  Vector x = x0;
  Vector r = b - A(x);
  long fevals = 1;
  const double res0 = r.norm();
  trace.add(0, fevals, res0);
  if (res0 <= 0.0) {
    trace.converged = true;
    return trace;
  }
  Vector p = r;
  double rr = r.squaredNorm();
  long j = 0;
  while (fevals < stop.max_fevals) {
    const Vector ap = A(p);
    ++fevals;
    const double pap = p.dot(ap);
    if (pap <= 0.0) throw Breakdown("cg: direction with (Ap,p) <= 0");
    const double alpha = rr / pap;
    x += alpha * p;
    r -= alpha * ap;
    const double rr_next = r.squaredNorm();
    const double resnorm = std::sqrt(rr_next);
    trace.add(++j, fevals, resnorm);
    if (resnorm <= stop.tol * res0) {
      trace.converged = true;
      break;
    }
    if (resnorm >= kDivergenceFactor * res0) {
      trace.diverged = true;
      break;
    }
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return trace;
}

std::pair<ConvergenceTrace, PairedDirections> tgcr_solve(
    const LinearOperator& A, const Vector& b, const Vector& x0, int m,
    const StoppingRule& stop, std::vector<Vector>* iterate_log) {
  ConvergenceTrace trace;
  PairedDirections dirs;
  dirs.capacity = m;
  Vector x = x0;
  if (iterate_log) iterate_log->push_back(x);
  Vector r = b - A(x);
  long fevals = 1;
  const double res0 = r.norm();
  trace.add(0, fevals, res0);
  if (res0 <= 0.0) {
    trace.converged = true;
    return {trace, dirs};
  }
  {
    Vector v = A(r);
    ++fevals;
    const double nv = v.norm();
    if (nv == 0.0) throw Breakdown("tgcr: A r0 = 0");
    dirs.push(r / nv, v / nv);
  }
  long j = 0;
  while (fevals < stop.max_fevals) {
    const double alpha = r.dot(dirs.V.back());
    x += alpha * dirs.P.back();
    r -= alpha * dirs.V.back();
    if (iterate_log) iterate_log->push_back(x);
    const double resnorm = r.norm();
    trace.add(++j, fevals, resnorm);
    if (resnorm <= stop.tol * res0) {
      trace.converged = true;
      break;
    }
    if (resnorm >= kDivergenceFactor * res0) {
      trace.diverged = true;
      break;
    }
    Vector p = r;
    Vector v = A(p);
    ++fevals;
    const double vnorm_in = v.norm();
    for (int i = 0; i < dirs.live(); ++i) {
      const double s = dirs.V[i].dot(v);
      v -= s * dirs.V[i];
      p -= s * dirs.P[i];
    }
    if (v.norm() < vnorm_in / std::sqrt(2.0)) {
      for (int i = 0; i < dirs.live(); ++i) {
        const double s = dirs.V[i].dot(v);
        v -= s * dirs.V[i];
        p -= s * dirs.P[i];
      }
    }
    const double nv = v.norm();
    if (nv <= 1e-14 * std::max(vnorm_in, 1.0)) {
      // Krylov space exhausted. Lucky only when already at the solution.
      if (resnorm <= std::max(stop.tol, 1e-12) * res0) {
        trace.converged = true;
        if (!trace.records.empty()) trace.records.back().event = "breakdown";
        break;
      }
      throw Breakdown("tgcr: direction space exhausted before convergence");
    }
    dirs.push(p / nv, v / nv);
  }
  return {trace, dirs};
}

}  // namespace accel
