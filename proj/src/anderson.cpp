#include "accel/anderson.hpp"

#include <cmath>

#include "accel/qr.hpp"

namespace accel {

Matrix DifferenceWindow::Xmat() const {
  if (dX.empty()) return Matrix();
  Matrix m(dX[0].size(), dX.size());
  for (size_t i = 0; i < dX.size(); ++i) m.col(i) = dX[i];
  return m;
}

Matrix DifferenceWindow::Fmat() const {
  if (dF.empty()) return Matrix();
  Matrix m(dF[0].size(), dF.size());
  for (size_t i = 0; i < dF.size(); ++i) m.col(i) = dF[i];
  return m;
}

namespace {

constexpr double kDivergenceFactor = 1e6;

// Evolving least-squares state for the factorization-based backends.
struct BackendState {
  AABackend kind;
  double tau_reg;
  QRFactors qr;

  explicit BackendState(AABackend k, double tau, int n, int capacity)
      : kind(k), tau_reg(tau) {
    qr.Q = Matrix(n, 0);
    qr.R = Matrix(0, 0);
    qr.capacity = capacity > 0 ? capacity : 1 << 20;
  }

  void clear(int n) {
    qr.Q = Matrix(n, 0);
    qr.R = Matrix(0, 0);
    qr.triangular = true;
  }

  void evict() {
    if (qr.cols() < 2) {
      clear(static_cast<int>(qr.rows()));
      return;
    }
    switch (kind) {
      case AABackend::QRDowndate:
        givens_downdate(qr);
        break;
      case AABackend::CholeskyDowndate:
        cholesky_downdate(qr);
        break;
      case AABackend::PolarDowndate:
        polar_downdate(qr);
        break;
      case AABackend::Normal:
        break;
    }
  }
};

struct GammaSolve {
  Vector gamma;
  Vector projected;  // Q eta for the orthonormal backends, F gamma otherwise
};

GammaSolve solve_gamma(BackendState& state, const DifferenceWindow& window,
                       const Vector& f) {
  if (state.kind == AABackend::Normal) {
    const Matrix F = window.Fmat();
    Vector gamma = solve_regularized_normal(F, f, state.tau_reg);
    return {gamma, F * gamma};
  }
  const Vector eta = state.qr.Q.transpose() * f;
  Vector gamma = lstsq_qr(state.qr, f);
  return {gamma, state.qr.Q * eta};
}

}  // namespace

ConvergenceTrace aa_solve(const CountedMap& g, const Vector& x0,
                          const AAConfig& cfg, const StoppingRule& stop,
                          AADiagnostics* diag) {
  ConvergenceTrace trace;
  const long feval_base = g.count();
  const int n = static_cast<int>(x0.size());
  DifferenceWindow window;
  window.capacity = cfg.window;
  BackendState backend(cfg.backend, cfg.tau_reg, n, cfg.window);

  Vector x = x0;
  Vector f = g(x) - x;
  const double res0 = f.norm();
  long j = 0;
  trace.add(j, g.count() - feval_base, res0);
  if (diag) {
    diag->iterates.push_back(x);
    diag->residuals.push_back(f);
  }
  if (res0 <= 0.0) {
    trace.converged = true;
    return trace;
  }

  Vector x_next = x + cfg.beta * f;
  long since_restart = 0;
  while (g.count() - feval_base < stop.max_fevals) {
    const Vector f_next = g(x_next) - x_next;
    ++j;
    ++since_restart;
    std::string event;

    if (cfg.restart_period > 0 && since_restart >= cfg.restart_period) {
      window.clear();
      backend.clear(n);
      since_restart = 0;
      event = "restart";
    } else {
      Vector df = f_next - f;
      try {
        if (backend.kind != AABackend::Normal) {
          if (window.full()) backend.evict();
          mgs_insert(backend.qr, df);
        }
        window.push(x_next - x, std::move(df));
      } catch (const NumericalError&) {
        window.clear();
        backend.clear(n);
        since_restart = 0;
        event = "flush";
      }
    }

    x = x_next;
    f = f_next;
    const double resnorm = f.norm();
    trace.add(j, g.count() - feval_base, resnorm, 0.0, event);
    if (diag) {
      diag->iterates.push_back(x);
      diag->residuals.push_back(f);
    }
    if (resnorm <= stop.tol * res0) {
      trace.converged = true;
      break;
    }
    if (resnorm >= kDivergenceFactor * res0) {
      trace.diverged = true;
      break;
    }

    if (window.count() == 0) {
      x_next = x + cfg.beta * f;
      continue;
    }
    try {
      const GammaSolve sol = solve_gamma(backend, window, f);
      x_next = (x - window.Xmat() * sol.gamma) +
               cfg.beta * (f - sol.projected);
    } catch (const NumericalError&) {
      window.clear();
      backend.clear(n);
      since_restart = 0;
      if (!trace.records.empty()) trace.records.back().event = "flush";
      x_next = x + cfg.beta * f;
    }
  }
  return trace;
}

ConvergenceTrace aa_tgs_solve(const CountedMap& g, const Vector& x0,
                              const AAConfig& cfg, const StoppingRule& stop,
                              TGSDiagnostics* diag) {
  ConvergenceTrace trace;
  const long feval_base = g.count();
  std::vector<Vector> Q, U;
  std::vector<double> growth;  // rounding-amplification monitor per column
  long oldest = 0;             // global index of the first live column

  Vector x = x0;
  Vector f = g(x) - x;
  const double res0 = f.norm();
  long j = 0;
  trace.add(j, g.count() - feval_base, res0);
  if (diag) {
    diag->iterates.push_back(x);
    diag->residuals.push_back(f);
  }
  if (res0 <= 0.0) {
    trace.converged = true;
    return trace;
  }

  Vector x_next = x + cfg.beta * f;
  long since_restart = 0;
  while (g.count() - feval_base < stop.max_fevals) {
    const Vector f_next = g(x_next) - x_next;
    ++j;
    ++since_restart;
    std::string event;

    Vector u = x_next - x;
    Vector q = f_next - f;
    const double dfnorm = q.norm();
    std::vector<double> s(Q.size(), 0.0);
    for (size_t i = 0; i < Q.size(); ++i) {
      const double c = Q[i].dot(q);
      s[i] += c;
      q -= c * Q[i];
      u -= c * U[i];
    }
    if (!Q.empty() && q.norm() < dfnorm / std::sqrt(2.0)) {
      for (size_t i = 0; i < Q.size(); ++i) {
        const double c = Q[i].dot(q);
        s[i] += c;
        q -= c * Q[i];
        u -= c * U[i];
      }
    }
    const double sjj = q.norm();
    const bool dependent = sjj <= 1e-12 * dfnorm;
    const bool periodic =
        cfg.restart_period > 0 && since_restart >= cfg.restart_period;
    // Scalar sequence obeying the same recurrence as the paired columns;
    // it tracks how much the recurrences can have amplified rounding noise.
    double cj = 1.0;
    for (size_t i = 0; i < growth.size(); ++i) cj += std::abs(s[i]) * growth[i];
    cj = dependent ? cj : cj / sjj;
    const bool unstable = cfg.monitor_cap > 0.0 && cj > cfg.monitor_cap;
    if (dependent || periodic || unstable) {
      Q.clear();
      U.clear();
      growth.clear();
      oldest = j;
      since_restart = 0;
      event = "restart";
    } else {
      if (cfg.window > 0 && static_cast<int>(Q.size()) >= cfg.window) {
        Q.erase(Q.begin());
        U.erase(U.begin());
        growth.erase(growth.begin());
        ++oldest;
      }
      Q.push_back(q / sjj);
      U.push_back(u / sjj);
      growth.push_back(cj);
      if (diag) {
        s.push_back(sjj);
        diag->s_columns.push_back(std::move(s));
        diag->col_index.push_back(oldest);
      }
    }

    x = x_next;
    f = f_next;
    const double resnorm = f.norm();
    trace.add(j, g.count() - feval_base, resnorm, 0.0, event);
    if (diag) {
      diag->iterates.push_back(x);
      diag->residuals.push_back(f);
    }
    if (resnorm <= stop.tol * res0) {
      trace.converged = true;
      break;
    }
    if (resnorm >= kDivergenceFactor * res0) {
      trace.diverged = true;
      break;
    }

    if (Q.empty()) {
      x_next = x + cfg.beta * f;
      continue;
    }
    Vector eta(Q.size());
    Vector qe = Vector::Zero(x.size());
    Vector ue = Vector::Zero(x.size());
    for (size_t i = 0; i < Q.size(); ++i) {
      eta(i) = Q[i].dot(f);
      qe += eta(i) * Q[i];
      ue += eta(i) * U[i];
    }
    if (diag) diag->etas.push_back(eta);
    x_next = (x - ue) + cfg.beta * (f - qe);
  }
  return trace;
}

Vector diis_weights(const Vector& theta) {
  Vector w(theta.size() + 1);
  w.head(theta.size()) = theta;
  w(theta.size()) = 1.0 - theta.sum();
  return w;
}

Vector gamma_to_theta(const Vector& gamma) {
  const int m = static_cast<int>(gamma.size());
  Vector theta(m + 1);
  double prev = 0.0;
  for (int i = 0; i < m; ++i) {
    theta(i) = gamma(i) - prev;
    prev = gamma(i);
  }
  theta(m) = 1.0 - prev;
  return theta;
}

Vector theta_to_gamma(const Vector& theta) {
  const int m = static_cast<int>(theta.size()) - 1;
  Vector gamma(m);
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    acc += theta(i);
    gamma(i) = acc;
  }
  return gamma;
}

}  // namespace accel
