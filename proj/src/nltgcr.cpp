#include "accel/nltgcr.hpp"

#include <cmath>

#include "accel/newton.hpp"

namespace accel {

double residual_deviation(const Vector& r_lin, const Vector& r_true) {
  const double n1 = r_lin.norm();
  const double n2 = r_true.norm();
  if (n1 == 0.0 || n2 == 0.0) return 2.0;
  return 1.0 - r_lin.dot(r_true) / (n1 * n2);
}

bool linear_mode_ok(const Vector& r_lin, const Vector& r_true, double tau) {
  const double n1 = r_lin.norm();
  const double n2 = r_true.norm();
  if (n1 == 0.0 || n2 == 0.0) return false;
  return residual_deviation(r_lin, r_true) < tau;
}

Vector multisecant_view_apply(const PairedDirections& dirs, const Vector& q) {
  Vector out = Vector::Zero(q.size());
  for (int i = 0; i < dirs.live(); ++i) out += dirs.V[i].dot(q) * dirs.P[i];
  return out;
}

Matrix multisecant_view_dense(const PairedDirections& dirs) {
  if (dirs.live() == 0) throw std::logic_error("multisecant view: empty");
  const int n = static_cast<int>(dirs.P[0].size());
  Matrix G = Matrix::Zero(n, n);
  for (int i = 0; i < dirs.live(); ++i)
    G += dirs.P[i] * dirs.V[i].transpose();
  return G;
}

namespace {

constexpr double kDivergenceFactor = 1e6;

}  // namespace

ConvergenceTrace nltgcr_solve(const CountedMap& f, const Vector& x0,
                              const NLTGCRConfig& cfg,
                              const StoppingRule& stop,
                              NLTGCRDiagnostics* diag) {
  ConvergenceTrace trace;
  const long feval_base = f.count();
  PairedDirections dirs;
  dirs.capacity = cfg.window;

  Vector x = x0;
  Vector fx = f(x);
  Vector r = -fx;
  const double res0 = r.norm();
  long j = 0;
  trace.add(j, f.count() - feval_base, res0);
  if (diag) {
    diag->iterates.push_back(x);
    diag->residuals.push_back(r);
  }
  if (res0 <= 0.0) {
    trace.converged = true;
    return trace;
  }

  bool lin = cfg.mode == NLTGCRMode::Linear;
  Vector anchor = x;      // Jacobian anchor while in linear mode
  Vector anchor_f = fx;
  long steps_in_lin = 0;
  double lin_entry_res = res0;

  // Seeds the window with the pair built from the current residual; returns
  // false when the Jacobian action on r vanishes.
  auto seed_pair = [&](const Vector& at, const Vector& f_at) -> bool {
    Vector v = frechet_apply(f, at, f_at, r, cfg.frechet_eps);
    const double nv = v.norm();
    if (nv <= 1e-14 * (1.0 + r.norm())) return false;
    dirs.push(r / nv, v / nv);
    return true;
  };
  if (!seed_pair(x, fx)) {
    trace.converged = true;  // residual already in the Jacobian null space
    return trace;
  }

  while (f.count() - feval_base < stop.max_fevals) {
    std::string event;
    Vector y(dirs.live());
    for (int i = 0; i < dirs.live(); ++i) y(i) = dirs.V[i].dot(r);
    for (int i = 0; i < dirs.live(); ++i) x += y(i) * dirs.P[i];
    Vector r_lin = r;
    for (int i = 0; i < dirs.live(); ++i) r_lin -= y(i) * dirs.V[i];

    if (lin) {
      r = r_lin;
      ++steps_in_lin;
    } else {
      fx = f(x);
      r = -fx;
    }
    ++j;
    const double resnorm = r.norm();
    if (diag) {
      diag->iterates.push_back(x);
      diag->residuals.push_back(r);
      diag->linear_residuals.push_back(r_lin);
      diag->ys.push_back(y);
    }

    const bool converged = resnorm <= stop.tol * res0;
    const bool diverged = resnorm >= kDivergenceFactor * res0;
    if (!converged && !diverged) {
      if (cfg.mode == NLTGCRMode::Adaptive) {
        if (!lin) {
          // The linear-model residual is free here; compare directly.
          if (linear_mode_ok(r_lin, r, cfg.tau_switch)) {
            lin = true;
            anchor = x;
            anchor_f = fx;
            steps_in_lin = 0;
            lin_entry_res = resnorm;
            event = "mode-switch-lin";
          }
        } else if (steps_in_lin % cfg.probe_period == 0) {
          const Vector f_true = f(x);
          if (!linear_mode_ok(r, -f_true, cfg.tau_switch)) {
            lin = false;
            fx = f_true;
            r = -fx;
            event = "mode-switch-nl";
          }
        }
      }
      if (lin && (steps_in_lin >= cfg.restart_period ||
                  resnorm <= cfg.restart_decrease * lin_entry_res)) {
        // Refresh the subspace and the Jacobian anchor at the latest point.
        fx = f(x);
        r = -fx;
        anchor = x;
        anchor_f = fx;
        dirs.clear();
        steps_in_lin = 0;
        lin_entry_res = r.norm();
        event = event.empty() ? "restart" : event + ";restart";
        if (r.norm() <= stop.tol * res0) {
          trace.add(j, f.count() - feval_base, r.norm(), 0.0, event);
          trace.converged = true;
          break;
        }
        if (!seed_pair(x, fx)) {
          trace.add(j, f.count() - feval_base, r.norm(), 0.0,
                    event + ";breakdown");
          break;
        }
        trace.add(j, f.count() - feval_base, r.norm(), 0.0, event);
        continue;
      }
    }
    trace.add(j, f.count() - feval_base, resnorm, 0.0, event);
    if (converged) {
      trace.converged = true;
      break;
    }
    if (diverged) {
      trace.diverged = true;
      break;
    }
    if (f.count() - feval_base >= stop.max_fevals) break;

    Vector p = r;
    Vector v = lin ? frechet_apply(f, anchor, anchor_f, p, cfg.frechet_eps)
                   : frechet_apply(f, x, fx, p, cfg.frechet_eps);
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
      // Dependent direction: restart the window from the true residual.
      fx = f(x);
      r = -fx;
      dirs.clear();
      lin = cfg.mode == NLTGCRMode::Linear;
      anchor = x;
      anchor_f = fx;
      steps_in_lin = 0;
      lin_entry_res = r.norm();
      if (!trace.records.empty()) trace.records.back().event = "breakdown";
      if (r.norm() <= stop.tol * res0) {
        trace.converged = true;
        break;
      }
      if (!seed_pair(x, fx)) break;
      continue;
    }
    dirs.push(p / nv, v / nv);
  }
  return trace;
}

}  // namespace accel
