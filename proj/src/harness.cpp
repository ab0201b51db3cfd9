#include "accel/harness.hpp"

#include <cmath>
#include <istream>
#include <sstream>

#include "accel/anderson.hpp"
#include "accel/extrapolation.hpp"
#include "accel/newton.hpp"
#include "accel/nltgcr.hpp"
#include "accel/problems.hpp"

namespace accel {

namespace {

long parse_long(const std::string& v, const std::string& key) {
  size_t pos = 0;
  long out;
  try {
    out = std::stol(v, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("bad integer for '" + key + "': " + v);
  }
  if (pos != v.size())
    throw std::runtime_error("bad integer for '" + key + "': " + v);
  return out;
}

double parse_double(const std::string& v, const std::string& key) {
  size_t pos = 0;
  double out;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::runtime_error("bad number for '" + key + "': " + v);
  }
  if (pos != v.size())
    throw std::runtime_error("bad number for '" + key + "': " + v);
  return out;
}

}  // namespace

void apply_config_key(RunConfig& cfg, const std::string& key,
                      const std::string& value) {
  if (key == "problem") cfg.problem = value;
  else if (key == "method") cfg.method = value;
  else if (key == "window") cfg.window = static_cast<int>(parse_long(value, key));
  else if (key == "restart") cfg.restart = static_cast<int>(parse_long(value, key));
  else if (key == "beta") cfg.beta = parse_double(value, key);
  else if (key == "mode") cfg.mode = value;
  else if (key == "backend") cfg.backend = value;
  else if (key == "tol") cfg.tol = parse_double(value, key);
  else if (key == "max-fevals" || key == "max_fevals")
    cfg.max_fevals = parse_long(value, key);
  else if (key == "seed")
    cfg.seed = static_cast<std::uint64_t>(parse_long(value, key));
  else if (key == "out") cfg.out = value;
  else if (key == "nx") cfg.nx = static_cast<int>(parse_long(value, key));
  else if (key == "lambda") cfg.lambda = parse_double(value, key);
  else if (key == "mu") cfg.mu = parse_double(value, key);
  else if (key == "n") cfg.n = static_cast<int>(parse_long(value, key));
  else if (key == "kappa") cfg.kappa = parse_double(value, key);
  else if (key == "kind") cfg.kind = value;
  else if (key == "cells") cfg.cells = static_cast<int>(parse_long(value, key));
  else if (key == "perturbation") cfg.perturbation = parse_double(value, key);
  else throw std::runtime_error("unknown config key '" + key + "'");
}

RunConfig parse_config(std::istream& is) {
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    const auto kend = key.find_last_not_of(" \t");
    key = key.substr(0, kend == std::string::npos ? 0 : kend + 1);
    const auto vstart = value.find_first_not_of(" \t");
    value = vstart == std::string::npos ? "" : value.substr(vstart);
    try {
      apply_config_key(cfg, key, value);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("config line " + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  return cfg;
}

namespace {

// Broyden iteration with an explicit dense Jacobian (type 1) or inverse
// (type 2). Desk scale only.
ConvergenceTrace broyden_solve(const CountedMap& f, const Vector& x0,
                               bool type1, const StoppingRule& stop) {
  ConvergenceTrace trace;
  const long feval_base = f.count();
  const int n = static_cast<int>(x0.size());
  Vector x = x0;
  Vector fx = f(x);
  const double res0 = fx.norm();
  long j = 0;
  trace.add(j, f.count() - feval_base, res0);
  if (res0 <= 0.0) {
    trace.converged = true;
    return trace;
  }
  Matrix J = Matrix::Identity(n, n);  // J or its inverse G
  while (f.count() - feval_base < stop.max_fevals) {
    Vector step = type1 ? Vector(Eigen::PartialPivLU<Matrix>(J).solve(-fx))
                        : Vector(-(J * fx));
    const Vector x_next = x + step;
    const Vector f_next = f(x_next);
    const Vector dx = x_next - x;
    const Vector df = f_next - fx;
    try {
      J = type1 ? broyden1_update(J, dx, df) : broyden2_update(J, dx, df);
    } catch (const DegenerateDenominator&) {
      if (!trace.records.empty()) trace.records.back().event = "stalled";
      break;
    }
    x = x_next;
    fx = f_next;
    const double resnorm = fx.norm();
    trace.add(++j, f.count() - feval_base, resnorm);
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

// Scalar-sequence extrapolation of order m for the series problem. The
// least-squares window methods degenerate on one-dimensional sequences
// (their difference matrices have rank one), so the scalar transforms are
// used instead: the progressive rhombus table and, as an independent
// alternative, the sliding determinant-ratio rule.
ConvergenceTrace series_extrapolate(const std::vector<double>& seq, int m,
                                    bool determinant_rule, double limit,
                                    double tol) {
  ConvergenceTrace trace;
  long j = 0;
  double prev = seq.front();
  if (determinant_rule) {
    for (size_t end = 2 * m + 1; end <= seq.size(); ++end) {
      double y;
      try {
        y = shanks_oracle(seq, static_cast<int>(end - (2 * m + 1)), m);
      } catch (const NumericalError&) {
        trace.add(j++, static_cast<long>(end), std::abs(prev - limit), 0.0,
                  "degenerate");
        continue;
      }
      trace.add(j++, static_cast<long>(end), std::abs(y - limit));
      if (std::abs(y - prev) <= tol) trace.converged = true;
      prev = y;
    }
    return trace;
  }
  EpsilonTable<double> table(2 * m);
  for (size_t i = 0; i < seq.size(); ++i) {
    table.push(seq[i]);
    // Highest available even column, capped at the requested order.
    const int order = std::min(2 * m, (table.columns() - 1) / 2 * 2);
    if (order < 2) continue;
    const double y = table.entry(order);
    trace.add(j++, static_cast<long>(i + 1), std::abs(y - limit));
    if (std::abs(y - prev) <= tol) trace.converged = true;
    prev = y;
  }
  return trace;
}

struct ProblemSetup {
  CountedMap residual;      // f with f(x*) = 0
  Vector x0;
  double default_mu = 0.1;  // mixing step for g(x) = x - mu f(x)
};

ProblemSetup setup_problem(const RunConfig& cfg) {
  ProblemSetup setup;
  if (cfg.problem == "bratu") {
    BratuSpec spec;
    spec.nx = cfg.nx;
    spec.lambda = cfg.lambda;
    setup.residual = bratu_map(spec);
    setup.x0 = bratu_initial_guess(spec, cfg.seed);
    setup.default_mu = 0.1;
  } else if (cfg.problem == "lj") {
    setup.residual = lj_gradient_map();
    setup.x0 = fcc_init(cfg.cells, cfg.perturbation, cfg.seed);
    setup.default_mu = 1e-4;
  } else if (cfg.problem == "linear") {
    LinearKind kind;
    if (cfg.kind == "spd") kind = LinearKind::SpdDiag;
    else if (cfg.kind == "nonsym") kind = LinearKind::Nonsymmetric;
    else if (cfg.kind == "contract") kind = LinearKind::ContractionMap;
    else throw std::runtime_error("unknown linear kind '" + cfg.kind + "'");
    LinearProblem prob =
        make_linear_problem(kind, cfg.n, cfg.seed, cfg.kappa);
    setup.residual = CountedMap(
        [A = prob.A, b = prob.b](const Vector& x) -> Vector {
          return A(x) - b;
        });
    setup.x0 = Vector::Zero(cfg.n);
    setup.default_mu = 1.0;
  } else {
    throw std::runtime_error("unknown problem '" + cfg.problem + "'");
  }
  return setup;
}

}  // namespace

RunOutcome run_config(const RunConfig& cfg) {
  RunOutcome outcome;
  try {
    StoppingRule stop{cfg.tol, cfg.max_fevals};

    if (cfg.problem == "atan") {
      const auto seq = atan_partial_sums(cfg.n, 1.0);
      const double limit = std::atan(1.0);
      if (cfg.method == "gd") {
        ConvergenceTrace t;
        for (size_t i = 1; i < seq.size(); ++i)
          t.add(static_cast<long>(i - 1), static_cast<long>(i),
                std::abs(seq[i] - limit));
        outcome.trace = std::move(t);
      } else if (cfg.method == "rre" || cfg.method == "mpe") {
        outcome.trace = series_extrapolate(seq, cfg.window,
                                           cfg.method == "mpe", limit, cfg.tol);
      } else {
        throw std::runtime_error("method '" + cfg.method +
                                 "' not applicable to problem 'atan'");
      }
      outcome.exit_code = 0;
      return outcome;
    }

    ProblemSetup setup = setup_problem(cfg);
    const double mu = cfg.mu > 0.0 ? cfg.mu : setup.default_mu;
    const CountedMap& f = setup.residual;

    if (cfg.method == "gd") {
      outcome.trace = adapt_gd_solve(f, setup.x0, mu, stop);
    } else if (cfg.method == "rre") {
      outcome.trace = restarted_rre_solve(fixed_point_wrap(f, mu), setup.x0,
                                          cfg.window, cfg.beta, stop);
    } else if (cfg.method == "aa" || cfg.method == "aatgs") {
      AAConfig acfg;
      acfg.window = cfg.window;
      acfg.restart_period = cfg.restart;
      acfg.beta = cfg.beta;
      if (cfg.backend == "normal") acfg.backend = AABackend::Normal;
      else if (cfg.backend == "qr") acfg.backend = AABackend::QRDowndate;
      else if (cfg.backend == "chol") acfg.backend = AABackend::CholeskyDowndate;
      else if (cfg.backend == "polar") acfg.backend = AABackend::PolarDowndate;
      else throw std::runtime_error("unknown backend '" + cfg.backend + "'");
      const CountedMap g = fixed_point_wrap(f, mu);
      if (cfg.method == "aa") {
        outcome.trace = aa_solve(g, setup.x0, acfg, stop);
      } else {
        acfg.monitor_cap = 1e8;  // automatic stability restarts
        outcome.trace = aa_tgs_solve(g, setup.x0, acfg, stop);
      }
    } else if (cfg.method == "nltgcr") {
      NLTGCRConfig ncfg;
      ncfg.window = cfg.window;
      if (cfg.restart > 0) ncfg.restart_period = cfg.restart;
      if (cfg.mode == "nl") ncfg.mode = NLTGCRMode::Nonlinear;
      else if (cfg.mode == "lin") ncfg.mode = NLTGCRMode::Linear;
      else if (cfg.mode == "adapt") ncfg.mode = NLTGCRMode::Adaptive;
      else throw std::runtime_error("unknown mode '" + cfg.mode + "'");
      outcome.trace = nltgcr_solve(f, setup.x0, ncfg, stop);
    } else if (cfg.method == "newton") {
      NewtonConfig ncfg;
      ncfg.inner_window = cfg.window;
      outcome.trace = inexact_newton_solve(f, setup.x0, ncfg, stop);
    } else if (cfg.method == "broyden1" || cfg.method == "broyden2") {
      if (setup.x0.size() > 2000)
        throw std::runtime_error(
            "method '" + cfg.method +
            "' stores a dense Jacobian; problem dimension too large");
      outcome.trace =
          broyden_solve(f, setup.x0, cfg.method == "broyden1", stop);
    } else if (cfg.method == "cheb" || cfg.method == "cg" ||
               cfg.method == "tgcr") {
      if (cfg.problem != "linear")
        throw std::runtime_error("method '" + cfg.method +
                                 "' requires problem 'linear'");
      LinearKind kind = cfg.kind == "spd"       ? LinearKind::SpdDiag
                        : cfg.kind == "nonsym"  ? LinearKind::Nonsymmetric
                                                : LinearKind::ContractionMap;
      LinearProblem prob =
          make_linear_problem(kind, cfg.n, cfg.seed, cfg.kappa);
      const Vector x0 = Vector::Zero(cfg.n);
      if (cfg.method == "cheb") {
        if (kind != LinearKind::SpdDiag)
          throw std::runtime_error(
              "method 'cheb' needs the spd spectrum bracket");
        outcome.trace =
            chebyshev_solve(prob.A, prob.b, x0, 1.0 / cfg.kappa, 1.0, stop);
      } else if (cfg.method == "cg") {
        outcome.trace = cg_solve(prob.A, prob.b, x0, stop);
      } else {
        outcome.trace =
            tgcr_solve(prob.A, prob.b, x0, cfg.window, stop).first;
      }
    } else {
      throw std::runtime_error("unknown method '" + cfg.method + "'");
    }

    outcome.exit_code = outcome.trace.converged ? 0 : 2;
  } catch (const std::exception& e) {
    outcome.exit_code = 1;
    outcome.error = e.what();
  }
  return outcome;
}

}  // namespace accel
