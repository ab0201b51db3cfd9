#include "accel/problems.hpp"

#include <cmath>

namespace accel {

std::uint64_t Rng::next() {
  // splitmix64: tiny, well-mixed, and identical everywhere.
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double mag = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * M_PI * u2;
  spare_ = mag * std::sin(ang);
  has_spare_ = true;
  return mag * std::cos(ang);
}

std::vector<double> atan_partial_sums(int n, double z) {
  std::vector<double> x;
  x.reserve(n + 1);
  x.push_back(0.0);
  double zpow = z;
  for (int j = 0; j < n; ++j) {
    const double term = (j % 2 == 0 ? 1.0 : -1.0) * zpow / (2 * j + 1);
    x.push_back(x.back() + term);
    zpow *= z * z;
  }
  return x;
}

Vector bratu_residual(const BratuSpec& spec, const Vector& u) {
  const int nx = spec.nx;
  if (u.size() != spec.dim())
    throw std::logic_error("bratu: dimension mismatch");
  Vector f(u.size());
  for (int row = 0; row < nx; ++row) {
    for (int col = 0; col < nx; ++col) {
      const int i = row * nx + col;
      const double uc = u(i);
      // Unit-spacing lattice Laplacian: keeps the Jacobian A + lambda e^u
      // positive definite with a modest spread, so the mu = 0.1 mixing map
      // contracts.
      double lap = 4.0 * uc;
      if (row > 0) lap -= u(i - nx);
      if (row < nx - 1) lap -= u(i + nx);
      if (col > 0) lap -= u(i - 1);
      if (col < nx - 1) lap -= u(i + 1);
      f(i) = lap + spec.lambda * std::exp(uc);
    }
  }
  return f;
}

CountedMap bratu_map(const BratuSpec& spec) {
  return CountedMap(
      [spec](const Vector& u) { return bratu_residual(spec, u); });
}

Vector bratu_initial_guess(const BratuSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  Vector u(spec.dim());
  for (int i = 0; i < u.size(); ++i) u(i) = rng.uniform();
  return u;
}

std::pair<double, Vector> lj_energy_gradient(const Vector& positions) {
  const int n = static_cast<int>(positions.size()) / 3;
  if (positions.size() != 3 * n)
    throw std::logic_error("lj: coordinate count not a multiple of 3");
  double energy = 0.0;
  Vector grad = Vector::Zero(positions.size());
  for (int i = 1; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      const Eigen::Vector3d d =
          positions.segment<3>(3 * i) - positions.segment<3>(3 * j);
      const double r2 = d.squaredNorm();
      if (r2 <= 1e-16)
        throw CoincidentAtoms("lj: coincident atom pair");
      const double inv2 = 1.0 / r2;
      const double inv6 = inv2 * inv2 * inv2;
      energy += 4.0 * (inv6 * inv6 - inv6);
      // dE/d(d) = (-48 r^-14 + 24 r^-8) d
      const double coeff = (-48.0 * inv6 * inv6 + 24.0 * inv6) * inv2;
      const Eigen::Vector3d gpair = coeff * d;
      grad.segment<3>(3 * i) += gpair;
      grad.segment<3>(3 * j) -= gpair;
    }
  }
  return {energy, grad};
}

CountedMap lj_gradient_map() {
  return CountedMap(
      [](const Vector& x) { return lj_energy_gradient(x).second; });
}

Vector fcc_init(int cells, double perturbation, std::uint64_t seed) {
  const double spacing = std::pow(2.0, 1.0 / 6.0);  // pair equilibrium
  const double a = spacing * std::sqrt(2.0);        // cube edge
  static const double offsets[4][3] = {
      {0.0, 0.0, 0.0}, {0.5, 0.5, 0.0}, {0.5, 0.0, 0.5}, {0.0, 0.5, 0.5}};
  Vector pos(3 * 4 * cells * cells * cells);
  int idx = 0;
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j < cells; ++j)
      for (int k = 0; k < cells; ++k)
        for (const auto& off : offsets) {
          pos(idx++) = a * (i + off[0]);
          pos(idx++) = a * (j + off[1]);
          pos(idx++) = a * (k + off[2]);
        }
  if (perturbation > 0.0) {
    Rng rng(seed);
    const double std_dev = perturbation * spacing;
    for (int i = 0; i < pos.size(); ++i) pos(i) += std_dev * rng.normal();
  }
  return pos;
}

CountedMap fixed_point_wrap(const CountedMap& f, double mu) {
  if (mu == 0.0) throw std::logic_error("fixed_point_wrap: mu = 0");
  return f.derive([fn = f.raw(), mu](const Vector& x) -> Vector {
    return x - mu * fn(x);
  });
}

ConvergenceTrace adapt_gd_solve(const CountedMap& f, const Vector& x0,
                                double mu0, const StoppingRule& stop) {
  ConvergenceTrace trace;
  const long feval_base = f.count();
  Vector x = x0;
  Vector fx = f(x);
  double resnorm = fx.norm();
  const double res0 = resnorm;
  double mu = mu0;
  long j = 0;
  trace.add(j, f.count() - feval_base, resnorm);
  if (res0 <= 0.0) {
    trace.converged = true;
    return trace;
  }
  while (f.count() - feval_base < stop.max_fevals) {
    const Vector x_trial = x - mu * fx;
    const Vector f_trial = f(x_trial);
    const double res_trial = f_trial.norm();
    std::string event;
    if (!(res_trial < resnorm)) {
      mu *= 0.3;  // reject the step and retreat
      event = "shrink";
    } else {
      mu *= 1.05;
      x = x_trial;
      fx = f_trial;
      resnorm = res_trial;
    }
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

LinearProblem make_linear_problem(LinearKind kind, int n, std::uint64_t seed,
                                  double kappa) {
  Rng rng(seed);
  LinearProblem prob;
  switch (kind) {
    case LinearKind::SpdDiag: {
      Vector d(n);
      for (int i = 0; i < n; ++i) {
        // log-spaced spectrum in [1/kappa, 1]
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        d(i) = std::pow(kappa, -1.0 + t);
      }
      prob.solution = Vector(n);
      for (int i = 0; i < n; ++i) prob.solution(i) = 2.0 * rng.uniform() - 1.0;
      prob.b = d.cwiseProduct(prob.solution);
      prob.A = LinearOperator::diagonal(d);
      break;
    }
    case LinearKind::Nonsymmetric: {
      Matrix A(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = 2.0 * rng.uniform() - 1.0;
      // Diagonal shift keeps the matrix comfortably nonsingular.
      A += (2.0 + std::sqrt(static_cast<double>(n))) * Matrix::Identity(n, n);
      prob.solution = Vector(n);
      for (int i = 0; i < n; ++i) prob.solution(i) = 2.0 * rng.uniform() - 1.0;
      prob.b = A * prob.solution;
      prob.A = LinearOperator::dense(std::move(A));
      break;
    }
    case LinearKind::ContractionMap: {
      Matrix M(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = 2.0 * rng.uniform() - 1.0;
      const double radius =
          M.eigenvalues().cwiseAbs().maxCoeff();
      M *= 0.9 / radius;  // spectral radius 0.9
      prob.solution = Vector(n);
      for (int i = 0; i < n; ++i) prob.solution(i) = 2.0 * rng.uniform() - 1.0;
      Matrix A = Matrix::Identity(n, n) - M;
      prob.b = A * prob.solution;
      prob.M = std::move(M);
      prob.A = LinearOperator::dense(std::move(A));
      break;
    }
  }
  return prob;
}

}  // namespace accel
