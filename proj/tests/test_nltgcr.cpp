#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "accel/nltgcr.hpp"
#include "accel/problems.hpp"

using namespace accel;

namespace {

Vector random_vector(int n, std::uint64_t seed) {
  Rng rng(seed);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = 2.0 * rng.uniform() - 1.0;
  return v;
}

// Paired directions with orthonormal v columns and arbitrary p columns.
PairedDirections random_pairs(int n, int k, std::uint64_t seed) {
  Matrix V(n, k);
  for (int i = 0; i < k; ++i) V.col(i) = random_vector(n, seed + i);
  const Matrix Q = Eigen::HouseholderQR<Matrix>(V).householderQ() *
                   Matrix::Identity(n, k);
  PairedDirections dirs;
  dirs.capacity = 0;
  for (int i = 0; i < k; ++i)
    dirs.push(random_vector(n, seed + 50 + i), Q.col(i));
  return dirs;
}

struct AffineResidual {
  Matrix A;
  Vector b;
  CountedMap map() const {
    return CountedMap(
        [A = A, b = b](const Vector& x) -> Vector { return A * x - b; });
  }
};

AffineResidual spd_affine(int n, std::uint64_t seed, double kappa) {
  const LinearProblem prob = make_linear_problem(LinearKind::SpdDiag, n, seed,
                                                 kappa);
  Matrix A(n, n);
  for (int i = 0; i < n; ++i) A.col(i) = prob.A(Vector::Unit(n, i));
  return {std::move(A), prob.b};
}

}  // namespace

TEST_CASE("deviation indicator separates aligned and misaligned residuals") {
  Vector r(2), o(2);
  r << 1.0, 0.0;
  o << 0.0, 3.0;
  CHECK(residual_deviation(2.0 * r, r) == doctest::Approx(0.0));
  CHECK(residual_deviation(o, r) == doctest::Approx(1.0));
  CHECK(residual_deviation(-r, r) == doctest::Approx(2.0));
  CHECK(residual_deviation(Vector::Zero(2), r) == 2.0);
  CHECK(linear_mode_ok(1.001 * r, r, 0.01));
  CHECK_FALSE(linear_mode_ok(o, r, 0.01));
  CHECK_FALSE(linear_mode_ok(Vector::Zero(2), r, 0.5));
}

TEST_CASE("window view maps search data like an inverse Jacobian") {
  const PairedDirections dirs = random_pairs(6, 3, 11);
  const Matrix G = multisecant_view_dense(dirs);
  for (int i = 0; i < 3; ++i) {
    CHECK((G * dirs.V[i] - dirs.P[i]).norm() <= 1e-12);
    CHECK((multisecant_view_apply(dirs, dirs.V[i]) - dirs.P[i]).norm() <=
          1e-12);
  }
  // Directions outside the captured subspace are annihilated.
  Vector q = random_vector(6, 12);
  for (int i = 0; i < 3; ++i) q -= dirs.V[i].dot(q) * dirs.V[i];
  CHECK((G * q).norm() <= 1e-12 * std::max(1.0, q.norm()));
  CHECK_THROWS_AS(multisecant_view_dense(PairedDirections{}), std::logic_error);
}

TEST_CASE("window view is Frobenius-minimal among secant-compatible maps") {
  const PairedDirections dirs = random_pairs(6, 3, 21);
  const Matrix G = multisecant_view_dense(dirs);
  Matrix V(6, 3);
  for (int i = 0; i < 3; ++i) V.col(i) = dirs.V[i];
  const Matrix proj = Matrix::Identity(6, 6) - V * V.transpose();
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Matrix Y(6, 6);
    for (int i = 0; i < 6; ++i) Y.row(i) = random_vector(6, seed * 7 + i);
    const Matrix Z = Y * proj;  // Z V = 0 keeps G V = P intact
    REQUIRE((Z * V).norm() <= 1e-12 * Y.norm());
    CHECK(G.norm() <= (G + Z).norm() + 1e-12);
  }
}

TEST_CASE("starting at the root converges without taking a step") {
  CountedMap f([](const Vector& x) -> Vector { return x; });
  const auto trace = nltgcr_solve(f, Vector::Zero(4), NLTGCRConfig{},
                                  StoppingRule{});
  CHECK(trace.converged);
  CHECK(trace.records.size() == 1);
}

TEST_CASE("nonlinear mode reproduces the linear solver on affine residuals") {
  AffineResidual aff = spd_affine(20, 31, 50.0);
  const Vector x0 = random_vector(20, 32);

  NLTGCRConfig cfg;
  cfg.window = 0;
  cfg.frechet_eps = 1.0;  // exact Jacobian action on an affine map
  NLTGCRDiagnostics diag;
  nltgcr_solve(aff.map(), x0, cfg, StoppingRule{1e-10, 200}, &diag);

  LinearOperator op = LinearOperator::dense(aff.A);
  std::vector<Vector> iterates;
  tgcr_solve(op, aff.b, x0, 0, StoppingRule{1e-10, 200}, &iterates);

  const size_t count = std::min(diag.iterates.size(), iterates.size());
  REQUIRE(count >= 5);
  for (size_t j = 0; j < count; ++j)
    CHECK((diag.iterates[j] - iterates[j]).norm() <=
          1e-10 * std::max(1.0, iterates[j].norm()));
}

TEST_CASE("linear mode matches too and reports fewer function calls") {
  AffineResidual aff = spd_affine(20, 41, 50.0);
  const Vector x0 = random_vector(20, 42);

  NLTGCRConfig cfg;
  cfg.window = 0;
  cfg.mode = NLTGCRMode::Linear;
  cfg.restart_period = 1000;
  cfg.restart_decrease = 0.0;
  cfg.frechet_eps = 1.0;
  NLTGCRDiagnostics diag;
  const auto lin_trace =
      nltgcr_solve(aff.map(), x0, cfg, StoppingRule{1e-9, 200}, &diag);

  cfg.mode = NLTGCRMode::Nonlinear;
  const auto nl_trace =
      nltgcr_solve(aff.map(), x0, cfg, StoppingRule{1e-9, 200});

  LinearOperator op = LinearOperator::dense(aff.A);
  std::vector<Vector> iterates;
  tgcr_solve(op, aff.b, x0, 0, StoppingRule{1e-9, 200}, &iterates);

  const size_t count = std::min(diag.iterates.size(), iterates.size());
  REQUIRE(count >= 5);
  for (size_t j = 0; j < count; ++j)
    CHECK((diag.iterates[j] - iterates[j]).norm() <=
          1e-9 * std::max(1.0, iterates[j].norm()));
  CHECK(lin_trace.converged);
  // Propagated residuals skip one evaluation per step.
  CHECK(lin_trace.final_fevals() < nl_trace.final_fevals());
}

TEST_CASE("adaptive mode detects an affine residual and switches") {
  AffineResidual aff = spd_affine(15, 51, 20.0);
  NLTGCRConfig cfg;
  cfg.mode = NLTGCRMode::Adaptive;
  const auto trace = nltgcr_solve(aff.map(), random_vector(15, 52), cfg,
                                  StoppingRule{1e-10, 300});
  CHECK(trace.converged);
  bool switched = false;
  for (const auto& rec : trace.records)
    switched |= rec.event.find("mode-switch-lin") != std::string::npos;
  CHECK(switched);
}

TEST_CASE("projection coefficients shrink to the newest direction") {
  // In exact arithmetic the residual is orthogonal to all previous v
  // columns, so only the last entry of each projection vector is large.
  AffineResidual aff = spd_affine(20, 61, 10.0);
  NLTGCRConfig cfg;
  cfg.window = 0;
  cfg.frechet_eps = 1.0;
  NLTGCRDiagnostics diag;
  nltgcr_solve(aff.map(), random_vector(20, 62), cfg, StoppingRule{1e-8, 100},
               &diag);
  const double r0 = diag.residuals.front().norm();
  REQUIRE(diag.ys.size() >= 5);
  for (const Vector& y : diag.ys)
    for (int i = 0; i + 1 < y.size(); ++i)
      CHECK(std::abs(y(i)) <= 1e-10 * r0);
}

TEST_CASE("truncated nonlinear mode solves a mildly nonlinear problem") {
  BratuSpec spec;
  spec.nx = 20;
  const CountedMap f = bratu_map(spec);
  NLTGCRConfig cfg;
  cfg.window = 5;
  const auto trace = nltgcr_solve(f, bratu_initial_guess(spec, 5), cfg,
                                  StoppingRule{1e-10, 500});
  CHECK(trace.converged);
  CHECK(trace.final_fevals() <= 500);
}
