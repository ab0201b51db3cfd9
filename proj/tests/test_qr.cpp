#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "accel/problems.hpp"
#include "accel/qr.hpp"

using namespace accel;

namespace {

QRFactors empty_factors(int n, int capacity) {
  QRFactors qr;
  qr.Q = Matrix(n, 0);
  qr.R = Matrix(0, 0);
  qr.capacity = capacity;
  return qr;
}

QRFactors factor(const Matrix& F) {
  QRFactors qr = empty_factors(static_cast<int>(F.rows()),
                               static_cast<int>(F.cols()));
  for (int j = 0; j < F.cols(); ++j) mgs_insert(qr, F.col(j));
  return qr;
}

Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = 2.0 * rng.uniform() - 1.0;
  return m;
}

double orthonormality_error(const QRFactors& qr) {
  const Matrix I = Matrix::Identity(qr.cols(), qr.cols());
  return (qr.Q.transpose() * qr.Q - I).cwiseAbs().maxCoeff();
}

// Columnwise comparison that tolerates opposite signs.
double max_column_deviation(const Matrix& A, const Matrix& B) {
  double worst = 0.0;
  for (int j = 0; j < A.cols(); ++j) {
    const double same = (A.col(j) - B.col(j)).cwiseAbs().maxCoeff();
    const double flip = (A.col(j) + B.col(j)).cwiseAbs().maxCoeff();
    worst = std::max(worst, std::min(same, flip));
  }
  return worst;
}

}  // namespace

TEST_CASE("mgs_insert normalizes the first column") {
  QRFactors qr = empty_factors(2, 4);
  Vector v(2);
  v << 3.0, 4.0;
  const InsertResult res = mgs_insert(qr, v);
  CHECK(qr.cols() == 1);
  CHECK(qr.Q(0, 0) == doctest::Approx(0.6));
  CHECK(qr.Q(1, 0) == doctest::Approx(0.8));
  CHECK(qr.R(0, 0) == doctest::Approx(5.0));
  CHECK(res.norm == doctest::Approx(5.0));
}

TEST_CASE("mgs_insert rejects a dependent column") {
  QRFactors qr = empty_factors(2, 4);
  Vector e1 = Vector::Unit(2, 0);
  mgs_insert(qr, e1);
  CHECK_THROWS_AS(mgs_insert(qr, e1), NearBreakdown);
}

TEST_CASE("mgs_insert orthogonalizes against the basis") {
  QRFactors qr = empty_factors(2, 4);
  mgs_insert(qr, Vector::Unit(2, 0));
  Vector v(2);
  v << 1.0, 1.0;
  mgs_insert(qr, v);
  CHECK(qr.Q(0, 1) == doctest::Approx(0.0));
  CHECK(qr.Q(1, 1) == doctest::Approx(1.0));
  CHECK(qr.R(0, 1) == doctest::Approx(1.0));
  CHECK(qr.R(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("givens_downdate removes the oldest column") {
  Matrix F(2, 2);
  F << 1.0, 0.0, 0.0, 1.0;
  QRFactors qr = factor(F);
  givens_downdate(qr);
  CHECK(qr.cols() == 1);
  CHECK(qr.Q(0, 0) == doctest::Approx(0.0));
  CHECK(qr.Q(1, 0) == doctest::Approx(1.0));
  CHECK(qr.R(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("givens_downdate matches a from-scratch factorization") {
  const Matrix F = random_matrix(6, 3, 11);
  QRFactors qr = factor(F);
  givens_downdate(qr);
  const QRFactors fresh = factor(F.rightCols(2));
  CHECK(max_column_deviation(qr.Q, fresh.Q) <= 1e-12);
  CHECK((qr.Q * qr.R - F.rightCols(2)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("two successive downdates leave the last column") {
  const Matrix F = random_matrix(6, 3, 12);
  QRFactors qr = factor(F);
  givens_downdate(qr);
  givens_downdate(qr);
  CHECK(qr.cols() == 1);
  const Vector expect = F.col(2) / F.col(2).norm();
  CHECK(max_column_deviation(qr.Q, expect) <= 1e-12);
  CHECK(qr.R(0, 0) == doctest::Approx(F.col(2).norm()));
}

TEST_CASE("cholesky_downdate is the identity on an orthogonal deletion") {
  // First column orthogonal to the rest: the correction vector s vanishes
  // and the trailing factors survive unchanged.
  Matrix F(4, 3);
  F.setZero();
  F(0, 0) = 2.0;
  F(1, 1) = 1.0;
  F(2, 1) = 1.0;
  F(3, 2) = 3.0;
  QRFactors qr = factor(F);
  const Matrix Qm = qr.Q.rightCols(2);
  const Matrix Rm = qr.R.block(1, 1, 2, 2);
  cholesky_downdate(qr);
  CHECK((qr.Q - Qm).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((qr.R - Rm).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("cholesky_downdate agrees with givens_downdate") {
  const Matrix F = random_matrix(6, 3, 13);
  QRFactors a = factor(F);
  QRFactors b = factor(F);
  givens_downdate(a);
  cholesky_downdate(b);
  CHECK(max_column_deviation(a.Q, b.Q) <= 1e-12);
  CHECK((b.Q * b.R - F.rightCols(2)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(orthonormality_error(b) <= 1e-12);
}

TEST_CASE("polar_downdate keeps the trailing factors when s vanishes") {
  Matrix F(4, 3);
  F.setZero();
  F(0, 0) = 2.0;
  F(1, 1) = 1.0;
  F(2, 1) = 1.0;
  F(3, 2) = 3.0;
  QRFactors qr = factor(F);
  const Matrix Qm = qr.Q.rightCols(2);
  const Matrix Rm = qr.R.block(1, 1, 2, 2);
  const DowndateFactors f = polar_downdate(qr);
  CHECK(f.s.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((qr.Q - Qm).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((qr.R - Rm).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("polar_downdate produces orthonormal columns and invertible S") {
  const Matrix F = random_matrix(6, 3, 14);
  QRFactors qr = factor(F);
  const Matrix Rm = qr.R.block(1, 1, 2, 2);  // triangular factor pre-deletion
  const DowndateFactors f = polar_downdate(qr);
  CHECK(orthonormality_error(qr) <= 1e-12);
  CHECK_FALSE(qr.triangular);
  // S^{-1} = R_-^{-1} (I - beta s s^T) from the returned scalars.
  const Matrix I = Matrix::Identity(2, 2);
  const Matrix S_inv =
      Rm.inverse() * (I - f.beta * f.s * f.s.transpose());
  CHECK((qr.R * S_inv - I).cwiseAbs().maxCoeff() <= 1e-12);
  // The product still reproduces the deleted matrix.
  CHECK((qr.Q * qr.R - F.rightCols(2)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("fractional_identity_powers closed forms") {
  const auto [a0, b0] = fractional_identity_powers(Vector::Zero(3));
  CHECK(a0 == doctest::Approx(0.5));
  CHECK(b0 == doctest::Approx(0.5));

  Vector s(2);
  s << 1.0, 0.0;
  const auto [a1, b1] = fractional_identity_powers(s);
  CHECK(a1 == doctest::Approx(1.0 / (1.0 + std::sqrt(2.0))));
  CHECK(b1 == doctest::Approx(1.0 / (2.0 + std::sqrt(2.0))));
}

TEST_CASE("fractional power identities hold for random vectors") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    Vector s(3);
    for (int i = 0; i < 3; ++i) s(i) = 2.0 * rng.uniform() - 1.0;
    const auto [alpha, beta] = fractional_identity_powers(s);
    const Matrix I = Matrix::Identity(3, 3);
    const Matrix sqrt_m = I + alpha * s * s.transpose();
    const Matrix inv_sqrt = I - beta * s * s.transpose();
    CHECK((sqrt_m * sqrt_m - (I + s * s.transpose())).cwiseAbs().maxCoeff() <=
          1e-13);
    CHECK((inv_sqrt * sqrt_m - I).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("solve_regularized_normal closed forms") {
  Matrix F(2, 1);
  F << 1.0, 0.0;
  Vector rhs = Vector::Unit(2, 0);
  CHECK(solve_regularized_normal(F, rhs, 0.0)(0) == doctest::Approx(1.0));
  CHECK(solve_regularized_normal(F, rhs, 1.0)(0) == doctest::Approx(0.5));

  Matrix dup(3, 2);
  dup.col(0) = Vector::Ones(3);
  dup.col(1) = Vector::Ones(3);
  CHECK_THROWS_AS(solve_regularized_normal(dup, Vector::Ones(3), 0.0),
                  SingularSystem);
}

TEST_CASE("lstsq_qr solves the triangular system") {
  QRFactors qr = empty_factors(2, 2);
  Vector v(2);
  v << 2.0, 0.0;
  mgs_insert(qr, v);  // Q = e1, R = [2]
  Vector rhs(2);
  rhs << 4.0, 0.0;
  CHECK(lstsq_qr(qr, rhs)(0) == doctest::Approx(2.0));
}

TEST_CASE("lstsq_qr matches the normal equations") {
  const Matrix F = random_matrix(4, 2, 15);
  QRFactors qr = factor(F);
  Rng rng(16);
  Vector rhs(4);
  for (int i = 0; i < 4; ++i) rhs(i) = 2.0 * rng.uniform() - 1.0;
  const Vector a = lstsq_qr(qr, rhs);
  const Vector b = solve_regularized_normal(F, rhs, 0.0);
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("lstsq_qr returns zero for an orthogonal right-hand side") {
  QRFactors qr = empty_factors(3, 2);
  mgs_insert(qr, Vector::Unit(3, 0));
  mgs_insert(qr, Vector::Unit(3, 1));
  const Vector gamma = lstsq_qr(qr, Vector::Unit(3, 2));
  CHECK(gamma.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("orthonormality survives mixed insert and downdate sequences") {
  Rng rng(21);
  QRFactors qr = empty_factors(8, 4);
  auto random_col = [&] {
    Vector v(8);
    for (int i = 0; i < 8; ++i) v(i) = 2.0 * rng.uniform() - 1.0;
    return v;
  };
  for (int step = 0; step < 30; ++step) {
    if (qr.cols() >= 4 || (qr.cols() >= 2 && step % 3 == 0)) {
      if (step % 2 == 0)
        givens_downdate(qr);
      else
        cholesky_downdate(qr);
    }
    mgs_insert(qr, random_col());
    CHECK(orthonormality_error(qr) <= 1e-12);
  }
}

TEST_CASE("full-window factorization reproduces the inserted matrix") {
  const Matrix F = random_matrix(10, 5, 22);
  QRFactors qr = factor(F);
  CHECK((qr.Q * qr.R - F).cwiseAbs().maxCoeff() <=
        1e-10 * F.cwiseAbs().maxCoeff());
  CHECK(orthonormality_error(qr) <= 1e-12);
}

TEST_CASE("downdate backends agree on a wider window") {
  const Matrix F = random_matrix(8, 4, 23);
  QRFactors a = factor(F);
  QRFactors b = factor(F);
  givens_downdate(a);
  cholesky_downdate(b);
  CHECK(max_column_deviation(a.Q, b.Q) <= 1e-11);
  CHECK(max_column_deviation(a.R, b.R) <= 1e-11);
}
