#include "accel/qr.hpp"

#include <cmath>

namespace accel {

namespace {

constexpr double kBreakdownRel = 1e-14;

// Flip signs so that diagonal entries of R are nonnegative. Keeps the
// factorization valid: Q column i and R row i change sign together.
void enforce_nonnegative_diagonal(QRFactors& qr) {
  if (!qr.triangular) return;
  for (int i = 0; i < qr.cols(); ++i) {
    if (qr.R(i, i) < 0.0) {
      qr.R.row(i) = -qr.R.row(i);
      qr.Q.col(i) = -qr.Q.col(i);
    }
  }
}

}  // namespace

InsertResult mgs_insert(QRFactors& qr, const Vector& v) {
  const int k = qr.cols();
  if (k >= qr.capacity)
    throw std::logic_error("mgs_insert: factorization is at capacity");
  const double vnorm = v.norm();

  Vector w = v;
  Vector h = Vector::Zero(k);
  for (int i = 0; i < k; ++i) {
    const double c = qr.Q.col(i).dot(w);
    h(i) += c;
    w -= c * qr.Q.col(i);
  }
  // Twice-is-enough reorthogonalization on severe cancellation.
  if (k > 0 && w.norm() < vnorm / std::sqrt(2.0)) {
    for (int i = 0; i < k; ++i) {
      const double c = qr.Q.col(i).dot(w);
      h(i) += c;
      w -= c * qr.Q.col(i);
    }
  }
  const double rho = w.norm();
  if (rho <= kBreakdownRel * vnorm)
    throw NearBreakdown("mgs_insert: new column is numerically dependent");

  const int n = static_cast<int>(v.size());
  qr.Q.conservativeResize(n, k + 1);
  qr.Q.col(k) = w / rho;
  Matrix newR = Matrix::Zero(k + 1, k + 1);
  newR.topLeftCorner(k, k) = qr.R;
  newR.block(0, k, k, 1) = h;
  newR(k, k) = rho;
  qr.R = std::move(newR);
  return {h, rho};
}

void givens_downdate(QRFactors& qr) {
  const int k = qr.cols();
  if (k < 2) throw std::logic_error("givens_downdate: need at least 2 columns");
  if (!qr.triangular)
    throw std::logic_error("givens_downdate: factor is not triangular");

  // H = R with its first column deleted (k x (k-1), upper Hessenberg).
  Matrix H = qr.R.rightCols(k - 1);
  Matrix Q = qr.Q;
  for (int i = 0; i < k - 1; ++i) {
    const double a = H(i, i);
    const double b = H(i + 1, i);
    const double r = std::hypot(a, b);
    if (r == 0.0) continue;
    const double c = a / r;
    const double s = b / r;
    // Rotate rows i, i+1 of H and the matching columns of Q (Q <- Q G^T).
    for (int j = i; j < k - 1; ++j) {
      const double hi = H(i, j), hk = H(i + 1, j);
      H(i, j) = c * hi + s * hk;
      H(i + 1, j) = -s * hi + c * hk;
    }
    Vector qi = Q.col(i);
    Q.col(i) = c * qi + s * Q.col(i + 1);
    Q.col(i + 1) = -s * qi + c * Q.col(i + 1);
  }
  qr.Q = Q.leftCols(k - 1);
  qr.R = H.topRows(k - 1);
  enforce_nonnegative_diagonal(qr);
}

namespace {

// Structured Cholesky G G^T = I + s s^T. The strictly lower part of
// column j of the unit-triangular L factor is c_j * s_{j+1:end}.
Matrix rank_one_identity_cholesky(const Vector& s) {
  const int n = static_cast<int>(s.size());
  Matrix G = Matrix::Zero(n, n);
  double t = 0.0;  // running sum of d_k c_k^2
  Vector c(n), d(n);
  for (int j = 0; j < n; ++j) {
    d(j) = 1.0 + s(j) * s(j) * (1.0 - t);
    c(j) = s(j) * (1.0 - t) / d(j);
    t += d(j) * c(j) * c(j);
  }
  for (int j = 0; j < n; ++j) {
    const double sd = std::sqrt(d(j));
    G(j, j) = sd;
    for (int i = j + 1; i < n; ++i) G(i, j) = c(j) * s(i) * sd;
  }
  return G;
}

struct DeletionParts {
  Vector q1;
  Matrix Qm;      // columns 2..k of Q
  Matrix Rm;      // trailing (k-1) x (k-1) triangular block of R
  Vector s;       // solves Rm^T s = h1
};

DeletionParts deletion_parts(const QRFactors& qr) {
  const int k = qr.cols();
  if (k < 2) throw std::logic_error("downdate: need at least 2 columns");
  DeletionParts p;
  p.q1 = qr.Q.col(0);
  p.Qm = qr.Q.rightCols(k - 1);
  p.Rm = qr.R.block(1, 1, k - 1, k - 1);
  const Vector h1 = qr.R.row(0).segment(1, k - 1).transpose();
  if (qr.triangular) {
    for (int i = 0; i < k - 1; ++i)
      if (std::abs(p.Rm(i, i)) <= kBreakdownRel * qr.R.cwiseAbs().maxCoeff())
        throw NearBreakdown("downdate: R block is numerically singular");
    p.s = p.Rm.transpose().triangularView<Eigen::Lower>().solve(h1);
  } else {
    Eigen::FullPivLU<Matrix> lu(p.Rm.transpose());
    if (!lu.isInvertible())
      throw NearBreakdown("downdate: R block is numerically singular");
    p.s = lu.solve(h1);
  }
  return p;
}

}  // namespace

void cholesky_downdate(QRFactors& qr) {
  DeletionParts p = deletion_parts(qr);
  const Matrix G = rank_one_identity_cholesky(p.s);
  // Q <- (Q_- + q1 s^T) G^{-T}, R <- G^T R_-.
  Matrix Qn = p.Qm + p.q1 * p.s.transpose();
  Qn = G.triangularView<Eigen::Lower>()
           .solve(Qn.transpose())
           .transpose();
  qr.Q = Qn;
  qr.R = G.transpose() * p.Rm;
  enforce_nonnegative_diagonal(qr);
}

DowndateFactors polar_downdate(QRFactors& qr) {
  DeletionParts p = deletion_parts(qr);
  DowndateFactors f;
  f.s = p.s;
  f.lambda = 1.0 + p.s.squaredNorm();
  std::tie(f.alpha, f.beta) = fractional_identity_powers(p.s);

  const Matrix M = p.Qm + p.q1 * p.s.transpose();
  // (I + ss^T)^{-1/2} = I - beta ss^T applied on the right.
  qr.Q = M - f.beta * (M * p.s) * p.s.transpose();
  // S = (I + ss^T)^{1/2} R_- = R_- + alpha s (s^T R_-).
  qr.R = p.Rm + f.alpha * p.s * (p.s.transpose() * p.Rm);
  qr.triangular = false;
  return f;
}

std::pair<double, double> fractional_identity_powers(const Vector& s) {
  const double lambda = 1.0 + s.squaredNorm();
  const double rt = std::sqrt(lambda);
  return {1.0 / (1.0 + rt), 1.0 / (lambda + rt)};
}

Vector solve_regularized_normal(const Matrix& F, const Vector& rhs,
                                double tau_reg) {
  Matrix N = F.transpose() * F;
  N.diagonal().array() += tau_reg;
  Eigen::LDLT<Matrix> ldlt(N);
  const Vector d = ldlt.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  if (tau_reg == 0.0 &&
      (ldlt.info() != Eigen::Success || d.minCoeff() <= 1e-13 * dmax))
    throw SingularSystem("solve_regularized_normal: F^T F singular");
  return ldlt.solve(F.transpose() * rhs);
}

Vector lstsq_qr(const QRFactors& qr, const Vector& rhs) {
  if (qr.empty()) throw std::logic_error("lstsq_qr: empty factorization");
  const Vector eta = qr.Q.transpose() * rhs;
  if (qr.triangular) {
    const double rmax = qr.R.cwiseAbs().maxCoeff();
    for (int i = 0; i < qr.cols(); ++i)
      if (std::abs(qr.R(i, i)) <= 1e-14 * std::max(rmax, 1.0))
        throw SingularSystem("lstsq_qr: zero diagonal in R");
    return qr.R.triangularView<Eigen::Upper>().solve(eta);
  }
  Eigen::PartialPivLU<Matrix> lu(qr.R);
  return lu.solve(eta);
}

}  // namespace accel
