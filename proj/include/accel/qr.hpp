#ifndef ACCEL_QR_HPP
#define ACCEL_QR_HPP

#include "accel/types.hpp"

namespace accel {

/// Evolving thin QR factorization with orthonormal Q (n x k) and square
/// R (k x k). R stays upper triangular under inserts and the Givens /
/// Cholesky downdates; the polar downdate leaves a non-triangular factor
/// (see polar_downdate).
struct QRFactors {
  Matrix Q;           // n x k, orthonormal columns
  Matrix R;           // k x k
  int capacity = 0;   // maximum column count
  bool triangular = true;

  int cols() const { return static_cast<int>(Q.cols()); }
  int rows() const { return static_cast<int>(Q.rows()); }
  bool empty() const { return Q.cols() == 0; }
};

/// Scalars of the structured fractional powers of I + s s^T:
/// (I+ss^T)^{1/2} = I + alpha ss^T and (I+ss^T)^{-1/2} = I - beta ss^T.
struct DowndateFactors {
  Vector s;
  double lambda = 1.0;  // 1 + s^T s
  double alpha = 0.5;   // 1 / (1 + sqrt(lambda))
  double beta = 0.5;    // 1 / (lambda + sqrt(lambda))
};

struct InsertResult {
  Vector coeffs;  // projections h onto the existing basis
  double norm;    // post-orthogonalization norm rho
};

/// Appends one column by modified Gram-Schmidt (with a single
/// reorthogonalization pass when cancellation is detected). R gains the
/// column (h; rho). Throws NearBreakdown when the column is numerically
/// dependent on the basis.
InsertResult mgs_insert(QRFactors& qr, const Vector& v);

/// Replaces the factors with those of the matrix whose oldest (first)
/// column was deleted, by Givens rotations on the Hessenberg remainder.
void givens_downdate(QRFactors& qr);

/// Same deletion via the structured Cholesky factorization of I + ss^T.
/// Result agrees with givens_downdate up to column signs.
void cholesky_downdate(QRFactors& qr);

/// Same deletion via the polar decomposition: Q orthonormal but
/// S = (I+ss^T)^{1/2} R no longer triangular. Returns the scalars needed
/// to apply S^{-1} = R^{-1}(I - beta ss^T).
DowndateFactors polar_downdate(QRFactors& qr);

/// alpha, beta of the identities above, with lambda = 1 + s^T s.
std::pair<double, double> fractional_identity_powers(const Vector& s);

/// Solves (F^T F + tau I) gamma = F^T rhs by a symmetric factorization.
Vector solve_regularized_normal(const Matrix& F, const Vector& rhs,
                                double tau_reg);

/// gamma = R^{-1} Q^T rhs. Uses back-substitution when the factor is
/// triangular, a dense solve otherwise (polar factors).
Vector lstsq_qr(const QRFactors& qr, const Vector& rhs);

}  // namespace accel

#endif  // ACCEL_QR_HPP
