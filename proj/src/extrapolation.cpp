#include "accel/extrapolation.hpp"

#include <cmath>

namespace accel {

namespace {

double entry_norm(double x) { return std::abs(x); }
double entry_norm(const Vector& x) { return x.norm(); }

double rhombus_inverse(double x) { return 1.0 / x; }
Vector rhombus_inverse(const Vector& x) { return samelson_inverse(x); }

double zero_like(double) { return 0.0; }
Vector zero_like(const Vector& x) { return Vector::Zero(x.size()); }

}  // namespace

double aitken_scalar(double x0, double x1, double x2) {
  const double d2 = x2 - 2.0 * x1 + x0;
  const double scale =
      std::max({std::abs(x0), std::abs(x1), std::abs(x2), 1.0});
  if (std::abs(d2) <= 1e-14 * scale)
    throw DegenerateDenominator("aitken: vanishing second difference");
  const double d1 = x1 - x0;
  return x0 - d1 * d1 / d2;
}

double steffensen_step(const std::function<double(double)>& f, double x) {
  const double fx = f(x);
  if (fx == 0.0) return x;
  const double d = (f(x + fx) - fx) / fx;
  if (std::abs(d) <= 1e-14 * std::max(1.0, std::abs(x)))
    throw DegenerateDenominator("steffensen: vanishing difference quotient");
  return x - fx / d;
}

Vector samelson_inverse(const Vector& x) {
  const double n2 = x.squaredNorm();
  if (n2 == 0.0) throw DegenerateDenominator("samelson inverse of zero");
  return x / n2;
}

template <class T>
void EpsilonTable<T>::push(const T& x_new) {
  std::vector<T> next;
  std::vector<char> next_frozen;
  next.reserve(diag_.size() + 1);
  next.push_back(x_new);
  next_frozen.push_back(0);
  const int kmax =
      std::min(static_cast<int>(diag_.size()), max_order_);
  for (int m = 1; m <= kmax; ++m) {
    // A frozen column is always at the tail; carry it unchanged and stop.
    if (m < static_cast<int>(diag_.size()) && frozen_[m]) {
      next.push_back(diag_[m]);
      next_frozen.push_back(1);
      break;
    }
    const T diff = next[m - 1] - diag_[m - 1];
    const double scale = 1.0 + entry_norm(diag_[m - 1]);
    if (entry_norm(diff) <= 1e-14 * scale) {
      // Saturated: carry the previous value for this column and freeze.
      if (m < static_cast<int>(diag_.size())) {
        next.push_back(diag_[m]);
        next_frozen.push_back(1);
      } else {
        next.push_back(next[m - 1]);
        next_frozen.push_back(1);
      }
      break;
    }
    const T below = (m >= 2) ? diag_[m - 2] : zero_like(x_new);
    next.push_back(below + rhombus_inverse(diff));
    next_frozen.push_back(0);
  }
  diag_ = std::move(next);
  frozen_ = std::move(next_frozen);
}

template class EpsilonTable<double>;
template class EpsilonTable<Vector>;

double shanks_oracle(const std::vector<double>& seq, int j, int m) {
  if (j + 2 * m >= static_cast<int>(seq.size()))
    throw std::logic_error("shanks_oracle: sequence too short");
  const int k = m + 1;
  Matrix num(k, k), den(k, k);
  for (int c = 0; c < k; ++c) {
    num(0, c) = seq[j + c];
    den(0, c) = 1.0;
    for (int r = 1; r < k; ++r) {
      // row r holds first differences starting at index j + r - 1.
      const int i = j + r - 1 + c;
      num(r, c) = den(r, c) = seq[i + 1] - seq[i];
    }
  }
  const double d = den.determinant();
  const double scale = den.cwiseAbs().maxCoeff();
  if (std::abs(d) <= 1e-14 * std::max(1.0, std::pow(scale, k)))
    throw DegenerateDenominator("shanks: singular denominator");
  return num.determinant() / d;
}

Matrix SequenceWindow::dX() const {
  const int m1 = static_cast<int>(iterates.size()) - 1;
  Matrix d(iterates[0].size(), m1);
  for (int i = 0; i < m1; ++i) d.col(i) = iterates[i + 1] - iterates[i];
  return d;
}

Matrix SequenceWindow::d2X() const {
  const Matrix d = dX();
  return d.rightCols(d.cols() - 1) - d.leftCols(d.cols() - 1);
}

namespace {

// Least-squares via column-pivoted QR with a relative rank tolerance.
Vector rank_checked_lstsq(const Matrix& A, const Vector& rhs) {
  Eigen::ColPivHouseholderQR<Matrix> qr(A);
  qr.setThreshold(1e-12);
  if (qr.rank() < A.cols())
    throw RankDeficient("extrapolation window is rank deficient");
  return qr.solve(rhs);
}

}  // namespace

ExtrapolationResult rre(const SequenceWindow& window, RREForm form) {
  const int m = window.order();
  if (m < 1) throw std::logic_error("rre: need at least 3 iterates");
  const Matrix dx = window.dX();
  const Matrix dx0 = dx.leftCols(m);
  const Matrix d2 = window.d2X();
  if (form == RREForm::UpdateToFirst) {
    const Vector beta = -rank_checked_lstsq(d2, dx.col(0));
    return {window.iterates[0] + dx0 * beta, beta};
  }
  // Same minimization shifted to the latest iterate: with y = x_m + dX0 g
  // the linearized residual is dx_m + d2X g, and g = beta - ones.
  const Vector gamma = -rank_checked_lstsq(d2, dx.col(m));
  return {window.iterates[m] + dx0 * gamma, gamma};
}

Vector mpe(const SequenceWindow& window) {
  const int m = window.order();
  if (m < 1) throw std::logic_error("mpe: need at least 3 iterates");
  const Matrix dx = window.dX();
  const Matrix dx0 = dx.leftCols(m);
  const Matrix d2 = window.d2X();
  const Matrix A = dx0.transpose() * d2;
  Eigen::FullPivLU<Matrix> lu(A);
  if (!lu.isInvertible())
    throw RankDeficient("mpe: Galerkin system is singular");
  const Vector beta = -lu.solve(dx0.transpose() * dx.col(0));
  return window.iterates[0] + dx0 * beta;
}

Vector mmpe(const SequenceWindow& window, const Matrix& W) {
  const int m = window.order();
  if (m < 1) throw std::logic_error("mmpe: need at least 3 iterates");
  const Matrix dx = window.dX();
  const Matrix dx0 = dx.leftCols(m);
  const Matrix d2 = window.d2X();
  const Matrix A = W.transpose() * d2;
  Eigen::FullPivLU<Matrix> lu(A);
  if (!lu.isInvertible())
    throw SingularSystem("mmpe: projected system is singular");
  const Vector beta = lu.solve(W.transpose() * dx.col(0));
  return window.iterates[0] - dx0 * beta;
}

ConvergenceTrace restarted_rre_solve(const CountedMap& g, const Vector& x0,
                                     int m, double beta,
                                     const StoppingRule& stop) {
  ConvergenceTrace trace;
  Vector x = x0;
  long iter = 0;
  const long feval_base = g.count();
  double res0 = -1.0;

  while (true) {
    SequenceWindow window;
    window.iterates.push_back(x);
    bool cycle_done = false;
    for (int j = 0; j <= m; ++j) {
      const Vector xn = g(window.iterates.back());
      const double resnorm = (xn - window.iterates.back()).norm();
      if (res0 < 0.0) res0 = resnorm;
      window.iterates.push_back(xn);
      trace.add(iter++, g.count() - feval_base, resnorm);
      if (resnorm <= stop.tol * res0) {
        trace.converged = true;
        return trace;
      }
      if (res0 > 0.0 && resnorm >= 1e6 * res0) trace.diverged = true;
      if (g.count() - feval_base >= stop.max_fevals) {
        cycle_done = true;
        break;
      }
    }
    if (cycle_done) return trace;

    // Extrapolate; on rank deficiency shrink the window and retry.
    bool advanced = false;
    SequenceWindow w = window;
    while (w.order() >= 1) {
      try {
        const auto [y, gamma] = rre(w, RREForm::UpdateToLast);
        const int mw = w.order();
        const Vector lin_res = w.dX().col(mw) + w.d2X() * gamma;
        x = y + beta * lin_res;
        if (w.order() < m && !trace.records.empty())
          trace.records.back().event = "restart-short";
        advanced = true;
        break;
      } catch (const RankDeficient&) {
        w.iterates.erase(w.iterates.begin());
      }
    }
    if (!advanced) {
      x = window.iterates.back();
      if (!trace.records.empty()) trace.records.back().event = "restart-short";
    }
  }
}

}  // namespace accel
