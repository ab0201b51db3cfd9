#ifndef ACCEL_ANDERSON_HPP
#define ACCEL_ANDERSON_HPP

#include <vector>

#include "accel/trace.hpp"
#include "accel/types.hpp"

namespace accel {

/// Cyclic storage of the last m forward-difference pairs; oldest evicted
/// first when full.
struct DifferenceWindow {
  std::vector<Vector> dX;
  std::vector<Vector> dF;
  int capacity = 0;  // <= 0: unbounded

  int count() const { return static_cast<int>(dF.size()); }
  bool full() const { return capacity > 0 && count() >= capacity; }
  void push(Vector dx, Vector df) {
    if (full()) {
      dX.erase(dX.begin());
      dF.erase(dF.begin());
    }
    dX.push_back(std::move(dx));
    dF.push_back(std::move(df));
  }
  void clear() {
    dX.clear();
    dF.clear();
  }
  Matrix Xmat() const;
  Matrix Fmat() const;
};

enum class AABackend { Normal, QRDowndate, CholeskyDowndate, PolarDowndate };

struct AAConfig {
  int window = 5;           // <= 0: unbounded
  int restart_period = 0;   // 0: never
  double beta = 1.0;
  AABackend backend = AABackend::QRDowndate;
  double tau_reg = 0.0;  // Normal backend only
  // Short-recurrence variant only: cap on the scalar sequence that mimics
  // the rounding-error growth of the paired recurrences; exceeding it
  // triggers an automatic restart. 0 disables the monitor.
  double monitor_cap = 0.0;
};

/// Optional per-step capture of iterates and residuals, for cross-method
/// equivalence checks.
struct AADiagnostics {
  std::vector<Vector> iterates;
  std::vector<Vector> residuals;
};

/// Windowed least-squares acceleration of the fixed-point map g:
/// f_j = g(x_j) - x_j, gamma minimizes ||f_j - dF gamma||, and
/// x_{j+1} = (x_j - dX gamma) + beta (f_j - dF gamma). Backend failures
/// flush the window (recorded as events) and fall back to plain mixing.
ConvergenceTrace aa_solve(const CountedMap& g, const Vector& x0,
                          const AAConfig& cfg, const StoppingRule& stop,
                          AADiagnostics* diag = nullptr);

/// Per-step capture of the paired orthogonalization coefficients and
/// projections. s_columns[k] holds the coefficients produced while
/// orthogonalizing step k's difference pair (last entry is the norm s_kk);
/// col_index[k] gives the global index of the oldest live column at step k.
struct TGSDiagnostics {
  std::vector<Vector> iterates;
  std::vector<Vector> residuals;
  std::vector<std::vector<double>> s_columns;
  std::vector<long> col_index;
  std::vector<Vector> etas;
};

/// Short-recurrence variant: the difference pairs are orthogonalized once,
/// with shared coefficients, into paired bases (Q, U); truncation simply
/// drops the oldest pair. Restarts when the new column loses independence
/// or on the configured period.
ConvergenceTrace aa_tgs_solve(const CountedMap& g, const Vector& x0,
                              const AAConfig& cfg, const StoppingRule& stop,
                              TGSDiagnostics* diag = nullptr);

/// Appends the dependent constrained weight 1 - sum(theta); the result sums
/// to one.
Vector diis_weights(const Vector& theta);

/// Change of basis between difference coefficients gamma and constrained
/// weights theta: theta_i = gamma_{i+1} - gamma_i with gamma_0 = 0, and the
/// closing weight 1 - gamma_m.
Vector gamma_to_theta(const Vector& gamma);
Vector theta_to_gamma(const Vector& theta);

}  // namespace accel

#endif  // ACCEL_ANDERSON_HPP
