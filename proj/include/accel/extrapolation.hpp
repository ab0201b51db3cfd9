#ifndef ACCEL_EXTRAPOLATION_HPP
#define ACCEL_EXTRAPOLATION_HPP

#include <vector>

#include "accel/trace.hpp"
#include "accel/types.hpp"

namespace accel {

/// x0 - (x1-x0)^2 / (x2 - 2 x1 + x0). Exact on geometric-kernel sequences.
double aitken_scalar(double x0, double x1, double x2);

/// One step of the scalar root iteration x - f(x)/d(x) with
/// d(x) = (f(x+f(x)) - f(x)) / f(x). Returns x unchanged at a root.
double steffensen_step(const std::function<double(double)>& f, double x);

/// x / ||x||^2, the rank-one pseudo-inverse used by the vector rhombus rule.
Vector samelson_inverse(const Vector& x);

/// Rhombus-rule table advanced one anti-diagonal per push; only the current
/// diagonal is kept. Column 0 holds the raw sequence, even columns the
/// extrapolants, odd columns auxiliary values. Entries whose rhombus
/// difference underflows are frozen (carried unchanged) rather than divided.
template <class T>
class EpsilonTable {
 public:
  explicit EpsilonTable(int max_order) : max_order_(max_order) {}

  void push(const T& x_new);

  /// Number of live columns (highest order + 1).
  int columns() const { return static_cast<int>(diag_.size()); }
  const T& entry(int order) const { return diag_.at(order); }
  bool saturated(int order) const { return frozen_.at(order) != 0; }

 private:
  int max_order_;
  std::vector<T> diag_;
  std::vector<char> frozen_;
};

extern template class EpsilonTable<double>;
extern template class EpsilonTable<Vector>;

/// Determinant-ratio transform of order m starting at index j; needs
/// seq[j..j+2m]. Cubic cost per entry, intended as a cross-check oracle.
double shanks_oracle(const std::vector<double>& seq, int j, int m);

/// Last m+2 iterates of a vector sequence with their first and second
/// forward-difference matrices.
struct SequenceWindow {
  std::vector<Vector> iterates;

  int order() const { return static_cast<int>(iterates.size()) - 2; }
  /// n x (m+1) matrix of first differences.
  Matrix dX() const;
  /// n x m matrix of second differences.
  Matrix d2X() const;
};

enum class RREForm { UpdateToFirst, UpdateToLast };

struct ExtrapolationResult {
  Vector y;
  Vector coeffs;
};

/// Residual-minimizing extrapolation. UpdateToFirst: y = x0 + dX0*beta with
/// beta minimizing ||dx0 + d2X*beta||. UpdateToLast: y = x_m + dX0*gamma
/// with gamma minimizing ||dx_m + d2X*gamma||; the two forms produce the
/// same y (gamma = beta - ones). dX0 holds the first m differences.
ExtrapolationResult rre(const SequenceWindow& window, RREForm form);

/// Galerkin variant: (dX0)^T (dx0 + d2X*beta) = 0.
Vector mpe(const SequenceWindow& window);

/// Oblique-projection variant: y = x0 - dX0 * [W^T d2X]^{-1} (W^T dx0).
Vector mmpe(const SequenceWindow& window, const Matrix& W);

/// Restarted solver: each cycle generates m+1 fixed-point steps, extrapolates
/// (update-to-last), applies the extra mixing step y + beta*(linear residual)
/// and restarts. Rank-deficient windows shrink and retry, recorded as events.
ConvergenceTrace restarted_rre_solve(const CountedMap& g, const Vector& x0,
                                     int m, double beta,
                                     const StoppingRule& stop);

}  // namespace accel

#endif  // ACCEL_EXTRAPOLATION_HPP
