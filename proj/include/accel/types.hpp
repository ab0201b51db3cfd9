#ifndef ACCEL_TYPES_HPP
#define ACCEL_TYPES_HPP

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

namespace accel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Error taxonomy shared by all solvers and kernels.
// ---------------------------------------------------------------------------

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// New column is numerically dependent on the existing basis.
struct NearBreakdown : NumericalError {
  using NumericalError::NumericalError;
};

struct SingularSystem : NumericalError {
  using NumericalError::NumericalError;
};

struct RankDeficient : NumericalError {
  using NumericalError::NumericalError;
};

struct DegenerateDenominator : NumericalError {
  using NumericalError::NumericalError;
};

struct StationaryResidual : NumericalError {
  using NumericalError::NumericalError;
};

struct Breakdown : NumericalError {
  using NumericalError::NumericalError;
};

struct ZeroDirection : NumericalError {
  using NumericalError::NumericalError;
};

struct CoincidentAtoms : NumericalError {
  using NumericalError::NumericalError;
};

struct NoRealRoot : NumericalError {
  using NumericalError::NumericalError;
};

// ---------------------------------------------------------------------------
// Maps with a shared evaluation counter, so traces can report true
// function-evaluation counts regardless of how a map is wrapped.
// ---------------------------------------------------------------------------

class CountedMap {
 public:
  CountedMap() = default;
  explicit CountedMap(std::function<Vector(const Vector&)> fn)
      : fn_(std::move(fn)), count_(std::make_shared<long>(0)) {}

  Vector operator()(const Vector& x) const {
    ++*count_;
    return fn_(x);
  }

  long count() const { return count_ ? *count_ : 0; }
  void reset_count() const {
    if (count_) *count_ = 0;
  }

  /// Underlying function, bypassing the counter; for wrappers built with
  /// derive so one wrapped call counts as a single evaluation.
  const std::function<Vector(const Vector&)>& raw() const { return fn_; }

  /// New map sharing this map's evaluation counter.
  CountedMap derive(std::function<Vector(const Vector&)> fn) const {
    CountedMap m;
    m.fn_ = std::move(fn);
    m.count_ = count_;
    return m;
  }

  bool valid() const { return static_cast<bool>(fn_); }

 private:
  std::function<Vector(const Vector&)> fn_;
  std::shared_ptr<long> count_;
};

struct StoppingRule {
  double tol = 1e-12;      // relative residual reduction
  long max_fevals = 500;
};

}  // namespace accel

#endif  // ACCEL_TYPES_HPP
