#ifndef ACCEL_NLTGCR_HPP
#define ACCEL_NLTGCR_HPP

#include <vector>

#include "accel/linear.hpp"
#include "accel/trace.hpp"
#include "accel/types.hpp"

namespace accel {

enum class NLTGCRMode { Nonlinear, Linear, Adaptive };

struct NLTGCRConfig {
  int window = 5;  // <= 0: unbounded
  NLTGCRMode mode = NLTGCRMode::Nonlinear;
  double tau_switch = 0.01;
  int restart_period = 30;       // linear-mode restart cadence
  int probe_period = 5;          // true-residual probe cadence in linear mode
  double restart_decrease = 1e-2;  // linear-mode restart on this reduction
  double frechet_eps = 0.0;        // <= 0: automatic step selection
};

/// Per-step capture for property tests: iterates, true residuals, the
/// linear-model residuals and the projection coefficients.
struct NLTGCRDiagnostics {
  std::vector<Vector> iterates;
  std::vector<Vector> residuals;
  std::vector<Vector> linear_residuals;
  std::vector<Vector> ys;
};

/// Alignment indicator d = 1 - (r_lin, r) / (||r_lin|| ||r||), in [0, 2].
double residual_deviation(const Vector& r_lin, const Vector& r_true);

/// True when the linear-model residual tracks the actual one closely enough
/// to run in linear mode (d below tau). Zero-norm inputs force nonlinear.
bool linear_mode_ok(const Vector& r_lin, const Vector& r_true, double tau);

/// Truncated-GCR iteration on the nonlinear residual r = -f(x): paired
/// directions (p_i, v_i) with v_i the Jacobian action on p_i by directional
/// differences, update x += P (V^T r). The residual is re-evaluated
/// (nonlinear mode), propagated through the linear model (linear mode), or
/// switched between the two by periodic probing (adaptive mode).
ConvergenceTrace nltgcr_solve(const CountedMap& f, const Vector& x0,
                              const NLTGCRConfig& cfg,
                              const StoppingRule& stop,
                              NLTGCRDiagnostics* diag = nullptr);

/// Implicit inverse-Jacobian view G = P V^T of the live window.
Vector multisecant_view_apply(const PairedDirections& dirs, const Vector& q);
Matrix multisecant_view_dense(const PairedDirections& dirs);

}  // namespace accel

#endif  // ACCEL_NLTGCR_HPP
