#ifndef ACCEL_PROBLEMS_HPP
#define ACCEL_PROBLEMS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "accel/linear.hpp"
#include "accel/trace.hpp"
#include "accel/types.hpp"

namespace accel {

/// Deterministic random stream: identical output on every platform,
/// independent of the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
  /// Uniform in [0, 1).
  double uniform();
  /// Standard normal via the Box-Muller transform.
  double normal();

 private:
  std::uint64_t next();
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Alternating-series partial sums x_{j+1} = x_j + (-1)^j z^{2j+1}/(2j+1),
/// x_0 = 0; n terms, so the result has n+1 entries. Converges to atan(z).
std::vector<double> atan_partial_sums(int n, double z);

/// 2-D exponential-source boundary-value problem on the unit square with
/// zero boundary values, 5-point stencil, row-major interior grid.
struct BratuSpec {
  int nx = 100;         // interior points per side
  double lambda = 0.5;
  double mu = 0.1;      // mixing step for the fixed-point formulation

  double h() const { return 1.0 / (nx + 1); }
  int dim() const { return nx * nx; }
};

/// f_i = (4 u_C - u_N - u_S - u_E - u_W) + lambda exp(u_C), unit spacing.
Vector bratu_residual(const BratuSpec& spec, const Vector& u);

/// Residual as a counted map.
CountedMap bratu_map(const BratuSpec& spec);

/// Uniform random interior values in [0, 1).
Vector bratu_initial_guess(const BratuSpec& spec, std::uint64_t seed);

/// Pairwise 12-6 potential cluster in reduced units; atoms start on a
/// face-centered-cubic lattice with nearest-neighbor spacing 2^{1/6}.
struct LJSpec {
  int cells = 3;
  double mu = 1e-4;            // mixing step on the gradient
  double perturbation = 0.01;  // Gaussian std, in units of the spacing
  std::uint64_t seed = 0;

  int atoms() const { return 4 * cells * cells * cells; }
};

/// Total energy and its analytic gradient with respect to the concatenated
/// coordinates (length 3 * atoms).
std::pair<double, Vector> lj_energy_gradient(const Vector& positions);

/// Gradient as a counted map.
CountedMap lj_gradient_map();

/// Lattice positions plus the seeded Gaussian perturbation.
Vector fcc_init(int cells, double perturbation, std::uint64_t seed);

/// g(x) = x - mu f(x); shares f's evaluation counter.
CountedMap fixed_point_wrap(const CountedMap& f, double mu);

/// x_{j+1} = x_j - mu_j f(x_j) with mu_j multiplied by 0.3 after a residual
/// increase (step rejected) and by 1.05 after a decrease.
ConvergenceTrace adapt_gd_solve(const CountedMap& f, const Vector& x0,
                                double mu0, const StoppingRule& stop);

enum class LinearKind { SpdDiag, Nonsymmetric, ContractionMap };

struct LinearProblem {
  LinearOperator A;
  Vector b;
  Vector solution;
  Matrix M;  // fixed-point matrix for ContractionMap, else empty
};

/// Deterministic generators with known solutions. SpdDiag: log-spaced
/// diagonal spectrum in [1/kappa, 1] (kappa encoded in the seed's companion
/// argument via make_spd_diag). Nonsymmetric: shifted random matrix.
/// ContractionMap: x -> Mx + c with spectral radius < 1; A = I - M.
LinearProblem make_linear_problem(LinearKind kind, int n, std::uint64_t seed,
                                  double kappa = 10.0);

}  // namespace accel

#endif  // ACCEL_PROBLEMS_HPP
