#ifndef ACCEL_HARNESS_HPP
#define ACCEL_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

#include "accel/trace.hpp"

namespace accel {

/// Full description of one solve: problem, method and their parameters.
/// Parsed from key=value lines and/or command-line flags; unknown keys are
/// rejected with the offending name.
struct RunConfig {
  std::string problem = "bratu";  // bratu | lj | atan | linear
  std::string method = "aa";      // gd rre mpe aa aatgs nltgcr cheb cg tgcr
                                  // broyden1 broyden2 newton
  int window = 5;
  int restart = 0;     // 0: never
  double beta = 1.0;
  std::string mode = "nl";      // nl | lin | adapt
  std::string backend = "qr";   // normal | qr | chol | polar
  double tol = 1e-12;
  long max_fevals = 500;
  std::uint64_t seed = 42;
  std::string out;

  // problem-shape parameters
  int nx = 100;          // bratu grid
  double lambda = 0.5;   // bratu source strength
  double mu = -1.0;      // mixing step; < 0 selects the problem default
  int n = 30;            // linear system size / series length
  double kappa = 10.0;   // linear spd spectrum spread
  std::string kind = "spd";  // spd | nonsym | contract
  int cells = 3;             // lj lattice cells per side
  double perturbation = 0.01;
};

/// Applies one key=value pair; throws std::runtime_error naming unknown keys
/// or malformed values.
void apply_config_key(RunConfig& cfg, const std::string& key,
                      const std::string& value);

/// Line-oriented key=value file; '#' starts a comment.
RunConfig parse_config(std::istream& is);

struct RunOutcome {
  ConvergenceTrace trace;
  int exit_code = 0;  // 0 converged, 2 budget exhausted, 1 error
  std::string error;
};

/// Executes the configured solve. Never throws; failures land in the
/// outcome with exit code 1.
RunOutcome run_config(const RunConfig& cfg);

}  // namespace accel

#endif  // ACCEL_HARNESS_HPP
