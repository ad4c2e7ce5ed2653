#pragma once

#include <functional>
#include <vector>

namespace qacc {

// Residual evaluator: fills `r` (fixed length) for the parameter vector `p`.
using ResidualFn = std::function<void(const std::vector<double>& p, std::vector<double>& r)>;

struct LeastSquaresOptions {
  int max_iterations = 200;
  double ssr_tolerance = 1e-12;  // relative SSR improvement below which we stop
  double step_tolerance = 1e-11; // relative parameter step below which we stop
  double fd_step = 1e-6;         // Jacobian step = fd_step * max(|p|, 1)
};

struct LeastSquaresResult {
  std::vector<double> params;
  std::vector<double> std_errors; // linearized 1-sigma errors at the optimum
  double ssr = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Levenberg-Marquardt-style damped Gauss-Newton with numeric central-difference
/// Jacobians. Throws std::runtime_error on non-convergence or a rank-deficient
/// Jacobian that damping cannot rescue. Parameters without leverage on the
/// residuals get infinite standard errors rather than aborting the fit.
LeastSquaresResult fit_least_squares(const ResidualFn& residuals, size_t residual_count,
                                     std::vector<double> initial,
                                     const LeastSquaresOptions& options = {});

} // namespace qacc
