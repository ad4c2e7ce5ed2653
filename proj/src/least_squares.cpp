#include "qacc/least_squares.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qacc {

namespace {

double sum_sq(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// Solves A x = b in place by Gaussian elimination with partial pivoting.
// Returns false if a pivot is (numerically) zero.
bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b,
                 std::vector<double>& x) {
  const size_t n = b.size();
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    for (size_t row = col + 1; row < n; ++row) {
      if (std::fabs(a[row][col]) > std::fabs(a[pivot][col])) pivot = row;
    }
    if (std::fabs(a[pivot][col]) < 1e-300) return false;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (size_t row = col + 1; row < n; ++row) {
      const double f = a[row][col] / a[col][col];
      for (size_t k = col; k < n; ++k) a[row][k] -= f * a[col][k];
      b[row] -= f * b[col];
    }
  }
  x.assign(n, 0.0);
  for (size_t i = n; i-- > 0;) {
    double s = b[i];
    for (size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return true;
}

// Inverse via Gauss-Jordan; rows whose pivot collapses are flagged so the
// caller can report an unbounded standard error for that parameter.
std::vector<std::vector<double>> invert_spd(const std::vector<std::vector<double>>& m,
                                            std::vector<bool>& degenerate) {
  const size_t n = m.size();
  std::vector<std::vector<double>> a = m;
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
  degenerate.assign(n, false);
  for (size_t i = 0; i < n; ++i) inv[i][i] = 1.0;

  double scale = 0.0;
  for (size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(m[i][i]));
  const double tiny = std::max(scale, 1.0) * 1e-14;

  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    for (size_t row = col + 1; row < n; ++row) {
      if (std::fabs(a[row][col]) > std::fabs(a[pivot][col])) pivot = row;
    }
    if (std::fabs(a[pivot][col]) < tiny) {
      degenerate[col] = true;
      a[col][col] = tiny; // keep elimination going; the SE is reported as inf
      continue;
    }
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const double d = a[col][col];
    for (size_t k = 0; k < n; ++k) {
      a[col][k] /= d;
      inv[col][k] /= d;
    }
    for (size_t row = 0; row < n; ++row) {
      if (row == col) continue;
      const double f = a[row][col];
      if (f == 0.0) continue;
      for (size_t k = 0; k < n; ++k) {
        a[row][k] -= f * a[col][k];
        inv[row][k] -= f * inv[col][k];
      }
    }
  }
  return inv;
}

} // namespace

LeastSquaresResult fit_least_squares(const ResidualFn& residuals, size_t residual_count,
                                     std::vector<double> initial,
                                     const LeastSquaresOptions& options) {
  const size_t n = residual_count;
  const size_t k = initial.size();
  if (k == 0) throw std::invalid_argument("fit_least_squares: no parameters");
  if (n < k) throw std::invalid_argument("fit_least_squares: fewer residuals than parameters");

  std::vector<double> p = std::move(initial);
  std::vector<double> r(n), r_trial(n), r_plus(n), r_minus(n);
  std::vector<std::vector<double>> jac(n, std::vector<double>(k, 0.0));

  // Finite-difference floor per parameter: its initial magnitude, so SI-scaled
  // parameters (nanometres, rad/s) get sensible steps even near zero.
  std::vector<double> fd_floor(k, 1.0);
  for (size_t j = 0; j < k; ++j) {
    if (p[j] != 0.0) fd_floor[j] = std::fabs(p[j]);
  }

  auto eval_jacobian = [&](const std::vector<double>& at) {
    std::vector<double> probe = at;
    for (size_t j = 0; j < k; ++j) {
      const double h = options.fd_step * std::max(std::fabs(at[j]), fd_floor[j]);
      probe[j] = at[j] + h;
      residuals(probe, r_plus);
      probe[j] = at[j] - h;
      residuals(probe, r_minus);
      probe[j] = at[j];
      for (size_t i = 0; i < n; ++i) jac[i][j] = (r_plus[i] - r_minus[i]) / (2.0 * h);
    }
  };

  residuals(p, r);
  double ssr = sum_sq(r);
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;

  std::vector<std::vector<double>> jtj(k, std::vector<double>(k, 0.0));
  std::vector<double> jtr(k, 0.0), scale(k, 1.0), step, p_trial;

  for (; iter < options.max_iterations && !converged; ++iter) {
    eval_jacobian(p);
    for (size_t a = 0; a < k; ++a) {
      jtr[a] = 0.0;
      for (size_t i = 0; i < n; ++i) jtr[a] += jac[i][a] * r[i];
      for (size_t b = a; b < k; ++b) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += jac[i][a] * jac[i][b];
        jtj[a][b] = s;
        jtj[b][a] = s;
      }
    }
    // Column equilibration: parameters of wildly different magnitudes would
    // otherwise make the normal equations numerically singular.
    for (size_t a = 0; a < k; ++a) {
      scale[a] = jtj[a][a] > 0.0 ? std::sqrt(jtj[a][a]) : 1.0;
    }

    bool accepted = false;
    while (!accepted) {
      std::vector<std::vector<double>> damped(k, std::vector<double>(k));
      std::vector<double> rhs(k);
      for (size_t a = 0; a < k; ++a) {
        for (size_t b = 0; b < k; ++b) {
          damped[a][b] = jtj[a][b] / (scale[a] * scale[b]);
        }
        damped[a][a] += lambda; // unit diagonal in the scaled space
        rhs[a] = -jtr[a] / scale[a];
      }
      if (!solve_dense(damped, rhs, step)) {
        throw std::runtime_error("fit_least_squares: rank-deficient Jacobian");
      }
      for (size_t a = 0; a < k; ++a) step[a] /= scale[a];

      p_trial = p;
      for (size_t a = 0; a < k; ++a) p_trial[a] += step[a];
      residuals(p_trial, r_trial);
      const double ssr_trial = sum_sq(r_trial);

      if (std::isfinite(ssr_trial) && ssr_trial <= ssr) {
        double max_rel_step = 0.0;
        for (size_t a = 0; a < k; ++a) {
          max_rel_step =
              std::max(max_rel_step, std::fabs(step[a]) / std::max(std::fabs(p[a]), 1.0));
        }
        const double improvement = ssr - ssr_trial;
        p = p_trial;
        r = r_trial;
        const double prev = ssr;
        ssr = ssr_trial;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (improvement <= options.ssr_tolerance * std::max(prev, 1e-300) ||
            max_rel_step <= options.step_tolerance) {
          converged = true;
        }
      } else {
        lambda *= 10.0;
        if (lambda > 1e14) {
          // Cannot improve: treat the current point as the optimum.
          converged = true;
          accepted = true;
        }
      }
    }
  }

  if (!converged) {
    throw std::runtime_error("fit_least_squares: no convergence after max iterations");
  }

  // Linearized covariance at the optimum: s^2 (J^T J)^-1, inverted in the
  // equilibrated space for conditioning.
  eval_jacobian(p);
  for (size_t a = 0; a < k; ++a) {
    for (size_t b = a; b < k; ++b) {
      double s = 0.0;
      for (size_t i = 0; i < n; ++i) s += jac[i][a] * jac[i][b];
      jtj[a][b] = s;
      jtj[b][a] = s;
    }
  }
  for (size_t a = 0; a < k; ++a) {
    scale[a] = jtj[a][a] > 0.0 ? std::sqrt(jtj[a][a]) : 1.0;
  }
  std::vector<std::vector<double>> scaled(k, std::vector<double>(k));
  for (size_t a = 0; a < k; ++a) {
    for (size_t b = 0; b < k; ++b) scaled[a][b] = jtj[a][b] / (scale[a] * scale[b]);
  }
  const double dof = static_cast<double>(n > k ? n - k : 1);
  const double s2 = ssr / dof;
  std::vector<bool> degenerate;
  const auto cov = invert_spd(scaled, degenerate);

  LeastSquaresResult result;
  result.params = p;
  result.std_errors.resize(k);
  for (size_t a = 0; a < k; ++a) {
    if (degenerate[a] || jtj[a][a] <= 0.0 || cov[a][a] < 0.0) {
      result.std_errors[a] = std::numeric_limits<double>::infinity();
    } else {
      result.std_errors[a] = std::sqrt(s2 * cov[a][a]) / scale[a];
    }
  }
  result.ssr = ssr;
  result.iterations = iter;
  result.converged = converged;
  return result;
}

} // namespace qacc
