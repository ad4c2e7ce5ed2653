#pragma once

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "qacc/moment_dynamics.hpp"
#include "qacc/params.hpp"
#include "qacc/quench_profile.hpp"

namespace qacc {

struct QfiResult {
  double value = 0.0;         // [s^4/m^2]
  double time = 0.0;          // [s]
  double kappa = 0.0;         // 2 nbar + 1
  double freq_ratio_sq = 0.0; // omega0^2/omega1^2
};

/// Compact sudden-quench QFI
///   F(t) = (2m / (hbar kappa omega0^3)) [1 + r (r - 1) (1 - cos omega1 t)^2],
/// r = omega0^2/omega1^2.
QfiResult qfi_sudden(const PhysicalParams& params, double t);

/// Independent route: F = (da mu)^T Sigma^-1 (da mu) from the mean-derivative
/// vector (f_x, f_p) and the closed-form covariance. Agrees with qfi_sudden
/// to better than 1e-9 relative.
double qfi_sudden_gaussian(const PhysicalParams& params, double t);

/// QFI at T1/2 = pi/omega1: bracket collapses to 1 + 4 r (r - 1) = (2r - 1)^2.
QfiResult qfi_half_period(const PhysicalParams& params);

struct SensitivityCurve {
  std::vector<double> times;    // [s]
  std::vector<double> S_values; // [s^2/m]
  std::vector<double> dmu_da;   // [s^2]
  std::vector<double> sigma;    // [m]
};

struct SensitivityOptions {
  double t_end = 0.0;    // 0: auto = t0 + 5 tau_exp + 3 post-quench periods
  double dt_out = 5e-7;  // output grid [s]
  double dt = 0.0;       // 0: default integrator step
  double a_center = 0.0; // center acceleration for the finite difference
  bool a_center_auto = true; // true: use g sin(theta0)
};

/// S(t) = |d<z>/da| / sigma(t) by central differencing of two moment
/// integrations at a_center +/- delta_a (the trap-shift response cancels in
/// the difference). A third run at a_center feeds the linearity check:
/// the second difference must stay below 1% of the first difference.
SensitivityCurve sensitivity_curve(const PhysicalParams& params, const QuenchProfile& profile,
                                   double heating, double delta_a,
                                   const SensitivityOptions& options = {});

/// Regime split for the optimal measurement time: below tau_threshold, the
/// first local minimum of sigma after the quench completes (t > 5 tau_exp,
/// traces aligned to the quench start); above it, the time maximizing dmu/da.
/// Ties break toward the earliest time.
double find_t_opt(const SensitivityCurve& curve,
                  std::span<const std::pair<double, double>> sigma_trace, double tau,
                  double post_quench_period, double tau_threshold = 30e-6);

struct BoundRatio {
  double ratio = 0.0; // S / sqrt(F_Q)
  bool violated = false;
};

/// Quantum Cramer-Rao check: ratio = S/sqrt(F_Q), flagged above 1 + 1e-9.
BoundRatio bound_check(double S, double F_Q);

/// CSV columns: t_s,S_s2_per_m,dmu_da_s2,sigma_m.
void write_sensitivity_csv(std::ostream& os, const SensitivityCurve& curve);

} // namespace qacc
