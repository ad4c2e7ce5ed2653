#pragma once

#include <span>

namespace qacc {

// Value with a 1-sigma standard error, the x(dx) notation carrier.
struct Measured {
  double value = 0.0;
  double sigma = 0.0;
};

/// Quadrature propagation of the half-period QFI over uncorrelated inputs,
/// with the log-sensitivity coefficients
///   c0 = -3 + 8 r (2r - 1) / (1 + 4 r (r - 1))   (omega0)
///   c1 = -8 r (2r - 1) / (1 + 4 r (r - 1))       (omega1)
/// and dkappa/kappa = 2 dnbar / (2 nbar + 1). Warns on stderr when any input
/// exceeds 20% relative uncertainty (the linearization degrades).
Measured qfi_uncertainty(const Measured& mass, const Measured& nbar, const Measured& omega0,
                         const Measured& omega1);

double qfi_log_coeff_omega0(double freq_ratio_sq);
double qfi_log_coeff_omega1(double freq_ratio_sq);

/// S = dmu_da / sigma_width with dS/S = sqrt((d1/v1)^2 + (d2/v2)^2).
Measured sensitivity_uncertainty(const Measured& dmu_da, const Measured& sigma_width);

/// Inverse-variance weighted mean: sum(v_i/d_i^2)/sum(1/d_i^2), error
/// sqrt(1/sum(1/d_i^2)).
Measured weighted_mean(std::span<const Measured> values);

struct SmallAngleBoundResult {
  double bound = 0.0; // theta^2 / 6
  double exact = 0.0; // |sin(theta) - theta| / |theta|
};

/// Taylor-remainder bound on the small-angle approximation; exact <= bound.
SmallAngleBoundResult small_angle_bound(double theta);

/// Sample mean +/- sample standard deviation (n - 1 denominator).
Measured frequency_stats(std::span<const double> samples);

/// Displacement-calibration systematic: a multiplicative Measured factor
/// applied to a fitted mu or sigma, its relative error combined in quadrature
/// with the statistical one. The identity factor {1, 0} leaves x untouched
/// (the default: the calibration magnitude is not quantified upstream).
Measured apply_calibration(const Measured& x, const Measured& factor = {1.0, 0.0});

} // namespace qacc
