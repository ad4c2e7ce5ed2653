#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qacc/moment_dynamics.hpp"

namespace qacc {

// Single-shot absolute-displacement readouts |z| at one measurement time.
struct ShotSet {
  std::vector<double> samples; // |z| values [m], all >= 0
  double measure_time = 0.0;   // [s]
  double tilt = 0.0;           // table angle during acquisition [rad]
  uint64_t seed = 0;
};

/// Draws n values z ~ Normal(mean_z, var_z) and stores |z|. Deterministic
/// given (state, n, seed).
ShotSet sample_shots(const GaussianState& state, size_t n, uint64_t seed,
                     double measure_time = 0.0, double tilt = 0.0);

// Folded-normal histogram fit: counts ~ A [exp(-(z-mu)^2/2s^2) + exp(-(z+mu)^2/2s^2)].
struct FoldedFit {
  double amplitude = 0.0; // counts
  double mu = 0.0;        // [m], reported >= 0 (the model is even in mu)
  double sigma = 0.0;     // [m]
  double se_mu = 0.0;
  double se_sigma = 0.0;
  double ssr = 0.0;       // residual sum of squares over histogram counts
  size_t bins = 0;
};

/// Histogram on [0, max(sample)] with the given bin count (>= 8), then
/// nonlinear least squares of the two-Gaussian model on the bin counts.
/// Requires >= 50 samples.
FoldedFit fit_folded_normal(const ShotSet& shots, size_t bins);

/// Same with the bin count chosen by the Freedman-Diaconis rule.
FoldedFit fit_folded_normal(const ShotSet& shots);

size_t freedman_diaconis_bins(std::span<const double> samples);

// Rectified sinusoid mu(t) = |A sin(omega t + phi) + mu_off|.
struct SinusoidFit {
  double A = 0.0;      // [m], canonical A >= 0
  double omega = 0.0;  // [rad/s]
  double phi = 0.0;    // [rad], canonical [0, 2pi)
  double mu_off = 0.0; // [m], canonical >= 0 (global sign flip is unobservable)
  double se_A = 0.0;
  double se_omega = 0.0;
  double se_phi = 0.0;
  double se_mu_off = 0.0;
};

/// Least-squares fit of the rectified model. The phase init is scanned over
/// 8 values and the best residual kept. Requires >= 20 points spanning at
/// least two periods of omega_init.
SinusoidFit fit_rectified_sinusoid(std::span<const std::pair<double, double>> trace,
                                   double omega_init);

struct TiltPoint {
  double tilt = 0.0;  // [rad]
  double value = 0.0; // fitted offset / amplitude [m]
  double se = 0.0;    // 1-sigma error on value [m]
};

struct LineFit {
  double slope = 0.0;     // [m/rad]
  double intercept = 0.0; // [m]
  double se_slope = 0.0;  // [m/rad]
};

/// Weighted least-squares line through (tilt, value) with weights 1/se^2.
/// Divide the slope by g for dmu/da. Requires >= 3 distinct tilts.
LineFit tilt_sweep_slope(std::span<const TiltPoint> points);

} // namespace qacc
