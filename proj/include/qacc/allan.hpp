#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qacc/params.hpp"
#include "qacc/quench_profile.hpp"

namespace qacc {

struct AccelSeries {
  std::vector<double> values; // [m/s^2]
  double sample_rate = 0.0;   // f_s [Hz]
};

struct AllanSeries {
  std::vector<double> integration_times; // t_A = m/f_s, strictly increasing [s]
  std::vector<double> deviations;        // sigma_A(t_A) [m/s^2]
  std::vector<size_t> terms;             // averaging terms per point (N - 2m + 1)
};

/// Amplitude-to-acceleration conversion: theta_k = A_k/slope + theta0,
/// a_k = g theta_k. Throws for zero slope.
AccelSeries to_acceleration(std::span<const double> amplitudes, double slope, double theta0,
                            double g, double sample_rate);

/// Overlapping Allan deviation for every averaging factor m = 1..(N-1)/2:
///   sigma^2(m tau0) = (1 / (2 (N - 2m + 1))) sum_j (abar_{j+m} - abar_j)^2
/// with abar_j the mean of samples j..j+m-1 and tau0 = 1/f_s. Needs N >= 5.
AllanSeries overlapping_allan(const AccelSeries& series);

struct LongRunOptions {
  double sample_rate = 3.0;      // f_s [Hz]
  double delta_a = 0.01;         // finite-difference step for the response [m/s^2]
  double dt = 0.0;               // integrator step, 0: default
  double drift_linear = 0.0;     // injected acceleration drift [m/s^2 per s]
  double drift_sin_amp = 0.0;    // [m/s^2]
  double drift_sin_period = 1800.0; // [s]
  double tau_threshold = 30e-6;  // T_opt regime split [s]
};

/// End-to-end synthetic acquisition: simulate the state at T_opt once, use the
/// linear acceleration response to place the per-cycle mean, draw one shot
/// (or the mean of shots_per_point shots) per cycle, and convert amplitudes
/// back to accelerations through the quoted tilt pipeline. Drift terms are
/// injected into the true acceleration when enabled.
AccelSeries synthesize_long_run(const PhysicalParams& params, const QuenchProfile& profile,
                                double heating, double tilt, size_t shots_per_point,
                                double duration, uint64_t seed,
                                const LongRunOptions& options = {});

} // namespace qacc
