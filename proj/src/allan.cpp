#include "qacc/allan.hpp"

#include <cmath>
#include <stdexcept>

#include "qacc/constants.hpp"
#include "qacc/metrology.hpp"
#include "qacc/rng.hpp"

namespace qacc {

AccelSeries to_acceleration(std::span<const double> amplitudes, double slope, double theta0,
                            double g, double sample_rate) {
  if (slope == 0.0) throw std::invalid_argument("to_acceleration: slope must be nonzero");
  if (!(sample_rate > 0.0)) {
    throw std::invalid_argument("to_acceleration: sample_rate must be > 0");
  }
  AccelSeries out;
  out.sample_rate = sample_rate;
  out.values.reserve(amplitudes.size());
  for (double amp : amplitudes) {
    const double theta = amp / slope + theta0;
    out.values.push_back(g * theta);
  }
  return out;
}

AllanSeries overlapping_allan(const AccelSeries& series) {
  const size_t n = series.values.size();
  if (n < 5) throw std::invalid_argument("overlapping_allan: need >= 5 samples");
  if (!(series.sample_rate > 0.0)) {
    throw std::invalid_argument("overlapping_allan: sample_rate must be > 0");
  }
  const double tau0 = 1.0 / series.sample_rate;

  // Prefix sums give each window mean in O(1).
  std::vector<double> prefix(n + 1, 0.0);
  for (size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + series.values[i];
  auto window_mean = [&](size_t start, size_t m) {
    return (prefix[start + m] - prefix[start]) / static_cast<double>(m);
  };

  const size_t m_max = (n - 1) / 2;
  AllanSeries out;
  out.integration_times.reserve(m_max);
  out.deviations.reserve(m_max);
  out.terms.reserve(m_max);
  for (size_t m = 1; m <= m_max; ++m) {
    const size_t count = n - 2 * m + 1;
    double sum = 0.0;
    for (size_t j = 0; j < count; ++j) {
      const double d = window_mean(j + m, m) - window_mean(j, m);
      sum += d * d;
    }
    out.integration_times.push_back(static_cast<double>(m) * tau0);
    out.deviations.push_back(std::sqrt(sum / (2.0 * static_cast<double>(count))));
    out.terms.push_back(count);
  }
  return out;
}

AccelSeries synthesize_long_run(const PhysicalParams& params, const QuenchProfile& profile,
                                double heating, double tilt, size_t shots_per_point,
                                double duration, uint64_t seed,
                                const LongRunOptions& options) {
  if (shots_per_point < 1) {
    throw std::invalid_argument("synthesize_long_run: shots_per_point must be >= 1");
  }
  const auto n_samples =
      static_cast<size_t>(std::floor(duration * options.sample_rate + 1e-9));
  if (n_samples < 10) {
    throw std::invalid_argument("synthesize_long_run: duration * f_s must be >= 10");
  }

  PhysicalParams p = params;
  p.heating_rate = heating;
  validate(p);

  SensitivityOptions sopt;
  sopt.dt = options.dt;
  sopt.a_center_auto = false;
  sopt.a_center = p.gravity * std::sin(tilt + p.theta0);
  const SensitivityCurve curve =
      sensitivity_curve(p, profile, heating, options.delta_a, sopt);

  std::vector<std::pair<double, double>> sigma_trace(curve.times.size());
  for (size_t i = 0; i < curve.times.size(); ++i) {
    sigma_trace[i] = {curve.times[i], curve.sigma[i]};
  }
  const double period1 = constants::two_pi / p.omega1;
  const double t_opt =
      find_t_opt(curve, sigma_trace, profile.tau_exp, period1, options.tau_threshold);

  // The moment equations are linear in a, so one response slope places the
  // per-cycle mean without re-integrating.
  const double dt = options.dt > 0.0 ? options.dt : default_time_step(p);
  const Trajectory base = integrate(p, profile, sopt.a_center, t_opt + dt, dt);
  const auto idx = static_cast<size_t>(std::llround(t_opt / dt));
  const GaussianState state0 = base.states[std::min(idx, base.states.size() - 1)];

  double dmu_da = 0.0;
  for (size_t i = 0; i < curve.times.size(); ++i) {
    if (curve.times[i] >= t_opt) {
      dmu_da = curve.dmu_da[i];
      break;
    }
  }
  const double slope_theta = p.gravity * dmu_da; // dmu/dtheta = g dmu/da
  const double sigma_shot = std::sqrt(state0.var_z);

  GaussianSampler rng(seed);
  std::vector<double> amplitudes;
  amplitudes.reserve(n_samples);
  const double a_nominal = sopt.a_center;
  for (size_t k = 0; k < n_samples; ++k) {
    const double t = static_cast<double>(k) / options.sample_rate;
    double a_true = a_nominal + options.drift_linear * t;
    if (options.drift_sin_amp != 0.0) {
      a_true +=
          options.drift_sin_amp * std::sin(constants::two_pi * t / options.drift_sin_period);
    }
    const double mean = state0.mean_z + dmu_da * (a_true - a_nominal);
    double amp = 0.0;
    for (size_t s = 0; s < shots_per_point; ++s) {
      amp += std::fabs(rng.normal(mean, sigma_shot));
    }
    amplitudes.push_back(amp / static_cast<double>(shots_per_point));
  }

  return to_acceleration(amplitudes, slope_theta, p.theta0, p.gravity, options.sample_rate);
}

} // namespace qacc
