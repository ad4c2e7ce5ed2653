#include "qacc/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qacc/constants.hpp"

namespace qacc {

QfiResult qfi_sudden(const PhysicalParams& params, double t) {
  if (t < 0.0) throw std::invalid_argument("qfi_sudden: t must be >= 0");
  const auto d = derive(params);
  const double r = d.freq_ratio_sq;
  const double c = std::cos(params.omega1 * t);
  const double bracket = 1.0 + r * (r - 1.0) * (1.0 - c) * (1.0 - c);
  QfiResult out;
  out.value = 2.0 * params.mass /
              (constants::hbar * d.kappa * params.omega0 * params.omega0 * params.omega0) *
              bracket;
  out.time = t;
  out.kappa = d.kappa;
  out.freq_ratio_sq = r;
  return out;
}

double qfi_sudden_gaussian(const PhysicalParams& params, double t) {
  const auto d = derive(params);
  const double w0_sq = params.omega0 * params.omega0;
  const double w1_sq = params.omega1 * params.omega1;
  const double spread = 1.0 / w0_sq - 1.0 / w1_sq;
  const double fx = 1.0 / w1_sq + spread * std::cos(params.omega1 * t);
  const double fp = -params.mass * params.omega1 * spread * std::sin(params.omega1 * t);
  const Covariance cov = sudden_quench_covariance(params, t);
  // Sigma^-1 via det Sigma = (kappa hbar / 2)^2.
  const double det = d.kappa * constants::hbar / 2.0;
  return (fx * fx * cov.pp - 2.0 * fx * fp * cov.zp + fp * fp * cov.zz) / (det * det);
}

QfiResult qfi_half_period(const PhysicalParams& params) {
  const auto d = derive(params);
  const double r = d.freq_ratio_sq;
  QfiResult out;
  out.value = 2.0 * params.mass /
              (constants::hbar * d.kappa * params.omega0 * params.omega0 * params.omega0) *
              (1.0 + 4.0 * r * (r - 1.0));
  out.time = constants::pi / params.omega1;
  out.kappa = d.kappa;
  out.freq_ratio_sq = r;
  return out;
}

SensitivityCurve sensitivity_curve(const PhysicalParams& params, const QuenchProfile& profile,
                                   double heating, double delta_a,
                                   const SensitivityOptions& options) {
  if (!(delta_a > 0.0)) throw std::invalid_argument("sensitivity_curve: delta_a must be > 0");
  validate(profile);

  PhysicalParams p = params;
  p.heating_rate = heating;
  validate(p);

  const double period1 = constants::two_pi / p.omega1;
  const double t_end = options.t_end > 0.0
                           ? options.t_end
                           : profile.t0 + 5.0 * profile.tau_exp + 3.0 * period1;
  const double dt = options.dt > 0.0 ? options.dt : default_time_step(p);
  const double a0 =
      options.a_center_auto ? p.gravity * std::sin(p.theta0) : options.a_center;

  const Trajectory plus = integrate(p, profile, a0 + delta_a, t_end, dt);
  const Trajectory minus = integrate(p, profile, a0 - delta_a, t_end, dt);
  const Trajectory center = integrate(p, profile, a0, t_end, dt);

  // Linearity check: second difference against first difference, sup norms.
  double max_d1 = 0.0, max_d2 = 0.0;
  for (size_t i = 0; i < center.times.size(); ++i) {
    const double d1 = 0.5 * (plus.states[i].mean_z - minus.states[i].mean_z);
    const double d2 =
        plus.states[i].mean_z - 2.0 * center.states[i].mean_z + minus.states[i].mean_z;
    max_d1 = std::max(max_d1, std::fabs(d1));
    max_d2 = std::max(max_d2, std::fabs(d2));
  }
  if (!(max_d1 > 0.0)) {
    throw std::runtime_error("sensitivity_curve: degenerate response (zero first difference)");
  }
  if (max_d2 > 0.01 * max_d1) {
    std::ostringstream os;
    os << "sensitivity_curve: nonlinearity check failed (second difference " << max_d2
       << " exceeds 1% of first difference " << max_d1 << "); reduce delta_a";
    throw std::runtime_error(os.str());
  }

  const size_t stride =
      std::max<size_t>(1, static_cast<size_t>(std::llround(options.dt_out / dt)));

  SensitivityCurve curve;
  for (size_t i = 0; i < center.times.size(); i += stride) {
    const double var = center.states[i].var_z;
    if (!(var > 0.0)) {
      throw std::runtime_error("sensitivity_curve: degenerate variance");
    }
    const double dmu =
        (plus.states[i].mean_z - minus.states[i].mean_z) / (2.0 * delta_a);
    const double sigma = std::sqrt(var);
    curve.times.push_back(center.times[i]);
    curve.dmu_da.push_back(dmu);
    curve.sigma.push_back(sigma);
    curve.S_values.push_back(std::fabs(dmu) / sigma);
  }
  return curve;
}

double find_t_opt(const SensitivityCurve& curve,
                  std::span<const std::pair<double, double>> sigma_trace, double tau,
                  double post_quench_period, double tau_threshold) {
  if (curve.times.empty() || sigma_trace.empty()) {
    throw std::invalid_argument("find_t_opt: empty inputs");
  }
  const double quench_done = 5.0 * tau;
  if (sigma_trace.back().first < quench_done + post_quench_period) {
    throw std::invalid_argument(
        "find_t_opt: sigma trace must span at least one post-quench period");
  }

  if (tau < tau_threshold) {
    // First local minimum of sigma after the quench completes.
    for (size_t i = 1; i + 1 < sigma_trace.size(); ++i) {
      if (sigma_trace[i].first <= quench_done) continue;
      if (sigma_trace[i].second < sigma_trace[i - 1].second &&
          sigma_trace[i].second <= sigma_trace[i + 1].second) {
        return sigma_trace[i].first;
      }
    }
    throw std::runtime_error("find_t_opt: no post-quench sigma minimum found");
  }

  // Slow quench: breathing is washed out, so take the response maximum.
  size_t best = 0;
  double best_val = -1.0;
  for (size_t i = 0; i < curve.times.size(); ++i) {
    const double v = std::fabs(curve.dmu_da[i]);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  if (!(best_val > 0.0)) {
    throw std::runtime_error("find_t_opt: no post-quench response extremum found");
  }
  return curve.times[best];
}

BoundRatio bound_check(double S, double F_Q) {
  if (!(F_Q > 0.0)) throw std::invalid_argument("bound_check: F_Q must be > 0");
  BoundRatio out;
  out.ratio = S / std::sqrt(F_Q);
  out.violated = out.ratio > 1.0 + 1e-9;
  return out;
}

void write_sensitivity_csv(std::ostream& os, const SensitivityCurve& curve) {
  os << "t_s,S_s2_per_m,dmu_da_s2,sigma_m\n";
  char line[192];
  for (size_t i = 0; i < curve.times.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g\n", curve.times[i],
                  curve.S_values[i], curve.dmu_da[i], curve.sigma[i]);
    os << line;
  }
}

} // namespace qacc
