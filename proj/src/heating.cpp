#include "qacc/heating.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qacc/constants.hpp"
#include "qacc/moment_dynamics.hpp"

namespace qacc {

GasSpec nitrogen_gas() { return {{{kNitrogenMass, 1.0}}}; }

GasSpec hydrogen_gas() { return {{{kHydrogenMass, 1.0}}}; }

GasSpec nitrogen_hydrogen_mix(double nitrogen_fraction) {
  return {{{kNitrogenMass, nitrogen_fraction}, {kHydrogenMass, 1.0 - nitrogen_fraction}}};
}

void validate(const GasSpec& gas) {
  if (gas.components.empty()) {
    throw std::invalid_argument("GasSpec: at least one component required");
  }
  double total = 0.0;
  for (const auto& c : gas.components) {
    if (c.fraction < 0.0) throw std::invalid_argument("GasSpec: fractions must be >= 0");
    if (!(c.molecular_mass > 0.0)) {
      throw std::invalid_argument("GasSpec: molecular masses must be > 0");
    }
    total += c.fraction;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("GasSpec: fractions must sum to 1");
  }
}

double gas_heating_rate(const PhysicalParams& params, const GasSpec& gas) {
  validate(params);
  validate(gas);
  double rate = 0.0;
  for (const auto& c : gas.components) {
    const double b =
        (4.0 + constants::pi / 2.0) *
        std::sqrt(c.molecular_mass /
                  (constants::two_pi * constants::boltzmann * params.gas_temperature));
    rate += c.fraction * b * params.gas_temperature * params.pressure /
            (params.radius * params.density);
  }
  return rate;
}

double photon_recoil_heating_rate(const PhysicalParams&) { return 0.0; }

LpnHeating lpn_heating(const PhysicalParams& params, const LpnSpec& spec) {
  validate(params);
  if (!(spec.wavelength > 0.0) || !(spec.mirror_distance > 0.0) ||
      !(spec.light_speed > 0.0) || spec.freq_noise_psd < 0.0) {
    throw std::invalid_argument("LpnSpec: wavelength, mirror_distance, light_speed must be > 0"
                                " and freq_noise_psd >= 0");
  }
  LpnHeating out;
  const double lever = spec.wavelength * spec.mirror_distance / spec.light_speed;
  out.displacement_psd = lever * lever * spec.freq_noise_psd;
  const double w1 = params.omega1;
  out.energy_rate = 0.5 * params.mass * w1 * w1 * w1 * w1 * out.displacement_psd;
  out.phonon_rate = out.energy_rate / (constants::hbar * w1);
  out.temperature_rate = out.energy_rate / constants::boltzmann;
  return out;
}

namespace {

// Sum of squared deviations between observed widths and the model sigma(t)
// at one candidate heating rate, over all traces.
double width_objective(std::span<const SigmaTrace> traces, const PhysicalParams& base,
                       std::span<const QuenchProfile> profiles, double rate, double dt) {
  PhysicalParams p = base;
  p.heating_rate = rate;
  double ssr = 0.0;
  for (size_t i = 0; i < traces.size(); ++i) {
    const auto& trace = traces[i];
    const double t_end = trace.points.back().first + dt;
    // The covariance block decouples from the means, so a = 0 suffices.
    const Trajectory traj = integrate(p, profiles[i], 0.0, t_end, dt);
    for (const auto& [t, sigma_obs] : trace.points) {
      auto idx = static_cast<size_t>(t / dt);
      idx = std::min(idx, traj.times.size() - 2);
      const double f = (t - traj.times[idx]) / dt;
      const double var = traj.states[idx].var_z +
                         f * (traj.states[idx + 1].var_z - traj.states[idx].var_z);
      const double d = std::sqrt(var) - sigma_obs;
      ssr += d * d;
    }
  }
  return ssr;
}

} // namespace

double heating_objective(std::span<const SigmaTrace> traces, const PhysicalParams& params,
                         std::span<const QuenchProfile> profiles, double rate, double dt) {
  if (traces.size() != profiles.size()) {
    throw std::invalid_argument("heating_objective: one profile per trace required");
  }
  const double step = dt > 0.0 ? dt : default_time_step(params);
  return width_objective(traces, params, profiles, rate, step);
}

HeatingFit infer_heating_rate(std::span<const SigmaTrace> traces, const PhysicalParams& params,
                              std::span<const QuenchProfile> profiles,
                              const HeatingFitOptions& options) {
  if (traces.empty()) throw std::invalid_argument("infer_heating_rate: need >= 1 trace");
  if (traces.size() != profiles.size()) {
    throw std::invalid_argument("infer_heating_rate: one profile per trace required");
  }
  for (const auto& t : traces) {
    if (t.points.size() < 2) {
      throw std::invalid_argument("infer_heating_rate: traces need >= 2 points");
    }
  }

  const double dt = options.dt > 0.0 ? options.dt : default_time_step(params);
  const auto n_grid = static_cast<size_t>(
      std::floor((options.grid_max - options.grid_min) / options.grid_step + 1.5));

  std::vector<double> objective(n_grid);
  size_t best = 0;
  size_t n_points = 0;
  for (const auto& t : traces) n_points += t.points.size();
  for (size_t i = 0; i < n_grid; ++i) {
    const double rate = options.grid_min + static_cast<double>(i) * options.grid_step;
    objective[i] = width_objective(traces, params, profiles, rate, dt);
    if (objective[i] < objective[best]) best = i;
  }

  HeatingFit out;
  out.at_boundary = (best == 0 || best + 1 == n_grid);
  out.objective = objective[best];
  double rate = options.grid_min + static_cast<double>(best) * options.grid_step;
  double curvature = 0.0;

  if (!out.at_boundary) {
    // Parabolic refinement through the bracketing grid points.
    const double ym = objective[best - 1];
    const double y0 = objective[best];
    const double yp = objective[best + 1];
    const double denom = ym - 2.0 * y0 + yp;
    if (denom > 0.0) {
      rate += 0.5 * options.grid_step * (ym - yp) / denom;
      curvature = denom / (options.grid_step * options.grid_step);
      // The parabola vertex can dip below zero for perfectly explained data.
      out.objective = std::max(y0 - 0.125 * (ym - yp) * (ym - yp) / denom, 0.0);
    }
  }

  if (curvature > 0.0 && n_points > 1) {
    const double s2 = out.objective / static_cast<double>(n_points - 1);
    out.uncertainty = std::sqrt(2.0 * s2 / curvature);
  }
  out.rate = rate;
  return out;
}

} // namespace qacc
