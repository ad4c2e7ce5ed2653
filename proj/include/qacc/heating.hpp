#pragma once

#include <span>
#include <utility>
#include <vector>

#include "qacc/params.hpp"
#include "qacc/quench_profile.hpp"

namespace qacc {

struct GasComponent {
  double molecular_mass = 0.0; // [kg]
  double fraction = 0.0;       // partial-pressure fraction
};

struct GasSpec {
  std::vector<GasComponent> components; // fractions sum to 1
};

inline constexpr double kNitrogenMass = 4.65e-26;  // [kg]
inline constexpr double kHydrogenMass = 3.3211e-27; // 2 amu [kg]

GasSpec nitrogen_gas();
GasSpec hydrogen_gas();
GasSpec nitrogen_hydrogen_mix(double nitrogen_fraction);

void validate(const GasSpec& gas);

/// Kinetic-theory heating rate from background-gas collisions [K/s]:
///   Gamma = B T0 P / (R rho),  B = (4 + pi/2) sqrt(m_gas / (2 pi kB T0)),
/// combined linearly over mixture components by fraction.
double gas_heating_rate(const PhysicalParams& params, const GasSpec& gas);

/// Photon-recoil heating is excluded by magnitude (two orders below the gas
/// term in this regime); kept as an explicit zero so budgets stay complete.
double photon_recoil_heating_rate(const PhysicalParams& params);

struct LpnSpec {
  double wavelength = 0.0;      // lambda [m]
  double mirror_distance = 0.0; // d [m]
  double freq_noise_psd = 0.0;  // S_nu at f1 [Hz^2/Hz]
  double light_speed = 2.99792458e8;
};

struct LpnHeating {
  double displacement_psd = 0.0;  // (lambda d / c)^2 S_nu [m^2/Hz]
  double energy_rate = 0.0;       // Gamma_E = m omega1^4 Pn^2 / 2 [J/s]
  double phonon_rate = 0.0;       // Gamma_E / (hbar omega1) [1/s]
  double temperature_rate = 0.0;  // Gamma_E / kB [K/s]
};

/// On-resonance laser-phase-noise heating at omega1.
LpnHeating lpn_heating(const PhysicalParams& params, const LpnSpec& spec);

// One observed width trace sigma(t), aligned so the quench starts at t = 0.
struct SigmaTrace {
  double tau = 0.0;                             // quench constant [s]
  std::vector<std::pair<double, double>> points; // (t [s], sigma [m])
};

struct HeatingFitOptions {
  double grid_min = 0.0;      // [K/s]
  double grid_max = 0.040;    // [K/s]
  double grid_step = 0.00025; // [K/s]
  double dt = 0.0;            // integrator step, 0: default
};

struct HeatingFit {
  double rate = 0.0;        // [K/s]
  double uncertainty = 0.0; // [K/s], curvature-based
  bool at_boundary = false; // grid minimum landed on an edge
  double objective = 0.0;   // least-squares minimum
};

/// Scans the heating rate over a grid, simulating sigma(t) for every trace
/// through the moment equations, and refines the least-squares minimum with a
/// parabolic step. profiles[i] drives traces[i].
HeatingFit infer_heating_rate(std::span<const SigmaTrace> traces, const PhysicalParams& params,
                              std::span<const QuenchProfile> profiles,
                              const HeatingFitOptions& options = {});

/// The inference objective at one candidate rate: sum of squared deviations
/// between observed and simulated widths over all traces.
double heating_objective(std::span<const SigmaTrace> traces, const PhysicalParams& params,
                         std::span<const QuenchProfile> profiles, double rate,
                         double dt = 0.0);

} // namespace qacc
