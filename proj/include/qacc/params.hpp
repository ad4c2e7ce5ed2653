#pragma once

namespace qacc {

// Complete physical configuration of particle, trap and environment.
// Everything is strict SI; unit conversion happens only at the CLI/config
// boundary.
struct PhysicalParams {
  double mass = 0.0;            // nanoparticle mass [kg]
  double radius = 0.0;          // mean radius [m]
  double density = 0.0;         // [kg/m^3]
  double omega0 = 0.0;          // pre-quench trap frequency [rad/s]
  double omega1 = 0.0;          // post-quench trap frequency [rad/s]
  double nbar = 0.0;            // initial mean phonon number
  double gas_temperature = 0.0; // background gas temperature [K]
  double pressure = 0.0;        // chamber pressure [Pa]
  double gravity = 9.8;         // [m/s^2]
  double theta0 = 0.0;          // intrinsic lattice tilt [rad]
  double chi = 0.0;             // trap-shift amplitude [m]
  double heating_rate = 0.0;    // temperature heating rate [K/s]
};

// Scalars derived from PhysicalParams that every other module shares.
struct DerivedScalars {
  double kappa = 0.0;         // 2 nbar + 1
  double freq_ratio_sq = 0.0; // omega0^2 / omega1^2
  double zero_point_z = 0.0;  // sqrt(hbar / (2 m omega0)) [m]
  double zero_point_p = 0.0;  // sqrt(hbar m omega0 / 2) [kg m/s]
  double gamma_damping = 0.0; // heating_rate / gas_temperature [1/s]
};

/// Canonical parameter set: every value used in the simulations is bundled
/// here so that runs are reproducible from a single named configuration.
PhysicalParams paper_default_params();

/// Throws std::invalid_argument naming the first violated invariant.
void validate(const PhysicalParams& p);

/// Pure function of params; validates first.
DerivedScalars derive(const PhysicalParams& p);

/// Static displacement of a harmonic-potential minimum: a / omega^2.
/// Throws std::invalid_argument for non-positive omega.
double static_displacement(double a, double omega);

} // namespace qacc
