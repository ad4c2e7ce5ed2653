#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "qacc/params.hpp"
#include "qacc/quench_profile.hpp"

namespace qacc {

// First and second central moments of the motional state at one instant.
struct GaussianState {
  double mean_z = 0.0; // [m]
  double mean_p = 0.0; // [kg m/s]
  double var_z = 0.0;  // [m^2]
  double var_p = 0.0;  // [(kg m/s)^2]
  double cov_zp = 0.0; // [kg m^2/s]
};

/// var_z var_p - cov_zp^2 >= (hbar/2)^2 within a relative tolerance.
bool heisenberg_ok(const GaussianState& s, double rel_tol = 1e-6);

struct Trajectory {
  std::vector<double> times;         // strictly increasing [s]
  std::vector<GaussianState> states; // same length
};

/// Thermal state of the omega0 trap displaced by the static acceleration:
/// (a/omega0^2, 0, hbar(nbar+1/2)/(m omega0), hbar m omega0 (nbar+1/2), 0).
GaussianState initial_state(const PhysicalParams& params, double a);

// Time-dependent drive seen by the moment equations.
struct Drive {
  std::function<double(double)> omega_sq; // omega^2(t) [rad^2/s^2]
  std::function<double(double)> shift;    // trap-center displacement z_k(t) [m]
};

Drive profile_drive(const PhysicalParams& params, const QuenchProfile& profile);

/// Instantaneous omega0 -> omega1 jump at t_quench with the matching
/// trap-center step chi (1 - q); the analytic-oracle configuration.
Drive step_drive(const PhysicalParams& params, double t_quench = 0.0);

/// Default integrator step: 2 pi / (200 omega0).
double default_time_step(const PhysicalParams& params);

/// Classic fixed-step RK4 over the five moment ODEs
///   d<z>  = <p>/m dt
///   d<p>  = (-m w^2(t) (<z> - z_k(t)) + m a - gamma <p>) dt
///   dV_z  = 2 C_zp / m dt
///   dV_p  = (-2 m w^2(t) C_zp - 2 gamma V_p + 2 m kB T0 gamma) dt
///   dC_zp = (-m w^2(t) V_z + V_p/m - gamma C_zp) dt
/// sampled every dt from 0 to t_end. Throws on the resolution guard
/// dt > 2 pi/(50 omega0) and aborts with a diagnostic on non-finite state.
Trajectory integrate(const PhysicalParams& params, const Drive& drive, double a,
                     double t_end, double dt);

Trajectory integrate(const PhysicalParams& params, const QuenchProfile& profile, double a,
                     double t_end, double dt);

struct Means {
  double z = 0.0;
  double p = 0.0;
};

struct Covariance {
  double zz = 0.0;
  double pp = 0.0;
  double zp = 0.0;
};

/// Driven-oscillator first moments after an instantaneous quench at t = 0:
///   <z(t)> = a/omega1^2 + a (1/omega0^2 - 1/omega1^2) cos(omega1 t)
///   <p(t)> = m omega1 a (1/omega1^2 - 1/omega0^2) sin(omega1 t)
Means sudden_quench_means(const PhysicalParams& params, double a, double t);

/// Closed-form covariance under the symplectic rotation at omega1; the
/// determinant equals (kappa hbar / 2)^2 at all times.
Covariance sudden_quench_covariance(const PhysicalParams& params, double t);

/// CSV columns: t_s,mean_z_m,mean_p_kg_m_per_s,var_z_m2,var_p_kg2_m2_per_s2,
/// cov_zp_kg_m2_per_s.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

} // namespace qacc
