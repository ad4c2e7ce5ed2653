#include "qacc/moment_dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qacc/constants.hpp"

namespace qacc {

namespace {

struct Moments {
  double z, p, vz, vp, czp;
};

Moments operator+(const Moments& a, const Moments& b) {
  return {a.z + b.z, a.p + b.p, a.vz + b.vz, a.vp + b.vp, a.czp + b.czp};
}

Moments operator*(double s, const Moments& m) {
  return {s * m.z, s * m.p, s * m.vz, s * m.vp, s * m.czp};
}

} // namespace

bool heisenberg_ok(const GaussianState& s, double rel_tol) {
  const double limit = constants::hbar * constants::hbar / 4.0;
  const double det = s.var_z * s.var_p - s.cov_zp * s.cov_zp;
  return s.var_z > 0.0 && s.var_p > 0.0 && det >= limit * (1.0 - rel_tol);
}

GaussianState initial_state(const PhysicalParams& params, double a) {
  validate(params);
  GaussianState s;
  const double occ = params.nbar + 0.5;
  s.mean_z = a / (params.omega0 * params.omega0);
  s.mean_p = 0.0;
  s.var_z = constants::hbar / (params.mass * params.omega0) * occ;
  s.var_p = constants::hbar * params.mass * params.omega0 * occ;
  s.cov_zp = 0.0;
  return s;
}

Drive profile_drive(const PhysicalParams& params, const QuenchProfile& profile) {
  validate(profile);
  const double w0_sq = params.omega0 * params.omega0;
  const double i0 = profile.intensity0;
  return Drive{
      [params, profile, w0_sq, i0](double t) { return w0_sq * intensity(profile, t) / i0; },
      [params, profile](double t) { return trap_shift(params, profile, t); },
  };
}

Drive step_drive(const PhysicalParams& params, double t_quench) {
  const double w0_sq = params.omega0 * params.omega0;
  const double w1_sq = params.omega1 * params.omega1;
  const double shift = params.chi * (1.0 - w1_sq / w0_sq);
  return Drive{
      [w0_sq, w1_sq, t_quench](double t) { return t < t_quench ? w0_sq : w1_sq; },
      [shift, t_quench](double t) { return t < t_quench ? 0.0 : shift; },
  };
}

double default_time_step(const PhysicalParams& params) {
  return constants::two_pi / (200.0 * params.omega0);
}

Trajectory integrate(const PhysicalParams& params, const Drive& drive, double a,
                     double t_end, double dt) {
  validate(params);
  if (!(t_end > 0.0)) throw std::invalid_argument("integrate: t_end must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
  const double dt_max = constants::two_pi / (50.0 * params.omega0);
  if (dt > dt_max) {
    std::ostringstream os;
    os << "integrate: dt = " << dt << " violates the resolution guard 2pi/(50 omega0) = "
       << dt_max;
    throw std::invalid_argument(os.str());
  }

  const double m = params.mass;
  const double gamma = derive(params).gamma_damping;
  const double noise = 2.0 * m * constants::boltzmann * params.gas_temperature * gamma;

  auto rhs = [&](double t, const Moments& y) -> Moments {
    const double w2 = drive.omega_sq(t);
    const double zk = drive.shift(t);
    Moments d;
    d.z = y.p / m;
    d.p = -m * w2 * (y.z - zk) + m * a - gamma * y.p;
    d.vz = 2.0 * y.czp / m;
    d.vp = -2.0 * m * w2 * y.czp - 2.0 * gamma * y.vp + noise;
    d.czp = -m * w2 * y.vz + y.vp / m - gamma * y.czp;
    return d;
  };

  const size_t steps = static_cast<size_t>(std::ceil(t_end / dt - 1e-9));
  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);

  const GaussianState init = initial_state(params, a);
  Moments y{init.mean_z, init.mean_p, init.var_z, init.var_p, init.cov_zp};

  auto record = [&](double t, const Moments& v) {
    if (!(std::isfinite(v.z) && std::isfinite(v.p) && std::isfinite(v.vz) &&
          std::isfinite(v.vp) && std::isfinite(v.czp))) {
      std::ostringstream os;
      os << "integrate: non-finite state at t = " << t << " (mean_z=" << v.z
         << ", var_z=" << v.vz << "); integration unstable";
      throw std::runtime_error(os.str());
    }
    traj.times.push_back(t);
    traj.states.push_back({v.z, v.p, v.vz, v.vp, v.czp});
  };

  record(0.0, y);
  for (size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const Moments k1 = rhs(t, y);
    const Moments k2 = rhs(t + 0.5 * dt, y + (0.5 * dt) * k1);
    const Moments k3 = rhs(t + 0.5 * dt, y + (0.5 * dt) * k2);
    const Moments k4 = rhs(t + dt, y + dt * k3);
    y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    record(static_cast<double>(i + 1) * dt, y);
  }
  return traj;
}

Trajectory integrate(const PhysicalParams& params, const QuenchProfile& profile, double a,
                     double t_end, double dt) {
  return integrate(params, profile_drive(params, profile), a, t_end, dt);
}

Means sudden_quench_means(const PhysicalParams& params, double a, double t) {
  if (t < 0.0) throw std::invalid_argument("sudden_quench_means: t must be >= 0");
  const double w0_sq = params.omega0 * params.omega0;
  const double w1_sq = params.omega1 * params.omega1;
  const double spread = 1.0 / w0_sq - 1.0 / w1_sq; // negative for a downward quench
  Means out;
  out.z = a / w1_sq + a * spread * std::cos(params.omega1 * t);
  out.p = -params.mass * params.omega1 * a * spread * std::sin(params.omega1 * t);
  return out;
}

Covariance sudden_quench_covariance(const PhysicalParams& params, double t) {
  if (t < 0.0) throw std::invalid_argument("sudden_quench_covariance: t must be >= 0");
  const auto d = derive(params);
  const double c = std::cos(params.omega1 * t);
  const double s = std::sin(params.omega1 * t);
  const double ratio = params.omega0 / params.omega1;
  Covariance out;
  out.zz = d.kappa * constants::hbar / (2.0 * params.mass * params.omega0) *
           (c * c + ratio * ratio * s * s);
  out.pp = d.kappa * constants::hbar * params.mass * params.omega0 / 2.0 *
           (c * c + s * s / (ratio * ratio));
  out.zp = d.kappa * constants::hbar / 4.0 * (ratio - 1.0 / ratio) *
           std::sin(2.0 * params.omega1 * t);
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t_s,mean_z_m,mean_p_kg_m_per_s,var_z_m2,var_p_kg2_m2_per_s2,cov_zp_kg_m2_per_s\n";
  char line[256];
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const auto& s = traj.states[i];
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", traj.times[i],
                  s.mean_z, s.mean_p, s.var_z, s.var_p, s.cov_zp);
    os << line;
  }
}

} // namespace qacc
