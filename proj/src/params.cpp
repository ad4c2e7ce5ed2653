#include "qacc/params.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qacc/constants.hpp"

namespace qacc {

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw std::invalid_argument("PhysicalParams: " + what);
}

void require(bool ok, const char* invariant, double got) {
  if (!ok) {
    std::ostringstream os;
    os << invariant << " (got " << got << ")";
    fail(os.str());
  }
}

} // namespace

PhysicalParams paper_default_params() {
  PhysicalParams p;
  p.mass = 2.9e-17;
  p.radius = 145e-9;
  p.density = 2260.0;
  p.omega0 = constants::two_pi * 250e3;
  p.omega1 = constants::two_pi * 5.97e3;
  p.nbar = 1.25;
  p.gas_temperature = 354.0;
  p.pressure = 3.0e-6;
  p.gravity = 9.8;
  p.theta0 = -3.24 * constants::pi / 180.0;
  p.chi = 37e-12;
  p.heating_rate = 16e-3;
  return p;
}

void validate(const PhysicalParams& p) {
  require(p.mass > 0.0, "mass must be > 0", p.mass);
  require(p.radius > 0.0, "radius must be > 0", p.radius);
  require(p.density > 0.0, "density must be > 0", p.density);
  require(p.pressure >= 0.0, "pressure must be >= 0", p.pressure);
  require(p.omega1 > 0.0, "omega1 must be > 0", p.omega1);
  require(p.omega0 > p.omega1, "omega0 must exceed omega1 (quench lowers the frequency)",
          p.omega0);
  require(p.nbar >= 0.0, "nbar must be >= 0", p.nbar);
  require(p.gas_temperature > 0.0, "gas_temperature must be > 0", p.gas_temperature);
  require(p.heating_rate >= 0.0, "heating_rate must be >= 0", p.heating_rate);
}

DerivedScalars derive(const PhysicalParams& p) {
  validate(p);
  DerivedScalars d;
  d.kappa = 2.0 * p.nbar + 1.0;
  d.freq_ratio_sq = (p.omega0 * p.omega0) / (p.omega1 * p.omega1);
  d.zero_point_z = std::sqrt(constants::hbar / (2.0 * p.mass * p.omega0));
  d.zero_point_p = std::sqrt(constants::hbar * p.mass * p.omega0 / 2.0);
  // Chosen so the moment-equation noise term 2 m kB T0 gamma heats the free
  // particle at exactly heating_rate in temperature units.
  d.gamma_damping = p.heating_rate / p.gas_temperature;
  return d;
}

double static_displacement(double a, double omega) {
  if (!(omega > 0.0)) {
    throw std::invalid_argument("static_displacement: omega must be > 0");
  }
  return a / (omega * omega);
}

} // namespace qacc
