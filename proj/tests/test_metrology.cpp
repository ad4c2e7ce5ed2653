#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qacc/constants.hpp"
#include "qacc/metrology.hpp"
#include "qacc/moment_dynamics.hpp"
#include "qacc/params.hpp"

using namespace qacc;

namespace {

PhysicalParams lossless_params() {
  auto p = paper_default_params();
  p.heating_rate = 0.0;
  p.chi = 0.0;
  return p;
}

std::vector<std::pair<double, double>> sigma_trace_of(const SensitivityCurve& c) {
  std::vector<std::pair<double, double>> out(c.times.size());
  for (size_t i = 0; i < c.times.size(); ++i) out[i] = {c.times[i], c.sigma[i]};
  return out;
}

} // namespace

TEST_CASE("compact QFI form") {
  const auto p = paper_default_params();

  SUBCASE("bracket is 1 at t = 0") {
    const auto d = derive(p);
    const auto f = qfi_sudden(p, 0.0);
    const double base =
        2.0 * p.mass / (constants::hbar * d.kappa * p.omega0 * p.omega0 * p.omega0);
    CHECK(f.value == doctest::Approx(base).epsilon(1e-12));
  }

  SUBCASE("paper value at the half period") {
    const auto f = qfi_sudden(p, constants::pi / p.omega1);
    CHECK(f.value == doctest::Approx(4.96e5).epsilon(0.07)); // within the paper band
  }

  SUBCASE("bracket at half period equals (2r-1)^2") {
    const auto d = derive(p);
    const double r = d.freq_ratio_sq;
    const auto f0 = qfi_sudden(p, 0.0);
    const auto fh = qfi_sudden(p, constants::pi / p.omega1);
    CHECK(fh.value / f0.value ==
          doctest::Approx((2.0 * r - 1.0) * (2.0 * r - 1.0)).epsilon(1e-9));
    // the algebraic identity itself
    CHECK((2.0 * r - 1.0) * (2.0 * r - 1.0) ==
          doctest::Approx(1.0 + 4.0 * r * (r - 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("compact and general Gaussian routes agree to 1e-9") {
  const auto p = paper_default_params();
  for (double frac : {0.0, 0.1, 0.25, 0.5, 0.75, 1.0, 1.4, 2.0, 3.3}) {
    const double t = frac * constants::pi / p.omega1;
    const double compact = qfi_sudden(p, t).value;
    const double general = qfi_sudden_gaussian(p, t);
    CHECK(std::fabs(compact - general) / compact <= 1e-9);
  }
}

TEST_CASE("half-period helper") {
  const auto p = paper_default_params();

  SUBCASE("equals qfi_sudden at pi/omega1") {
    CHECK(qfi_half_period(p).value ==
          doctest::Approx(qfi_sudden(p, constants::pi / p.omega1).value).epsilon(1e-12));
  }

  SUBCASE("no quench enhancement as omega1 -> omega0") {
    auto pp = p;
    pp.omega1 = p.omega0 * (1.0 - 1e-9); // r -> 1
    const auto d = derive(pp);
    const double base =
        2.0 * pp.mass / (constants::hbar * d.kappa * pp.omega0 * pp.omega0 * pp.omega0);
    CHECK(qfi_half_period(pp).value == doctest::Approx(base).epsilon(1e-6));
  }

  SUBCASE("doubling kappa halves F") {
    auto pp = p;
    pp.nbar = p.nbar + 0.5 * (2.0 * p.nbar + 1.0); // kappa' = 2 kappa
    CHECK(qfi_half_period(pp).value ==
          doctest::Approx(qfi_half_period(p).value / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("sensitivity curve against the static-trap oracle") {
  // Quench start delayed so the static-trap plateau is visible.
  const auto p = lossless_params();
  const auto profile = default_profile(p, 1.95e-6, 50e-6);
  const auto curve = sensitivity_curve(p, profile, 0.0, 0.01);

  const auto d = derive(p);
  const double s_static = (1.0 / (p.omega0 * p.omega0)) / (std::sqrt(d.kappa) * d.zero_point_z);
  CHECK(s_static == doctest::Approx(0.2014).epsilon(1e-3)); // oracle value
  // ... and it saturates the t=0 QFI
  CHECK(s_static == doctest::Approx(std::sqrt(qfi_sudden(p, 0.0).value)).epsilon(1e-9));

  size_t i = 0;
  while (curve.times[i] < 40e-6) ++i;
  CHECK(curve.S_values[i / 2] == doctest::Approx(s_static).epsilon(1e-6));
  CHECK(curve.dmu_da[i / 2] ==
        doctest::Approx(1.0 / (p.omega0 * p.omega0)).epsilon(1e-9));
}

TEST_CASE("ideal sudden quench saturates the bound at the half period") {
  const auto p = lossless_params();
  const double a0 = p.gravity * std::sin(p.theta0);
  const double delta_a = 0.01;
  const double t_half = constants::pi / p.omega1;

  SUBCASE("finite-difference S over step-drive integrations, exactly at pi/omega1") {
    const double dt = t_half / std::ceil(t_half / default_time_step(p));
    const auto plus = integrate(p, step_drive(p), a0 + delta_a, t_half, dt);
    const auto minus = integrate(p, step_drive(p), a0 - delta_a, t_half, dt);
    const double dmu =
        (plus.states.back().mean_z - minus.states.back().mean_z) / (2.0 * delta_a);
    const double sigma = std::sqrt(plus.states.back().var_z);
    const auto check = bound_check(std::fabs(dmu) / sigma, qfi_half_period(p).value);
    CHECK(check.ratio == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_FALSE(check.violated);
  }

  SUBCASE("near-step profile approaches saturation at its sigma minimum") {
    const auto profile = default_profile(p, 5e-9);
    SensitivityOptions opt;
    opt.a_center_auto = false;
    opt.a_center = a0;
    opt.dt_out = 1e-7;
    const auto curve = sensitivity_curve(p, profile, 0.0, delta_a, opt);
    const auto trace = sigma_trace_of(curve);
    const double t_opt =
        find_t_opt(curve, trace, profile.tau_exp, constants::two_pi / p.omega1);
    CHECK(t_opt == doctest::Approx(t_half).epsilon(0.02));
    size_t i = 0;
    while (curve.times[i] < t_opt) ++i;
    const auto check = bound_check(curve.S_values[i], qfi_sudden(p, curve.times[i]).value);
    CHECK(check.ratio == doctest::Approx(1.0).epsilon(1e-2));
    CHECK_FALSE(check.violated);
  }
}

TEST_CASE("bound holds along the whole step-quench curve") {
  const auto p = lossless_params();
  const auto profile = default_profile(p, 5e-9);
  const auto curve = sensitivity_curve(p, profile, 0.0, 0.01);
  for (size_t i = 0; i < curve.times.size(); ++i) {
    const auto check = bound_check(curve.S_values[i], qfi_sudden(p, curve.times[i]).value);
    CHECK(check.ratio <= 1.0 + 1e-6);
  }
}

TEST_CASE("position-readout Fisher information saturates the QFI at odd half periods") {
  const auto p = lossless_params();
  for (int k : {1, 3, 5}) {
    const double t = static_cast<double>(k) * constants::pi / p.omega1;
    const double w0_sq = p.omega0 * p.omega0;
    const double w1_sq = p.omega1 * p.omega1;
    const double fx = 1.0 / w1_sq + (1.0 / w0_sq - 1.0 / w1_sq) * std::cos(p.omega1 * t);
    const auto cov = sudden_quench_covariance(p, t);
    const double fi_x = fx * fx / cov.zz;
    const double fq = qfi_sudden(p, t).value;
    CHECK(std::fabs(fi_x - fq) / fq <= 1e-9);
  }
}

TEST_CASE("S is invariant under intensity-unit rescaling") {
  const auto p = paper_default_params();
  auto profile = default_profile(p, 1.95e-6);
  const auto base = sensitivity_curve(p, profile, 16e-3, 0.01);
  profile.intensity0 = 7.3; // only ratios matter
  const auto scaled = sensitivity_curve(p, profile, 16e-3, 0.01);
  REQUIRE(base.times.size() == scaled.times.size());
  for (size_t i = 0; i < base.times.size(); i += 50) {
    CHECK(scaled.S_values[i] == doctest::Approx(base.S_values[i]).epsilon(1e-9));
  }
}

TEST_CASE("find_t_opt regimes") {
  const auto p = paper_default_params();

  SUBCASE("fast quench: first sigma minimum after the quench completes") {
    const auto profile = default_profile(p, 1.95e-6);
    const auto curve = sensitivity_curve(p, profile, 16e-3, 0.01);
    const auto trace = sigma_trace_of(curve);
    const double t_opt =
        find_t_opt(curve, trace, profile.tau_exp, constants::two_pi / p.omega1);
    // near the half period of the shallow trap
    CHECK(t_opt > 5.0 * profile.tau_exp);
    CHECK(t_opt == doctest::Approx(constants::pi / p.omega1).epsilon(0.15));
  }

  SUBCASE("slow quench: response maximum") {
    const auto profile = default_profile(p, 72.9e-6);
    const auto curve = sensitivity_curve(p, profile, 16e-3, 0.01);
    const auto trace = sigma_trace_of(curve);
    const double t_opt =
        find_t_opt(curve, trace, profile.tau_exp, constants::two_pi / p.omega1);
    size_t best = 0;
    for (size_t i = 0; i < curve.times.size(); ++i) {
      if (std::fabs(curve.dmu_da[i]) > std::fabs(curve.dmu_da[best])) best = i;
    }
    CHECK(t_opt == curve.times[best]);
  }

  SUBCASE("monotone sigma with a single response peak returns that peak") {
    SensitivityCurve curve;
    std::vector<std::pair<double, double>> trace;
    for (int i = 0; i <= 100; ++i) {
      const double t = 1e-5 * i;
      const double x = (t - 5e-4) / 5e-4;
      curve.times.push_back(t);
      curve.dmu_da.push_back(1e-9 * (1.0 - x * x)); // single peak at 0.5 ms
      curve.sigma.push_back(1e-12 * (1.0 + t));
      curve.S_values.push_back(0.0);
      trace.emplace_back(t, curve.sigma.back());
    }
    const double t_opt = find_t_opt(curve, trace, 50e-6, 1e-4);
    CHECK(t_opt == doctest::Approx(5e-4).epsilon(1e-9));
  }

  SUBCASE("error when no extremum exists") {
    SensitivityCurve curve;
    std::vector<std::pair<double, double>> trace;
    for (int i = 0; i <= 100; ++i) {
      const double t = 1e-5 * i;
      curve.times.push_back(t);
      curve.dmu_da.push_back(1e-9);
      curve.sigma.push_back(1e-12 * (1.0 + t)); // strictly increasing
      curve.S_values.push_back(0.0);
      trace.emplace_back(t, curve.sigma.back());
    }
    CHECK_THROWS_AS(find_t_opt(curve, trace, 1e-6, 1e-4), std::runtime_error);
  }
}

TEST_CASE("bound_check basics") {
  CHECK(bound_check(0.0, 1.0).ratio == 0.0);
  CHECK_FALSE(bound_check(0.0, 1.0).violated);
  CHECK(bound_check(2.0, 1.0).violated);
  CHECK(bound_check(0.099, 1.0).ratio == doctest::Approx(0.099));
  CHECK_THROWS_AS(bound_check(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("sensitivity_curve rejects bad inputs") {
  const auto p = paper_default_params();
  const auto profile = default_profile(p, 1.95e-6);
  CHECK_THROWS_AS(sensitivity_curve(p, profile, 16e-3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(sensitivity_curve(p, profile, 16e-3, -1.0), std::invalid_argument);
}
