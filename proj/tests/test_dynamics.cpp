#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "qacc/constants.hpp"
#include "qacc/moment_dynamics.hpp"
#include "qacc/params.hpp"

using namespace qacc;

namespace {

PhysicalParams lossless_params() {
  auto p = paper_default_params();
  p.heating_rate = 0.0; // gamma = 0
  p.chi = 0.0;
  return p;
}

double total_energy(const PhysicalParams& p, const GaussianState& s, double omega) {
  return s.var_p / (2.0 * p.mass) + 0.5 * p.mass * omega * omega * s.var_z;
}

} // namespace

TEST_CASE("initial state") {
  const auto p = paper_default_params();

  SUBCASE("zero force gives centered state") {
    const auto s = initial_state(p, 0.0);
    CHECK(s.mean_z == 0.0);
    CHECK(s.mean_p == 0.0);
  }

  SUBCASE("ground state saturates Heisenberg") {
    auto pp = p;
    pp.nbar = 0.0;
    const auto s = initial_state(pp, 0.0);
    CHECK(s.var_z * s.var_p ==
          doctest::Approx(constants::hbar * constants::hbar / 4.0).epsilon(1e-12));
    CHECK(heisenberg_ok(s));
  }

  SUBCASE("thermal variance at paper defaults") {
    // hbar (nbar + 1/2) / (m omega0), evaluated independently as kappa z0^2
    const auto d = derive(p);
    const auto s = initial_state(p, 0.0);
    CHECK(s.var_z ==
          doctest::Approx(d.kappa * d.zero_point_z * d.zero_point_z).epsilon(1e-12));
    CHECK(s.var_z == doctest::Approx(4.0513e-24).epsilon(1e-3));
    CHECK(s.var_p ==
          doctest::Approx(d.kappa * d.zero_point_p * d.zero_point_p).epsilon(1e-12));
  }

  SUBCASE("static displacement sets the mean") {
    const double a = 0.5;
    const auto s = initial_state(p, a);
    CHECK(s.mean_z == doctest::Approx(a / (p.omega0 * p.omega0)).epsilon(1e-15));
  }
}

TEST_CASE("sudden-quench closed forms") {
  const auto p = lossless_params();
  const double a = 0.5;

  SUBCASE("continuity at t = 0") {
    const auto m = sudden_quench_means(p, a, 0.0);
    const auto init = initial_state(p, a);
    CHECK(m.z == doctest::Approx(init.mean_z).epsilon(1e-12));
    CHECK(m.p == doctest::Approx(0.0));
  }

  SUBCASE("no drive, no motion") {
    for (double t : {0.0, 1e-5, 3e-4}) {
      const auto m = sudden_quench_means(p, 0.0, t);
      CHECK(m.z == 0.0);
      CHECK(m.p == 0.0);
    }
  }

  SUBCASE("half period is the displacement maximum") {
    const double t_half = constants::pi / p.omega1;
    const auto m = sudden_quench_means(p, a, t_half);
    const double w0_sq = p.omega0 * p.omega0;
    const double w1_sq = p.omega1 * p.omega1;
    CHECK(m.z == doctest::Approx(a * (2.0 / w1_sq - 1.0 / w0_sq)).epsilon(1e-9));
    // scan confirms it is the maximum
    for (double frac : {0.1, 0.3, 0.7, 0.9, 1.3}) {
      CHECK(sudden_quench_means(p, a, frac * t_half).z <= m.z * (1.0 + 1e-12));
    }
  }

  SUBCASE("initial covariance is thermal") {
    const auto c = sudden_quench_covariance(p, 0.0);
    const auto d = derive(p);
    CHECK(c.zz == doctest::Approx(d.kappa * constants::hbar / (2.0 * p.mass * p.omega0))
                      .epsilon(1e-12));
    CHECK(c.pp ==
          doctest::Approx(d.kappa * constants::hbar * p.mass * p.omega0 / 2.0).epsilon(1e-12));
    CHECK(c.zp == 0.0);
  }

  SUBCASE("breathing maximum at quarter period is r times the initial variance") {
    const auto d = derive(p);
    const auto c0 = sudden_quench_covariance(p, 0.0);
    const auto c = sudden_quench_covariance(p, constants::pi / (2.0 * p.omega1));
    CHECK(c.zz == doctest::Approx(d.freq_ratio_sq * c0.zz).epsilon(1e-9));
  }

  SUBCASE("determinant is conserved at (kappa hbar / 2)^2") {
    const auto d = derive(p);
    const double target = d.kappa * constants::hbar / 2.0;
    for (double t : {0.0, 3e-6, 17e-6, 42e-6, 83.75e-6, 130e-6, 350e-6}) {
      const auto c = sudden_quench_covariance(p, t);
      CHECK(std::sqrt(c.zz * c.pp - c.zp * c.zp) == doctest::Approx(target).epsilon(1e-12));
    }
  }
}

TEST_CASE("integration: stationary thermal state of a static trap") {
  auto p = lossless_params();
  const double w0_sq = p.omega0 * p.omega0;
  const Drive constant{[w0_sq](double) { return w0_sq; }, [](double) { return 0.0; }};
  const double dt = default_time_step(p);
  const double t_end = 100.0 * constants::two_pi / p.omega0;
  const auto traj = integrate(p, constant, 0.0, t_end, dt);
  const auto& init = traj.states.front();
  for (const auto& s : traj.states) {
    CHECK(std::fabs(s.var_z - init.var_z) / init.var_z <= 1e-9);
    CHECK(std::fabs(s.var_p - init.var_p) / init.var_p <= 1e-9);
    CHECK(std::fabs(s.cov_zp) / (init.var_z * p.mass * p.omega0) <= 1e-9);
    CHECK(std::fabs(s.mean_z) <= 1e-30);
  }
}

TEST_CASE("integration matches the sudden-quench oracles over 3 post-quench periods") {
  const auto p = lossless_params();
  const double a = p.gravity * std::sin(p.theta0);
  const double dt = default_time_step(p);
  const double t_end = 3.0 * constants::two_pi / p.omega1;
  const auto traj = integrate(p, step_drive(p), a, t_end, dt);

  // sup norms of the reference components normalize the mean/cov errors
  double amp_z = 0.0, amp_p = 0.0, amp_zp = 0.0;
  for (double t : traj.times) {
    const auto m = sudden_quench_means(p, a, t);
    const auto c = sudden_quench_covariance(p, t);
    amp_z = std::max(amp_z, std::fabs(m.z));
    amp_p = std::max(amp_p, std::fabs(m.p));
    amp_zp = std::max(amp_zp, std::fabs(c.zp));
  }

  double worst = 0.0;
  for (size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    const auto& s = traj.states[i];
    const auto m = sudden_quench_means(p, a, t);
    const auto c = sudden_quench_covariance(p, t);
    worst = std::max(worst, std::fabs(s.mean_z - m.z) / amp_z);
    worst = std::max(worst, std::fabs(s.mean_p - m.p) / amp_p);
    // variances never vanish: pointwise relative error as specified
    worst = std::max(worst, std::fabs(s.var_z - c.zz) / c.zz);
    worst = std::max(worst, std::fabs(s.var_p - c.pp) / c.pp);
    worst = std::max(worst, std::fabs(s.cov_zp - c.zp) / amp_zp);
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("integration error scales as dt^4") {
  const auto p = lossless_params();
  const double a = 0.3;
  const double t_end = constants::two_pi / p.omega1;
  auto error_at = [&](double dt) {
    const auto traj = integrate(p, step_drive(p), a, t_end, dt);
    double worst = 0.0;
    const auto ref = sudden_quench_covariance(p, traj.times.back());
    worst = std::fabs(traj.states.back().var_z - ref.zz) / ref.zz;
    return worst;
  };
  const double coarse = error_at(default_time_step(p) * 4.0);
  const double fine = error_at(default_time_step(p));
  // 4x finer step: expect ~256x smaller error; allow slack for roundoff
  CHECK(coarse / fine > 100.0);
}

TEST_CASE("symplectic purity with gamma = 0") {
  const auto p = lossless_params();
  const auto traj =
      integrate(p, step_drive(p), 0.2, constants::two_pi / p.omega1, default_time_step(p));
  const auto& init = traj.states.front();
  const double det0 = init.var_z * init.var_p - init.cov_zp * init.cov_zp;
  for (const auto& s : traj.states) {
    const double det = s.var_z * s.var_p - s.cov_zp * s.cov_zp;
    CHECK(std::fabs(det - det0) / det0 <= 1e-9);
    CHECK(heisenberg_ok(s));
  }
}

TEST_CASE("linearity in the drive acceleration with chi = 0") {
  const auto p = lossless_params();
  const auto profile = default_profile(p, 1.95e-6);
  const double dt = default_time_step(p);
  const double t_end = 1.5 * constants::two_pi / p.omega1;
  const double a = 0.2;
  const double c = 3.0;
  const auto one = integrate(p, profile, a, t_end, dt);
  const auto scaled = integrate(p, profile, c * a, t_end, dt);
  double amp = 0.0;
  for (const auto& s : one.states) amp = std::max(amp, std::fabs(s.mean_z));
  for (size_t i = 0; i < one.times.size(); ++i) {
    CHECK(std::fabs(scaled.states[i].mean_z - c * one.states[i].mean_z) / (c * amp) <= 1e-9);
  }
}

TEST_CASE("free-limit heating rate of the noise term") {
  // Static trap at omega1, gamma per core-model: the window-averaged energy
  // gain must equal kB * heating_rate (the coherent part conserves energy).
  auto p = paper_default_params();
  p.chi = 0.0;
  const double w1_sq = p.omega1 * p.omega1;
  const Drive trap1{[w1_sq](double) { return w1_sq; }, [](double) { return 0.0; }};
  const double dt = default_time_step(p);
  const double window = 1e-3;
  const auto traj = integrate(p, trap1, 0.0, window, dt);
  const double e0 = total_energy(p, traj.states.front(), p.omega1);
  const double e1 = total_energy(p, traj.states.back(), p.omega1);
  const double rate = (e1 - e0) / window;
  CHECK(rate == doctest::Approx(constants::boltzmann * p.heating_rate).epsilon(0.05));
}

TEST_CASE("heating monotonicity between breathing-averaged samples") {
  const auto p = paper_default_params(); // 16 mK/s
  const auto profile = default_profile(p, 1.95e-6);
  const double dt = default_time_step(p);
  const double t_end = 6.0 * constants::two_pi / p.omega1;
  const auto traj = integrate(p, profile, 0.0, t_end, dt);

  // Average total energy per breathing period (pi/omega1) after the quench.
  const double t_start = 5.0 * profile.tau_exp;
  const double period = constants::pi / p.omega1;
  std::vector<double> averages;
  size_t i = 0;
  while (i < traj.times.size() && traj.times[i] < t_start) ++i;
  while (i < traj.times.size()) {
    const double t_block = traj.times[i] + period;
    double sum = 0.0;
    size_t count = 0;
    while (i < traj.times.size() && traj.times[i] < t_block) {
      sum += total_energy(p, traj.states[i], p.omega1);
      ++count;
      ++i;
    }
    if (count > 10) averages.push_back(sum / static_cast<double>(count));
  }
  REQUIRE(averages.size() >= 5);
  for (size_t k = 1; k < averages.size(); ++k) {
    CHECK(averages[k] >= averages[k - 1]);
  }
}

TEST_CASE("paper-default quench shows breathing plus envelope growth") {
  const auto p = paper_default_params();
  const auto profile = default_profile(p, 1.95e-6);
  const auto traj =
      integrate(p, profile, p.gravity * std::sin(p.theta0),
                3.0 * constants::two_pi / p.omega1, default_time_step(p));

  // count local maxima of sigma after the quench
  int maxima = 0;
  const size_t stride = 25; // 0.5 us on the default grid
  std::vector<double> sig;
  std::vector<double> times;
  for (size_t i = 0; i < traj.times.size(); i += stride) {
    if (traj.times[i] < 5.0 * profile.tau_exp) continue;
    sig.push_back(std::sqrt(traj.states[i].var_z));
    times.push_back(traj.times[i]);
  }
  for (size_t i = 1; i + 1 < sig.size(); ++i) {
    if (sig[i] > sig[i - 1] && sig[i] >= sig[i + 1]) ++maxima;
  }
  CHECK(maxima >= 3);

  // envelope growth: compare breathing minima across periods
  const double period = constants::pi / p.omega1;
  double first_min = 1e9, last_min = 1e9;
  for (size_t i = 0; i < sig.size(); ++i) {
    if (times[i] < times.front() + period) first_min = std::min(first_min, sig[i]);
    if (times[i] > times.back() - period) last_min = std::min(last_min, sig[i]);
  }
  CHECK(last_min > first_min);
}

TEST_CASE("integration guard rails") {
  const auto p = paper_default_params();
  const auto profile = default_profile(p, 1.95e-6);

  SUBCASE("resolution guard") {
    const double dt_bad = constants::two_pi / (10.0 * p.omega0);
    CHECK_THROWS_AS(integrate(p, profile, 0.0, 1e-5, dt_bad), std::invalid_argument);
  }

  SUBCASE("t_end must be positive") {
    CHECK_THROWS_AS(integrate(p, profile, 0.0, -1e-5, default_time_step(p)),
                    std::invalid_argument);
  }

  SUBCASE("strictly increasing, nonempty trajectory") {
    const auto traj = integrate(p, profile, 0.0, 2e-5, default_time_step(p));
    REQUIRE(!traj.times.empty());
    for (size_t i = 1; i < traj.times.size(); ++i) {
      CHECK(traj.times[i] > traj.times[i - 1]);
    }
  }
}
