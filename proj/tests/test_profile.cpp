#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qacc/constants.hpp"
#include "qacc/params.hpp"
#include "qacc/quench_profile.hpp"
#include "qacc/rng.hpp"

using namespace qacc;

namespace {

std::vector<std::pair<double, double>> sample_profile(const QuenchProfile& pr, double t_lo,
                                                      double t_hi, size_t n) {
  std::vector<std::pair<double, double>> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const double t = t_lo + (t_hi - t_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    out.emplace_back(t, intensity(pr, t));
  }
  return out;
}

} // namespace

TEST_CASE("blend weight is 1/2 at the blend center") {
  const auto pr = default_profile(paper_default_params(), 7.24e-6);
  CHECK(blend_weight(pr, pr.ts) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("intensity limits") {
  const auto params = paper_default_params();
  const auto pr = default_profile(params, 1.95e-6);

  SUBCASE("flat at I0 before the quench") {
    CHECK(intensity(pr, pr.t0 - 1e-3) == doctest::Approx(pr.intensity0).epsilon(1e-12));
    CHECK(intensity(pr, pr.t0 - 50e-6) == doctest::Approx(pr.intensity0).epsilon(1e-12));
  }

  SUBCASE("exponential branch lands on q I0 at t0 + 5 tau, asymptote stays within the residual") {
    const double at_5tau = intensity(pr, pr.t0 + 5.0 * pr.tau_exp);
    CHECK(at_5tau == doctest::Approx(pr.q * pr.intensity0).epsilon(1e-9));

    const double residual = std::fabs(pr.q - 1.0) * std::exp(-5.0) / (1.0 - std::exp(-5.0));
    const double late = intensity(pr, pr.t0 + 60.0 * pr.tau_exp);
    CHECK(std::fabs(late - pr.q * pr.intensity0) / pr.intensity0 <= residual * (1.0 + 1e-9));
  }

  SUBCASE("continuous and non-increasing after t0 on a dense grid") {
    double prev = intensity(pr, pr.t0);
    for (int i = 1; i <= 10000; ++i) {
      const double t = pr.t0 + 30.0 * pr.tau_exp * i / 10000.0;
      const double cur = intensity(pr, t);
      CHECK(cur <= prev + 1e-12 * pr.intensity0);
      prev = cur;
    }
  }
}

TEST_CASE("omega follows the intensity root") {
  const auto params = paper_default_params();
  const auto pr = default_profile(params, 3.77e-6);

  SUBCASE("identity at I0") {
    CHECK(omega_of_t(params, pr, pr.t0 - 1e-3) == doctest::Approx(params.omega0).epsilon(1e-9));
  }

  SUBCASE("q matches the paper frequency ratio") {
    CHECK(pr.q == doctest::Approx(5.70254e-4).epsilon(1e-4));
    // at the asymptote omega -> omega1
    CHECK(omega_of_t(params, pr, pr.t0 + 5.0 * pr.tau_exp) ==
          doctest::Approx(params.omega1).epsilon(1e-6));
  }

  SUBCASE("algebraic identity omega^2/omega0^2 = I/I0") {
    for (double t : {-1e-6, 0.5e-6, 2e-6, 5e-6, 20e-6, 100e-6}) {
      const double w = omega_of_t(params, pr, t);
      CHECK(w * w / (params.omega0 * params.omega0) ==
            doctest::Approx(intensity(pr, t) / pr.intensity0).epsilon(1e-12));
    }
  }
}

TEST_CASE("trap shift") {
  const auto params = paper_default_params();
  const auto pr = default_profile(params, 1.95e-6);

  SUBCASE("zero before the quench") {
    CHECK(trap_shift(params, pr, pr.t0 - 10e-6) == doctest::Approx(0.0).epsilon(1e-15));
  }

  SUBCASE("asymptote chi (1 - q)") {
    CHECK(trap_shift(params, pr, pr.t0 + 100.0 * pr.tau_exp) ==
          doctest::Approx(36.98e-12).epsilon(1e-3));
  }

  SUBCASE("identically zero for chi = 0") {
    auto p = params;
    p.chi = 0.0;
    for (double t : {-1e-6, 0.0, 1e-6, 10e-6, 1e-3}) {
      CHECK(trap_shift(p, pr, t) == 0.0);
    }
  }
}

TEST_CASE("profile fitting") {
  const auto params = paper_default_params();

  SUBCASE("noiseless self-consistency") {
    const auto truth = default_profile(params, 7.24e-6);
    const auto samples = sample_profile(truth, -5e-6, 60e-6, 400);
    auto init = truth;
    init.q *= 1.8;
    init.tau_exp *= 1.3;
    init.ts *= 0.8;
    const auto fit = fit_profile(samples, init);
    CHECK(fit.profile.tau_exp == doctest::Approx(truth.tau_exp).epsilon(1e-6));
    CHECK(fit.profile.q == doctest::Approx(truth.q).epsilon(1e-4));
    CHECK(fit.profile.intensity0 == doctest::Approx(truth.intensity0).epsilon(1e-6));
  }

  SUBCASE("pure exponential trace recovers tau") {
    // Samples from the normalized exponential family before its 5 tau hold;
    // an R ~ 1 start makes the blended model coincide with that family.
    const double tau = 1.95e-6;
    const double q = 5.7e-4;
    const double norm = 1.0 - std::exp(-5.0);
    std::vector<std::pair<double, double>> samples;
    for (int i = 0; i < 300; ++i) {
      const double t = 4.2 * tau * i / 299.0;
      samples.emplace_back(t, 1.0 + (q - 1.0) / norm * (1.0 - std::exp(-t / tau)));
    }
    QuenchProfile init;
    init.intensity0 = 1.0;
    init.q = q * 1.5;
    init.tau_exp = tau * 1.4;
    init.t0 = 0.0;
    init.ts = -10.0 * tau; // blend saturated to the exponential branch
    init.Ts = tau / 2.0;
    const auto fit = fit_profile(samples, init);
    const double err = std::fabs(fit.profile.tau_exp - tau);
    CHECK(err <= std::max(fit.std_errors.tau_exp, 1e-9 * tau));
  }

  SUBCASE("paper tau grid is representable") {
    for (double tau_us : {1.95, 3.77, 7.24, 14.9, 36.6, 72.9}) {
      const auto pr = default_profile(params, tau_us * 1e-6);
      CHECK_NOTHROW(validate(pr));
      CHECK(intensity(pr, pr.t0 + 5.0 * pr.tau_exp) ==
            doctest::Approx(pr.q * pr.intensity0).epsilon(1e-6));
    }
  }

  SUBCASE("1% noise: tau recovered within 3 standard errors, 100 seeded trials") {
    const double tau = 7.24e-6;
    const auto truth = default_profile(params, tau);
    int ok = 0;
    for (uint64_t seed = 0; seed < 100; ++seed) {
      GaussianSampler rng(seed);
      auto samples = sample_profile(truth, -5e-6, 70e-6, 200);
      for (auto& [t, y] : samples) y += 0.01 * truth.intensity0 * rng.normal();
      auto init = truth;
      init.tau_exp *= 1.2;
      init.q *= 1.5;
      try {
        const auto fit = fit_profile(samples, init);
        const double se = fit.std_errors.tau_exp;
        if (std::isfinite(se) && std::fabs(fit.profile.tau_exp - tau) <= 3.0 * se) ++ok;
      } catch (const std::runtime_error&) {
      }
    }
    CHECK(ok >= 95);
  }

  SUBCASE("idempotent refit") {
    const auto truth = default_profile(params, 14.9e-6);
    auto samples = sample_profile(truth, -10e-6, 120e-6, 250);
    GaussianSampler rng(42);
    for (auto& [t, y] : samples) y += 0.02 * rng.normal();
    const auto first = fit_profile(samples, truth);
    const auto refit_samples = sample_profile(first.profile, -10e-6, 120e-6, 250);
    const auto second = fit_profile(refit_samples, first.profile);
    CHECK(second.profile.q == doctest::Approx(first.profile.q).epsilon(1e-9));
    CHECK(second.profile.tau_exp == doctest::Approx(first.profile.tau_exp).epsilon(1e-9));
    CHECK(second.profile.Ts == doctest::Approx(first.profile.Ts).epsilon(1e-9));
  }

  SUBCASE("rejects too few samples") {
    const auto truth = default_profile(params, 1.95e-6);
    const auto samples = sample_profile(truth, 0.0, 10e-6, 5);
    CHECK_THROWS_AS(fit_profile(samples, truth), std::invalid_argument);
  }
}

TEST_CASE("reported 1/e constant matches the exponential constant in the pure limit") {
  // With ts << t0 the blend is pure exponential: the 1/e crossing of the total
  // drop happens close to tau_exp (exact up to the (1-e^-5) normalization).
  QuenchProfile pr;
  pr.intensity0 = 1.0;
  pr.q = 5.7e-4;
  pr.tau_exp = 10e-6;
  pr.t0 = 0.0;
  pr.ts = -20.0 * pr.tau_exp;
  pr.Ts = pr.tau_exp / 2.0;
  const double t1e = time_constant_1e(pr);
  // Solve 1 - (1-e^-t/tau)/(1-e^-5) = 1/e for t/tau: t = -tau ln(1 - (1-1/e)(1-e^-5))
  const double expected = -pr.tau_exp * std::log(1.0 - (1.0 - std::exp(-1.0)) *
                                                           (1.0 - std::exp(-5.0)));
  CHECK(t1e == doctest::Approx(expected).epsilon(1e-6));
  CHECK(t1e == doctest::Approx(pr.tau_exp).epsilon(0.01));
}

TEST_CASE("profile validation errors") {
  QuenchProfile pr;
  pr.q = 1.5;
  pr.tau_exp = 1e-6;
  pr.Ts = 1e-6;
  CHECK_THROWS_AS(validate(pr), std::invalid_argument);
  pr.q = 0.5;
  pr.tau_exp = -1.0;
  CHECK_THROWS_AS(validate(pr), std::invalid_argument);
}
