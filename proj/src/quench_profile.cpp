#include "qacc/quench_profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qacc/least_squares.hpp"

namespace qacc {

namespace {

constexpr double kExpNorm = 1.0 - 0.006737946999085467; // 1 - e^-5

// Both branches ramp from I0 down to q*I0 and hold there: constant before t0,
// constant after reaching the target. Without the hold the raw forms keep
// falling below q*I0 (the exponential branch even below zero for small q),
// which would make omega(t) imaginary.
double linear_branch(const QuenchProfile& pr, double t) {
  // min/max instead of std::clamp: fit excursions may visit Ts < 0.
  const double dt = std::min(std::max(t - pr.t0, 0.0), pr.Ts);
  return pr.intensity0 * (pr.q - 1.0) / pr.Ts * dt + pr.intensity0;
}

double exponential_branch(const QuenchProfile& pr, double t) {
  // Normalized so the branch lands on q*I0 exactly at t0 + 5 tau_exp.
  const double dt = std::min(std::max(t - pr.t0, 0.0), 5.0 * pr.tau_exp);
  const double drop = 1.0 - std::exp(-dt / pr.tau_exp);
  return pr.intensity0 * (1.0 + (pr.q - 1.0) / kExpNorm * drop);
}

} // namespace

QuenchProfile default_profile(const PhysicalParams& params, double tau_exp, double t0) {
  validate(params);
  if (!(tau_exp > 0.0)) {
    throw std::invalid_argument("default_profile: tau_exp must be > 0");
  }
  QuenchProfile pr;
  pr.intensity0 = 1.0;
  pr.q = (params.omega1 * params.omega1) / (params.omega0 * params.omega0);
  pr.tau_exp = tau_exp;
  pr.t0 = t0;
  // Blend centered at the quench start: the linear branch only carries the
  // first ~tau/4 and hands over before it can drag the blend non-monotone.
  pr.ts = t0;
  pr.Ts = tau_exp / 2.0;
  return pr;
}

void validate(const QuenchProfile& pr) {
  auto fail = [](const char* what, double got) {
    std::ostringstream os;
    os << "QuenchProfile: " << what << " (got " << got << ")";
    throw std::invalid_argument(os.str());
  };
  if (!(pr.intensity0 > 0.0)) fail("intensity0 must be > 0", pr.intensity0);
  if (!(pr.q > 0.0 && pr.q < 1.0)) fail("q must lie in (0, 1)", pr.q);
  if (!(pr.tau_exp > 0.0)) fail("tau_exp must be > 0", pr.tau_exp);
  if (!(pr.Ts > 0.0)) fail("Ts must be > 0", pr.Ts);
}

double blend_weight(const QuenchProfile& pr, double t) {
  return 0.5 * (1.0 + std::tanh((t - pr.ts) / pr.Ts));
}

double intensity(const QuenchProfile& pr, double t) {
  const double r = blend_weight(pr, t);
  return linear_branch(pr, t) * (1.0 - r) + exponential_branch(pr, t) * r;
}

double omega_of_t(const PhysicalParams& params, const QuenchProfile& pr, double t) {
  const double i = intensity(pr, t);
  if (!(i > 0.0)) {
    std::ostringstream os;
    os << "omega_of_t: non-positive intensity " << i << " at t = " << t;
    throw std::domain_error(os.str());
  }
  return params.omega0 * std::sqrt(i / pr.intensity0);
}

double trap_shift(const PhysicalParams& params, const QuenchProfile& pr, double t) {
  return params.chi * (1.0 - intensity(pr, t) / pr.intensity0);
}

ProfileFit fit_profile(std::span<const std::pair<double, double>> samples,
                       const QuenchProfile& init) {
  if (samples.size() < 10) {
    throw std::invalid_argument("fit_profile: need at least 10 samples");
  }
  // Structural sanity only: the optimizer roams unconstrained, so a fitted
  // profile must be validate()d before it may drive dynamics.
  if (!(init.intensity0 > 0.0) || !(init.tau_exp > 0.0) || init.Ts == 0.0) {
    throw std::invalid_argument("fit_profile: init needs intensity0 > 0, tau_exp > 0, Ts != 0");
  }

  auto unpack = [](const std::vector<double>& p) {
    QuenchProfile pr;
    pr.intensity0 = p[0];
    pr.q = p[1];
    pr.tau_exp = p[2];
    pr.t0 = p[3];
    pr.ts = p[4];
    pr.Ts = p[5];
    return pr;
  };

  ResidualFn residuals = [&samples, &unpack](const std::vector<double>& p,
                                             std::vector<double>& r) {
    const QuenchProfile pr = unpack(p);
    for (size_t i = 0; i < samples.size(); ++i) {
      r[i] = intensity(pr, samples[i].first) - samples[i].second;
    }
  };

  const std::vector<double> start = {init.intensity0, init.q, init.tau_exp,
                                     init.t0,         init.ts, init.Ts};
  const auto fitted = fit_least_squares(residuals, samples.size(), start);

  ProfileFit out;
  out.profile = unpack(fitted.params);
  out.std_errors = unpack(fitted.std_errors);
  out.ssr = fitted.ssr;
  out.iterations = fitted.iterations;
  return out;
}

double time_constant_1e(const QuenchProfile& pr) {
  validate(pr);
  const double i_end = pr.q * pr.intensity0;
  const double target = i_end + (pr.intensity0 - i_end) / std::exp(1.0);
  // The model is non-increasing after t0 for the default family; bisect for
  // the crossing time.
  double lo = pr.t0;
  double hi = pr.t0 + 10.0 * std::max(pr.tau_exp, pr.Ts);
  if (intensity(pr, hi) > target) {
    throw std::runtime_error("time_constant_1e: profile never traverses 1/e of its drop");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (intensity(pr, mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi) - pr.t0;
}

} // namespace qacc
