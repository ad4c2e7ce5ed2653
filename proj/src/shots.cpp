#include "qacc/shots.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qacc/constants.hpp"
#include "qacc/least_squares.hpp"
#include "qacc/rng.hpp"

namespace qacc {

namespace {

double sample_mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_stddev(std::span<const double> v, double mean) {
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() > 1 ? v.size() - 1 : 1));
}

double wrap_two_pi(double phi) {
  phi = std::fmod(phi, constants::two_pi);
  return phi < 0.0 ? phi + constants::two_pi : phi;
}

} // namespace

ShotSet sample_shots(const GaussianState& state, size_t n, uint64_t seed,
                     double measure_time, double tilt) {
  if (n < 1) throw std::invalid_argument("sample_shots: n must be >= 1");
  if (!(state.var_z > 0.0)) throw std::invalid_argument("sample_shots: var_z must be > 0");
  ShotSet out;
  out.samples.reserve(n);
  out.measure_time = measure_time;
  out.tilt = tilt;
  out.seed = seed;
  GaussianSampler rng(seed);
  const double sigma = std::sqrt(state.var_z);
  for (size_t i = 0; i < n; ++i) {
    out.samples.push_back(std::fabs(rng.normal(state.mean_z, sigma)));
  }
  return out;
}

size_t freedman_diaconis_bins(std::span<const double> samples) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const size_t n = sorted.size();
  const double q1 = sorted[n / 4];
  const double q3 = sorted[(3 * n) / 4];
  const double iqr = q3 - q1;
  const double max = sorted.back();
  if (!(iqr > 0.0) || !(max > 0.0)) return 8;
  const double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
  const auto bins = static_cast<size_t>(std::ceil(max / width));
  return std::clamp<size_t>(bins, 8, 4096);
}

FoldedFit fit_folded_normal(const ShotSet& shots, size_t bins) {
  const auto& z = shots.samples;
  if (z.size() < 50) throw std::invalid_argument("fit_folded_normal: need >= 50 samples");
  if (bins < 8) throw std::invalid_argument("fit_folded_normal: need >= 8 bins");

  const double top = *std::max_element(z.begin(), z.end());
  if (!(top > 0.0)) throw std::runtime_error("fit_folded_normal: degenerate samples");
  const double width = top / static_cast<double>(bins);

  std::vector<double> counts(bins, 0.0);
  std::vector<double> centers(bins, 0.0);
  for (size_t b = 0; b < bins; ++b) centers[b] = (static_cast<double>(b) + 0.5) * width;
  for (double x : z) {
    auto b = static_cast<size_t>(x / width);
    if (b >= bins) b = bins - 1;
    counts[b] += 1.0;
  }
  const auto occupied = static_cast<size_t>(
      std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; }));
  if (occupied < 2) {
    throw std::runtime_error("fit_folded_normal: degenerate histogram (all samples in one bin)");
  }

  auto model = [](double zc, double a, double mu, double sg) {
    const double dm = (zc - mu) / sg;
    const double dp = (zc + mu) / sg;
    return a * (std::exp(-0.5 * dm * dm) + std::exp(-0.5 * dp * dp));
  };

  ResidualFn residuals = [&](const std::vector<double>& p, std::vector<double>& r) {
    for (size_t b = 0; b < counts.size(); ++b) {
      r[b] = model(centers[b], p[0], p[1], std::fabs(p[2])) - counts[b];
    }
  };

  const double mu0 = sample_mean(z);
  const double sg0 = std::max(sample_stddev(z, mu0), 1e-3 * top);
  const double a0 =
      static_cast<double>(z.size()) * width / (std::sqrt(constants::two_pi) * sg0);
  const auto fitted = fit_least_squares(residuals, counts.size(), {a0, mu0, sg0});

  FoldedFit out;
  out.amplitude = fitted.params[0];
  out.mu = std::fabs(fitted.params[1]);
  out.sigma = std::fabs(fitted.params[2]);
  out.se_mu = fitted.std_errors[1];
  out.se_sigma = fitted.std_errors[2];
  out.ssr = fitted.ssr;
  out.bins = bins;
  return out;
}

FoldedFit fit_folded_normal(const ShotSet& shots) {
  return fit_folded_normal(shots, freedman_diaconis_bins(shots.samples));
}

SinusoidFit fit_rectified_sinusoid(std::span<const std::pair<double, double>> trace,
                                   double omega_init) {
  if (trace.size() < 20) {
    throw std::invalid_argument("fit_rectified_sinusoid: need >= 20 points");
  }
  if (!(omega_init > 0.0)) {
    throw std::invalid_argument("fit_rectified_sinusoid: omega_init must be > 0");
  }
  const double span = trace.back().first - trace.front().first;
  if (span * omega_init < 2.0 * constants::two_pi) {
    throw std::invalid_argument(
        "fit_rectified_sinusoid: trace must span >= 2 periods of omega_init");
  }

  ResidualFn residuals = [&trace](const std::vector<double>& p, std::vector<double>& r) {
    for (size_t i = 0; i < trace.size(); ++i) {
      const double m = std::fabs(p[0] * std::sin(p[1] * trace[i].first + p[2]) + p[3]);
      r[i] = m - trace[i].second;
    }
  };

  std::vector<double> y(trace.size());
  for (size_t i = 0; i < trace.size(); ++i) y[i] = trace[i].second;
  const double mean = sample_mean(y);
  const double top = *std::max_element(y.begin(), y.end());
  const double amp0 = std::max(sample_stddev(y, mean) * std::sqrt(2.0), 1e-30);

  // Rectified models have phase local minima, and fold-active data also has a
  // non-folding impostor minimum; scan phase inits crossed with amplitude
  // splits (no fold / partial fold / deep fold) and keep the best residual.
  const std::pair<double, double> splits[] = {
      {amp0, mean}, {0.7 * top, 0.3 * top}, {top, 0.02 * top + 1e-30}};
  LeastSquaresResult best;
  bool have = false;
  for (int k = 0; k < 8; ++k) {
    const double phi0 = constants::two_pi * static_cast<double>(k) / 8.0;
    for (const auto& [a0, off0] : splits) {
      try {
        auto fit = fit_least_squares(residuals, trace.size(), {a0, omega_init, phi0, off0});
        if (!have || fit.ssr < best.ssr) {
          best = fit;
          have = true;
        }
      } catch (const std::runtime_error&) {
        // A failed start is fine as long as one converges.
      }
    }
  }
  if (!have) throw std::runtime_error("fit_rectified_sinusoid: no phase start converged");

  SinusoidFit out;
  out.A = best.params[0];
  out.omega = best.params[1];
  out.phi = best.params[2];
  out.mu_off = best.params[3];
  out.se_A = best.std_errors[0];
  out.se_omega = best.std_errors[1];
  out.se_phi = best.std_errors[2];
  out.se_mu_off = best.std_errors[3];

  if (out.omega < 0.0) { // sin(-w t + phi) = sin(w t + (pi - phi)) up to sign
    out.omega = -out.omega;
    out.phi = constants::pi - out.phi;
    out.A = -out.A;
  }
  if (out.A < 0.0) {
    out.A = -out.A;
    out.phi += constants::pi;
  }
  if (out.mu_off < 0.0) { // |.| makes the global sign unobservable
    out.mu_off = -out.mu_off;
    out.phi += constants::pi;
  }
  out.phi = wrap_two_pi(out.phi);
  return out;
}

LineFit tilt_sweep_slope(std::span<const TiltPoint> points) {
  if (points.size() < 3) throw std::invalid_argument("tilt_sweep_slope: need >= 3 points");
  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (const auto& p : points) {
    if (!(p.se > 0.0)) {
      throw std::invalid_argument("tilt_sweep_slope: standard errors must be > 0");
    }
    const double w = 1.0 / (p.se * p.se);
    sw += w;
    swx += w * p.tilt;
    swy += w * p.value;
  }
  const double xbar = swx / sw;
  const double ybar = swy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double w = 1.0 / (p.se * p.se);
    sxx += w * (p.tilt - xbar) * (p.tilt - xbar);
    sxy += w * (p.tilt - xbar) * (p.value - ybar);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("tilt_sweep_slope: tilts must be distinct");

  LineFit out;
  out.slope = sxy / sxx;
  out.intercept = ybar - out.slope * xbar;
  out.se_slope = std::sqrt(1.0 / sxx);
  return out;
}

} // namespace qacc
