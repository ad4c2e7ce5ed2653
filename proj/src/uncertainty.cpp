#include "qacc/uncertainty.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "qacc/constants.hpp"

namespace qacc {

double qfi_log_coeff_omega0(double r) {
  return -3.0 + 8.0 * r * (2.0 * r - 1.0) / (1.0 + 4.0 * r * (r - 1.0));
}

double qfi_log_coeff_omega1(double r) {
  return -8.0 * r * (2.0 * r - 1.0) / (1.0 + 4.0 * r * (r - 1.0));
}

Measured qfi_uncertainty(const Measured& mass, const Measured& nbar, const Measured& omega0,
                         const Measured& omega1) {
  for (const Measured* m : {&mass, &omega0, &omega1}) {
    if (!(m->value > 0.0)) {
      throw std::invalid_argument("qfi_uncertainty: central values must be > 0");
    }
  }
  if (nbar.value < 0.0) throw std::invalid_argument("qfi_uncertainty: nbar must be >= 0");

  const double kappa = 2.0 * nbar.value + 1.0;
  const double r = (omega0.value * omega0.value) / (omega1.value * omega1.value);
  const double w0 = omega0.value;
  const double central = 2.0 * mass.value / (constants::hbar * kappa * w0 * w0 * w0) *
                         (1.0 + 4.0 * r * (r - 1.0));

  const double rel_m = mass.sigma / mass.value;
  const double rel_kappa = 2.0 * nbar.sigma / kappa;
  const double rel_w0 = omega0.sigma / omega0.value;
  const double rel_w1 = omega1.sigma / omega1.value;
  for (double rel : {rel_m, rel_kappa, rel_w0, rel_w1}) {
    if (rel > 0.20) {
      std::cerr << "qfi_uncertainty: input relative uncertainty " << rel
                << " exceeds 20%; linearized propagation is unreliable\n";
      break;
    }
  }

  const double c0 = qfi_log_coeff_omega0(r);
  const double c1 = qfi_log_coeff_omega1(r);
  const double rel_sq = rel_m * rel_m + rel_kappa * rel_kappa + c0 * c0 * rel_w0 * rel_w0 +
                        c1 * c1 * rel_w1 * rel_w1;
  return {central, central * std::sqrt(rel_sq)};
}

Measured sensitivity_uncertainty(const Measured& dmu_da, const Measured& sigma_width) {
  if (!(sigma_width.value > 0.0)) {
    throw std::invalid_argument("sensitivity_uncertainty: width must be > 0");
  }
  if (!(dmu_da.value > 0.0)) {
    throw std::invalid_argument("sensitivity_uncertainty: dmu_da must be > 0");
  }
  const double s = dmu_da.value / sigma_width.value;
  const double rel1 = dmu_da.sigma / dmu_da.value;
  const double rel2 = sigma_width.sigma / sigma_width.value;
  return {s, s * std::sqrt(rel1 * rel1 + rel2 * rel2)};
}

Measured weighted_mean(std::span<const Measured> values) {
  if (values.empty()) throw std::invalid_argument("weighted_mean: need >= 1 entry");
  double sw = 0.0, swv = 0.0;
  for (const auto& v : values) {
    if (!(v.sigma > 0.0)) {
      throw std::invalid_argument("weighted_mean: uncertainties must be > 0");
    }
    const double w = 1.0 / (v.sigma * v.sigma);
    sw += w;
    swv += w * v.value;
  }
  return {swv / sw, std::sqrt(1.0 / sw)};
}

SmallAngleBoundResult small_angle_bound(double theta) {
  if (theta == 0.0) throw std::invalid_argument("small_angle_bound: theta must be nonzero");
  SmallAngleBoundResult out;
  const double t2 = theta * theta;
  out.bound = t2 / 6.0;
  if (std::fabs(theta) < 0.1) {
    // sin(theta) - theta cancels catastrophically here; sum the series instead.
    out.exact = t2 / 6.0 - t2 * t2 / 120.0 + t2 * t2 * t2 / 5040.0;
  } else {
    out.exact = std::fabs(std::sin(theta) - theta) / std::fabs(theta);
  }
  return out;
}

Measured apply_calibration(const Measured& x, const Measured& factor) {
  if (!(factor.value > 0.0)) {
    throw std::invalid_argument("apply_calibration: factor must be > 0");
  }
  const double value = x.value * factor.value;
  const double rel_stat = x.value != 0.0 ? x.sigma / x.value : 0.0;
  const double rel_cal = factor.sigma / factor.value;
  if (x.value == 0.0) {
    return {0.0, x.sigma * factor.value};
  }
  return {value, std::fabs(value) * std::sqrt(rel_stat * rel_stat + rel_cal * rel_cal)};
}

Measured frequency_stats(std::span<const double> samples) {
  if (samples.size() < 2) throw std::invalid_argument("frequency_stats: need >= 2 samples");
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var /= static_cast<double>(samples.size() - 1);
  return {mean, std::sqrt(var)};
}

} // namespace qacc
