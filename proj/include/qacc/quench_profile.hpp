#pragma once

#include <span>
#include <utility>
#include <vector>

#include "qacc/params.hpp"

namespace qacc {

// Parametric laser-intensity model during the quench: a linear ramp and an
// exponential decay blended by a tanh switch centered at ts with width Ts.
// Only intensity ratios matter downstream (omega and trap shift both depend
// on I/I0).
struct QuenchProfile {
  double intensity0 = 1.0; // I0, pre-quench intensity (arbitrary units)
  double q = 0.0;          // final/initial intensity ratio, 0 < q < 1
  double tau_exp = 0.0;    // exponential 1/e constant [s]
  double t0 = 0.0;         // quench start [s]
  double ts = 0.0;         // blend center [s]
  double Ts = 0.0;         // blend width and linear-ramp scale [s]
};

/// Default synthetic profile for a given exponential constant: q matches the
/// params frequency ratio, ts = t0, Ts = tau/2. This choice keeps the blended
/// intensity positive and non-increasing over the whole quench.
QuenchProfile default_profile(const PhysicalParams& params, double tau_exp, double t0 = 0.0);

void validate(const QuenchProfile& profile);

/// Blend weight R(t) = (1 + tanh((t - ts)/Ts)) / 2.
double blend_weight(const QuenchProfile& profile, double t);

/// Blended intensity I(t) = I_lin (1 - R) + I_exp R. Both branches ramp from
/// I0 to q*I0 and hold: the linear one over Ts, the exponential one reaching
/// q*I0 exactly at t0 + 5 tau_exp (its 1 - e^-5 normalization). Constant I0
/// before t0.
double intensity(const QuenchProfile& profile, double t);

/// omega(t) = omega0 sqrt(I(t)/I0). Throws for non-positive intensity.
double omega_of_t(const PhysicalParams& params, const QuenchProfile& profile, double t);

/// Trap-center displacement z_k(t) = chi (1 - I(t)/I0).
double trap_shift(const PhysicalParams& params, const QuenchProfile& profile, double t);

struct ProfileFit {
  QuenchProfile profile;
  QuenchProfile std_errors; // per-parameter 1-sigma errors in the same slots
  double ssr = 0.0;
  int iterations = 0;
};

/// Nonlinear least squares of the intensity model over (t, intensity) samples.
/// Requires >= 10 samples. Throws on non-convergence.
ProfileFit fit_profile(std::span<const std::pair<double, double>> samples,
                       const QuenchProfile& init);

/// 1/e time constant reported by the CLI: time after t0 at which the model
/// intensity has traversed a factor 1/e of its total drop I0 -> q*I0.
double time_constant_1e(const QuenchProfile& profile);

} // namespace qacc
