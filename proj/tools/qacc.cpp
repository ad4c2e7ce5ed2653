// Batch CLI for the quench-sensitized accelerometer toolkit. One subcommand
// per analysis; every run writes a manifest with input echo and output file
// hashes so any run can be reproduced and compared byte for byte.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qacc/allan.hpp"
#include "qacc/config.hpp"
#include "qacc/constants.hpp"
#include "qacc/csv.hpp"
#include "qacc/heating.hpp"
#include "qacc/metrology.hpp"
#include "qacc/moment_dynamics.hpp"
#include "qacc/params.hpp"
#include "qacc/quench_profile.hpp"
#include "qacc/shots.hpp"
#include "qacc/uncertainty.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace qacc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

uint64_t fnv1a64_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot hash " + path.string());
  uint64_t h = 1469598103934665603ull;
  char buf[65536];
  while (is) {
    is.read(buf, sizeof(buf));
    for (std::streamsize i = 0; i < is.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Compact deterministic tag for file names: 1.95 -> "1.95", 0.25 -> "0.25".
std::string num_tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  std::string s(buf);
  for (auto& c : s) {
    if (c == '-') c = 'm';
    if (c == '+') c = 'p';
  }
  return s;
}

struct RunContext {
  RunConfig config;
  fs::path out_dir;
  std::vector<fs::path> outputs;

  fs::path file(const std::string& name) {
    const fs::path p = out_dir / name;
    outputs.push_back(p);
    return p;
  }

  void write_manifest(const std::string& command) {
    ordered_json manifest;
    manifest["command"] = command;
    manifest["seed"] = config.seed;
    manifest["config"] = ordered_json::parse(config_to_json(config));
    ordered_json files = ordered_json::array();
    std::sort(outputs.begin(), outputs.end());
    for (const auto& p : outputs) {
      files.push_back({{"path", p.filename().string()}, {"fnv1a64", hex64(fnv1a64_file(p))}});
    }
    manifest["outputs"] = files;
    std::ofstream os(out_dir / ("manifest_" + command + ".json"));
    os << manifest.dump(2) << "\n";
  }
};

RunContext make_context(const RunConfig& cfg) {
  RunContext ctx;
  ctx.config = cfg;
  ctx.out_dir = cfg.output_dir;
  fs::create_directories(ctx.out_dir);
  return ctx;
}

// Bounded worker pool over independent jobs; rethrows the first failure.
void run_jobs(std::vector<std::function<void()>> jobs, unsigned workers) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, jobs.size());
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        try {
          jobs[i]();
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// Downsample a trajectory onto the analysis grid (default 0.5 us).
Trajectory downsample(const Trajectory& traj, double dt, double dt_out) {
  const auto stride = std::max<size_t>(1, static_cast<size_t>(std::llround(dt_out / dt)));
  Trajectory out;
  for (size_t i = 0; i < traj.times.size(); i += stride) {
    out.times.push_back(traj.times[i]);
    out.states.push_back(traj.states[i]);
  }
  return out;
}

double horizon(const PhysicalParams& p, const QuenchProfile& profile) {
  return profile.t0 + 5.0 * profile.tau_exp + 3.0 * constants::two_pi / p.omega1;
}

void write_table_json(std::ostream& os, const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json rec;
    for (size_t c = 0; c < columns.size(); ++c) rec[columns[c]] = row[c];
    arr.push_back(rec);
  }
  os << arr.dump(2) << "\n";
}

void write_table_csv(std::ostream& os, const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows) {
  for (size_t c = 0; c < columns.size(); ++c) {
    os << columns[c] << (c + 1 < columns.size() ? "," : "\n");
  }
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      os << format_double(row[c]) << (c + 1 < row.size() ? "," : "\n");
    }
  }
}

void write_table(const fs::path& path, const std::string& format,
                 const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  if (format == "json") {
    write_table_json(os, columns, rows);
  } else {
    write_table_csv(os, columns, rows);
  }
}

// ---------------------------------------------------------------------------
// simulate: one trajectory file per (tau, tilt) pair
// ---------------------------------------------------------------------------

int cmd_simulate(RunContext& ctx) {
  const auto& cfg = ctx.config;
  std::vector<double> taus = {cfg.profile.tau_exp};
  std::vector<double> tilts = {0.0};
  if (cfg.sweep) {
    if (!cfg.sweep->tau.empty()) taus = cfg.sweep->tau;
    if (!cfg.sweep->tilt.empty()) tilts = cfg.sweep->tilt;
  }

  struct Job {
    double tau, tilt;
    fs::path path;
  };
  std::vector<Job> jobs;
  for (double tau : taus) {
    for (double tilt : tilts) {
      const std::string name = "traj_tau" + num_tag(tau * 1e6) + "us_tilt" +
                               num_tag(tilt * 180.0 / constants::pi) + "deg.csv";
      jobs.push_back({tau, tilt, ctx.file(name)});
    }
  }

  std::vector<std::function<void()>> work;
  for (const auto& job : jobs) {
    work.push_back([&cfg, job] {
      const auto profile = default_profile(cfg.params, job.tau, cfg.profile.t0);
      const double a = cfg.params.gravity * std::sin(job.tilt + cfg.params.theta0);
      const double dt = default_time_step(cfg.params);
      const auto traj =
          integrate(cfg.params, profile, a, horizon(cfg.params, profile), dt);
      std::ofstream os(job.path);
      if (!os) throw std::runtime_error("cannot open " + job.path.string());
      write_trajectory_csv(os, downsample(traj, dt, 0.5e-6));
    });
  }
  run_jobs(std::move(work), cfg.workers);
  ctx.write_manifest("simulate");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sensitivity: S(T_opt) over the tau grid, one scenario block per heating rate
// ---------------------------------------------------------------------------

struct ScenarioResult {
  double t_opt = 0.0;
  double s_value = 0.0;
  double ds = 0.0;
  double ratio = 0.0;
};

ScenarioResult sensitivity_point(const RunConfig& cfg, double tau, double heating,
                                 uint64_t seed) {
  const auto& p = cfg.params;
  const auto profile = default_profile(p, tau, cfg.profile.t0);
  const double delta_a = 0.01;
  const auto curve = sensitivity_curve(p, profile, heating, delta_a);

  std::vector<std::pair<double, double>> sigma_trace(curve.times.size());
  for (size_t i = 0; i < curve.times.size(); ++i) {
    sigma_trace[i] = {curve.times[i], curve.sigma[i]};
  }
  const double period1 = constants::two_pi / p.omega1;
  const double t_opt = find_t_opt(curve, sigma_trace, tau, period1);

  size_t idx = 0;
  while (idx + 1 < curve.times.size() && curve.times[idx] < t_opt) ++idx;

  ScenarioResult out;
  out.t_opt = t_opt;
  out.s_value = curve.S_values[idx];
  out.ratio = bound_check(out.s_value, qfi_sudden(p, t_opt).value).ratio;

  // Error bar from the paper-style synthetic pipeline: 300-shot histograms
  // over a small tilt sweep, folded-normal fits, weighted widths and the
  // tilt-slope conversion.
  PhysicalParams hp = p;
  hp.heating_rate = heating;
  const double dt = default_time_step(hp);
  const double a0 = hp.gravity * std::sin(hp.theta0);
  const auto base = integrate(hp, profile, a0, t_opt + dt, dt);
  const auto idx_t = std::min(static_cast<size_t>(std::llround(t_opt / dt)),
                              base.states.size() - 1);
  const GaussianState state0 = base.states[idx_t];

  std::vector<TiltPoint> tilt_points;
  std::vector<Measured> widths;
  const double tilt_step = 0.25 * constants::pi / 180.0;
  uint64_t shot_seed = seed;
  for (int k = -2; k <= 2; ++k) {
    const double tilt = static_cast<double>(k) * tilt_step;
    const double a = hp.gravity * std::sin(tilt + hp.theta0);
    GaussianState s = state0;
    s.mean_z = state0.mean_z + curve.dmu_da[idx] * (a - a0);
    const auto shots = sample_shots(s, 300, shot_seed++, t_opt, tilt);
    const auto fit = fit_folded_normal(shots);
    tilt_points.push_back({tilt, fit.mu, std::max(fit.se_mu, 1e-18)});
    widths.push_back({fit.sigma, std::max(fit.se_sigma, 1e-18)});
  }
  const auto line = tilt_sweep_slope(tilt_points);
  const auto width = weighted_mean(widths);
  const Measured dmu_da{std::fabs(line.slope) / hp.gravity, line.se_slope / hp.gravity};
  const auto s_emp = sensitivity_uncertainty(dmu_da, width);
  out.ds = s_emp.sigma;
  return out;
}

int cmd_sensitivity(RunContext& ctx) {
  const auto& cfg = ctx.config;
  std::vector<double> taus = {1.95e-6, 3.77e-6, 7.24e-6, 14.9e-6, 36.6e-6, 72.9e-6};
  std::vector<double> heatings = {6e-3, 16e-3, 22e-3};
  if (cfg.sweep) {
    if (!cfg.sweep->tau.empty()) taus = cfg.sweep->tau;
    if (!cfg.sweep->heating.empty()) heatings = cfg.sweep->heating;
  }

  std::vector<std::vector<ScenarioResult>> table(taus.size(),
                                                 std::vector<ScenarioResult>(heatings.size()));
  std::vector<std::function<void()>> work;
  for (size_t i = 0; i < taus.size(); ++i) {
    for (size_t j = 0; j < heatings.size(); ++j) {
      work.push_back([&cfg, &table, &taus, &heatings, i, j] {
        table[i][j] =
            sensitivity_point(cfg, taus[i], heatings[j], cfg.seed + 97 * i + 11 * j);
      });
    }
  }
  run_jobs(std::move(work), cfg.workers);

  std::vector<std::string> columns = {"tau_s"};
  for (double h : heatings) {
    const std::string tag = num_tag(h * 1e3) + "mKps";
    columns.push_back("T_opt_" + tag + "_s");
    columns.push_back("S_" + tag + "_s2_per_m");
    columns.push_back("dS_" + tag + "_s2_per_m");
    columns.push_back("ratio_" + tag);
  }
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < taus.size(); ++i) {
    std::vector<double> row = {taus[i]};
    for (size_t j = 0; j < heatings.size(); ++j) {
      row.push_back(table[i][j].t_opt);
      row.push_back(table[i][j].s_value);
      row.push_back(table[i][j].ds);
      row.push_back(table[i][j].ratio);
    }
    rows.push_back(std::move(row));
  }

  const std::string ext = cfg.format == "json" ? ".json" : ".csv";
  write_table(ctx.file("sensitivity_vs_tau" + ext), cfg.format, columns, rows);
  ctx.write_manifest("sensitivity");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// allan: synthetic long run then the overlapping estimator
// ---------------------------------------------------------------------------

int cmd_allan(RunContext& ctx, const fs::path& input, double duration, double drift_linear,
              double drift_sin_amp, double drift_sin_period) {
  const auto& cfg = ctx.config;

  AccelSeries series;
  if (!input.empty()) {
    series = load_accel_series(input);
  } else {
    const double tau =
        (cfg.sweep && !cfg.sweep->tau.empty()) ? cfg.sweep->tau.front() : cfg.profile.tau_exp;
    const double tilt =
        (cfg.sweep && !cfg.sweep->tilt.empty()) ? cfg.sweep->tilt.front() : 0.0;
    const double heating = (cfg.sweep && !cfg.sweep->heating.empty())
                               ? cfg.sweep->heating.front()
                               : cfg.params.heating_rate;
    const auto profile = default_profile(cfg.params, tau, cfg.profile.t0);
    LongRunOptions opt;
    opt.drift_linear = drift_linear;
    opt.drift_sin_amp = drift_sin_amp;
    opt.drift_sin_period = drift_sin_period;
    series =
        synthesize_long_run(cfg.params, profile, heating, tilt, 1, duration, cfg.seed, opt);
    save_accel_series(series, ctx.file("acceleration_series.csv"));
    ctx.outputs.push_back(ctx.out_dir / "acceleration_series.csv.json");
  }

  const auto allan = overlapping_allan(series);
  std::ofstream os(ctx.file("allan_deviation.csv"));
  write_allan_csv(os, allan);
  ctx.write_manifest("allan");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// qfi / heating: JSON reports
// ---------------------------------------------------------------------------

int cmd_qfi(RunContext& ctx) {
  const auto& cfg = ctx.config;
  const auto result = qfi_half_period(cfg.params);
  const auto propagated = qfi_uncertainty(
      {cfg.params.mass, cfg.uncertainties.mass}, {cfg.params.nbar, cfg.uncertainties.nbar},
      {cfg.params.omega0, cfg.uncertainties.omega0},
      {cfg.params.omega1, cfg.uncertainties.omega1});

  ordered_json report;
  report["qfi"] = {{"value_s4_per_m2", propagated.value},
                   {"sigma_s4_per_m2", propagated.sigma},
                   {"relative_sigma", propagated.sigma / propagated.value},
                   {"time_s", result.time},
                   {"kappa", result.kappa},
                   {"freq_ratio_sq", result.freq_ratio_sq}};
  report["inputs"] = {
      {"mass_kg", cfg.params.mass},
      {"mass_sigma_kg", cfg.uncertainties.mass},
      {"nbar", cfg.params.nbar},
      {"nbar_sigma", cfg.uncertainties.nbar},
      {"omega0_rad_per_s", cfg.params.omega0},
      {"omega0_sigma_rad_per_s", cfg.uncertainties.omega0},
      {"omega1_rad_per_s", cfg.params.omega1},
      {"omega1_sigma_rad_per_s", cfg.uncertainties.omega1},
  };
  std::ofstream os(ctx.file("qfi_report.json"));
  os << report.dump(2) << "\n";
  ctx.write_manifest("qfi");
  return kExitOk;
}

int cmd_heating(RunContext& ctx, const std::vector<std::string>& sigma_trace_paths) {
  const auto& cfg = ctx.config;
  const double n2 = gas_heating_rate(cfg.params, nitrogen_gas());
  const double h2 = gas_heating_rate(cfg.params, hydrogen_gas());
  const double mix =
      gas_heating_rate(cfg.params, nitrogen_hydrogen_mix(cfg.gas.n2_fraction));

  LpnSpec spec;
  spec.wavelength = cfg.lpn.wavelength;
  spec.mirror_distance = cfg.lpn.mirror_distance;
  spec.freq_noise_psd = cfg.lpn.freq_noise_psd;
  const auto lpn = lpn_heating(cfg.params, spec);

  ordered_json report;
  report["gas"] = {{"nitrogen_K_per_s", n2},
                   {"hydrogen_K_per_s", h2},
                   {"mixture_K_per_s", mix},
                   {"n2_fraction", cfg.gas.n2_fraction}};
  report["lpn"] = {{"displacement_psd_m2_per_Hz", lpn.displacement_psd},
                   {"energy_rate_J_per_s", lpn.energy_rate},
                   {"phonon_rate_per_s", lpn.phonon_rate},
                   {"temperature_rate_K_per_s", lpn.temperature_rate}};
  report["photon_recoil_K_per_s"] = photon_recoil_heating_rate(cfg.params);

  if (!sigma_trace_paths.empty()) {
    std::vector<SigmaTrace> traces;
    std::vector<QuenchProfile> profiles;
    for (const auto& path : sigma_trace_paths) {
      traces.push_back(load_sigma_trace(path));
      profiles.push_back(default_profile(cfg.params, traces.back().tau, cfg.profile.t0));
    }
    const auto fit = infer_heating_rate(traces, cfg.params, profiles);
    report["inference"] = {{"rate_K_per_s", fit.rate},
                           {"uncertainty_K_per_s", fit.uncertainty},
                           {"at_grid_boundary", fit.at_boundary},
                           {"objective", fit.objective},
                           {"traces", sigma_trace_paths.size()}};
    if (fit.at_boundary) {
      std::cerr << "warning: heating-rate minimizer landed on the grid boundary\n";
    }
  }

  std::ofstream os(ctx.file("heating_report.json"));
  os << report.dump(2) << "\n";
  ctx.write_manifest("heating");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fit-profile / fit-histogram: ingestion + fit reports
// ---------------------------------------------------------------------------

int cmd_fit_profile(RunContext& ctx, const fs::path& input) {
  const auto& cfg = ctx.config;
  std::ifstream is(input);
  if (!is) throw std::invalid_argument("fit-profile: cannot open " + input.string());
  const auto samples = read_pair_csv(is, "t_s", "intensity");

  QuenchProfile init = cfg.profile;
  if (!samples.empty()) {
    double top = samples.front().second;
    for (const auto& [t, y] : samples) top = std::max(top, y);
    init.intensity0 = top;
    // quench start guess: first sample below 90% of the plateau
    init.t0 = samples.front().first;
    for (const auto& [t, y] : samples) {
      if (y < 0.9 * top) {
        init.t0 = t;
        break;
      }
    }
    init.ts = init.t0;
  }
  const auto fit = fit_profile(samples, init);

  ordered_json report;
  auto entry = [](double v, double se) {
    return ordered_json{{"value", v}, {"stderr", se}};
  };
  report["profile"] = {{"intensity0", entry(fit.profile.intensity0, fit.std_errors.intensity0)},
                       {"q", entry(fit.profile.q, fit.std_errors.q)},
                       {"tau_exp_s", entry(fit.profile.tau_exp, fit.std_errors.tau_exp)},
                       {"t0_s", entry(fit.profile.t0, fit.std_errors.t0)},
                       {"ts_s", entry(fit.profile.ts, fit.std_errors.ts)},
                       {"Ts_s", entry(fit.profile.Ts, fit.std_errors.Ts)}};
  report["ssr"] = fit.ssr;
  report["iterations"] = fit.iterations;
  report["samples"] = samples.size();
  try {
    validate(fit.profile);
    report["tau_1e_s"] = time_constant_1e(fit.profile);
  } catch (const std::exception&) {
    report["tau_1e_s"] = nullptr; // fitted parameters left the physical family
  }
  std::ofstream os(ctx.file("profile_fit.json"));
  os << report.dump(2) << "\n";
  ctx.write_manifest("fit-profile");
  return kExitOk;
}

int cmd_fit_histogram(RunContext& ctx, const fs::path& input, size_t bins,
                      double calibration_rel) {
  const auto shots = load_shotset(input);
  const auto fit = bins > 0 ? fit_folded_normal(shots, bins) : fit_folded_normal(shots);

  // Statistical fit errors combined with the (configurable) multiplicative
  // calibration systematic.
  const Measured cal{1.0, calibration_rel};
  const auto mu = apply_calibration({fit.mu, fit.se_mu}, cal);
  const auto sigma = apply_calibration({fit.sigma, fit.se_sigma}, cal);

  ordered_json report;
  report["folded_normal"] = {{"amplitude_counts", fit.amplitude},
                             {"mu_m", mu.value},
                             {"sigma_m", sigma.value},
                             {"se_mu_m", mu.sigma},
                             {"se_sigma_m", sigma.sigma},
                             {"bins", fit.bins},
                             {"ssr", fit.ssr},
                             {"calibration_rel", calibration_rel}};
  report["samples"] = shots.samples.size();
  report["measure_time_s"] = shots.measure_time;
  report["tilt_rad"] = shots.tilt;
  std::ofstream os(ctx.file("histogram_fit.json"));
  os << report.dump(2) << "\n";
  ctx.write_manifest("fit-histogram");
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Levitated-nanoparticle quench accelerometer simulator and analysis toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string format;
  int64_t seed = -1;
  unsigned workers = 0;
  std::vector<double> tau_us, tilt_deg, heating_mks;

  app.add_option("--config", config_path, "JSON config file (layered on built-in defaults)");
  app.add_option("--seed", seed, "RNG seed (overrides config)");
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--format", format, "table format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--workers", workers, "worker threads for sweeps (0 = auto)");
  app.add_option("--tau-us", tau_us, "quench constant sweep [us]")->delimiter(',');
  app.add_option("--tilt-deg", tilt_deg, "table tilt sweep [deg]")->delimiter(',');
  app.add_option("--heating-mks", heating_mks, "heating rates [mK/s]")->delimiter(',');

  auto* simulate = app.add_subcommand("simulate", "moment trajectories per (tau, tilt)");
  auto* sensitivity =
      app.add_subcommand("sensitivity", "S(T_opt) vs tau for each heating scenario");
  auto* allan = app.add_subcommand("allan", "synthetic long run + overlapping Allan deviation");
  auto* qfi = app.add_subcommand("qfi", "QFI report with propagated uncertainty");
  auto* heating = app.add_subcommand("heating", "gas and laser-phase-noise heating report");
  auto* fit_prof = app.add_subcommand("fit-profile", "fit the intensity model to a trace CSV");
  auto* fit_hist =
      app.add_subcommand("fit-histogram", "folded-normal fit of a shot-set CSV");
  for (auto* sub : {simulate, sensitivity, allan, qfi, heating, fit_prof, fit_hist}) {
    sub->fallthrough();
  }

  double duration = 10800.0;
  double drift_linear = 0.0, drift_sin_amp = 0.0, drift_sin_period = 1800.0;
  std::string allan_input;
  allan->add_option("--input", allan_input,
                    "existing acceleration CSV (a_mps2 + sidecar); skips synthesis");
  allan->add_option("--duration-s", duration, "acquisition length [s]");
  allan->add_option("--drift-linear", drift_linear, "drift rate [m/s^2 per s]");
  allan->add_option("--drift-sin-amp", drift_sin_amp, "sinusoidal drift amplitude [m/s^2]");
  allan->add_option("--drift-sin-period", drift_sin_period, "sinusoidal drift period [s]");

  std::vector<std::string> sigma_trace_paths;
  heating->add_option("--sigma-traces", sigma_trace_paths,
                      "width-trace CSVs (t_s,sigma_m + tau_s sidecar) for rate inference")
      ->delimiter(',');

  std::string fit_input;
  size_t hist_bins = 0;
  double calibration_rel = 0.0;
  fit_prof->add_option("--input", fit_input, "intensity trace CSV (t_s,intensity)")
      ->required();
  fit_hist->add_option("--input", fit_input, "shot-set CSV (sample_m + JSON sidecar)");
  fit_hist->add_option("--bins", hist_bins, "histogram bins (0 = Freedman-Diaconis)");
  fit_hist->add_option("--calibration-rel", calibration_rel,
                       "relative systematic of the displacement calibration");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg =
        config_path.empty() ? paper_default_config() : load_config(config_path);
    if (seed >= 0) cfg.seed = static_cast<uint64_t>(seed);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (!format.empty()) cfg.format = format;
    if (workers != 0) cfg.workers = workers;

    if (!tau_us.empty() || !tilt_deg.empty() || !heating_mks.empty()) {
      SweepSpec sweep = cfg.sweep.value_or(SweepSpec{});
      if (!tau_us.empty()) {
        sweep.tau.clear();
        for (double t : tau_us) sweep.tau.push_back(t * 1e-6);
      }
      if (!tilt_deg.empty()) {
        sweep.tilt.clear();
        for (double t : tilt_deg) sweep.tilt.push_back(t * constants::pi / 180.0);
      }
      if (!heating_mks.empty()) {
        sweep.heating.clear();
        for (double h : heating_mks) sweep.heating.push_back(h * 1e-3);
      }
      cfg.sweep = std::move(sweep);
    }
    validate(cfg.params);

    auto ctx = make_context(cfg);
    if (*simulate) return cmd_simulate(ctx);
    if (*sensitivity) return cmd_sensitivity(ctx);
    if (*allan) {
      return cmd_allan(ctx, allan_input, duration, drift_linear, drift_sin_amp,
                       drift_sin_period);
    }
    if (*qfi) return cmd_qfi(ctx);
    if (*heating) return cmd_heating(ctx, sigma_trace_paths);
    if (*fit_prof) return cmd_fit_profile(ctx, fit_input);
    if (*fit_hist) return cmd_fit_histogram(ctx, fit_input, hist_bins, calibration_rel);
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
