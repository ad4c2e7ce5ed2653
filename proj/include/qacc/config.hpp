#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qacc/params.hpp"
#include "qacc/quench_profile.hpp"
#include "qacc/uncertainty.hpp"

namespace qacc {

// Optional 1-sigma input uncertainties feeding the QFI report.
struct InputUncertainties {
  double mass = 0.0;   // [kg]
  double nbar = 0.0;
  double omega0 = 0.0; // [rad/s]
  double omega1 = 0.0; // [rad/s]
};

struct SweepSpec {
  std::vector<double> tau;     // quench constants [s]
  std::vector<double> tilt;    // table angles [rad]
  std::vector<double> heating; // heating rates [K/s]
};

struct GasConfig {
  double n2_fraction = 0.625; // nitrogen partial-pressure fraction
};

struct LpnConfig {
  double wavelength = 1551e-9;     // [m]
  double mirror_distance = 16.6e-3; // [m]
  double freq_noise_psd = 1.0;     // S_nu at f1 [Hz^2/Hz]
};

struct RunConfig {
  PhysicalParams params;
  QuenchProfile profile;
  InputUncertainties uncertainties;
  GasConfig gas;
  LpnConfig lpn;
  std::optional<SweepSpec> sweep;
  std::filesystem::path output_dir = "out";
  uint64_t seed = 12345;
  std::string format = "csv"; // csv | json
  unsigned workers = 0;       // 0: hardware concurrency
};

/// Built-in canonical defaults: all parameter values bundled under one name
/// so every run is reproducible without a config file.
RunConfig paper_default_config();

/// Parses a config JSON, layered on top of the built-in defaults. Every
/// quantity may declare its unit in a per-section "units" sub-object
/// (e.g. {"omega0": "kHz", "tau_exp": "us", "theta0": "deg"}); without a
/// declaration strict SI is assumed. Throws std::invalid_argument with a
/// field-level diagnostic.
RunConfig load_config(const std::filesystem::path& path);

/// Same, parsing from a JSON string (exposed for tests).
RunConfig parse_config(const std::string& json_text);

/// The config serialized back to canonical SI JSON (used in run manifests).
std::string config_to_json(const RunConfig& config);

} // namespace qacc
