#include "qacc/config.hpp"

#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "qacc/constants.hpp"

namespace qacc {

namespace {

using nlohmann::json;

// Multiplicative SI conversion factors per unit token.
const std::map<std::string, double>& unit_factors() {
  static const std::map<std::string, double> factors = {
      {"kg", 1.0},
      {"m", 1.0},        {"pm", 1e-12},      {"nm", 1e-9},
      {"um", 1e-6},      {"mm", 1e-3},
      {"kg/m3", 1.0},    {"Pa", 1.0},        {"K", 1.0},
      {"m/s2", 1.0},
      {"rad", 1.0},      {"deg", constants::pi / 180.0},
      {"rad/s", 1.0},    {"Hz", constants::two_pi}, {"kHz", constants::two_pi * 1e3},
      {"K/s", 1.0},      {"mK/s", 1e-3},
      {"s", 1.0},        {"ms", 1e-3},       {"us", 1e-6},
      {"dimensionless", 1.0},
  };
  return factors;
}

double unit_factor(const std::string& field, const std::string& unit) {
  const auto it = unit_factors().find(unit);
  if (it == unit_factors().end()) {
    throw std::invalid_argument("config: unknown unit '" + unit + "' for field '" + field +
                                "'");
  }
  return it->second;
}

// Reads section[field] if present, applying section.units[field] when declared.
void read_quantity(const json& section, const std::string& field, double& target) {
  if (!section.contains(field)) return;
  const json& v = section.at(field);
  if (!v.is_number()) {
    throw std::invalid_argument("config: field '" + field + "' must be a number");
  }
  double factor = 1.0;
  if (section.contains("units") && section.at("units").contains(field)) {
    factor = unit_factor(field, section.at("units").at(field).get<std::string>());
  }
  target = v.get<double>() * factor;
}

void read_list(const json& section, const std::string& field, double factor,
               std::vector<double>& target) {
  if (!section.contains(field)) return;
  const json& v = section.at(field);
  if (!v.is_array() || v.empty()) {
    throw std::invalid_argument("config: sweep field '" + field +
                                "' must be a nonempty array");
  }
  target.clear();
  for (const auto& x : v) {
    if (!x.is_number()) {
      throw std::invalid_argument("config: sweep field '" + field + "' must be numeric");
    }
    target.push_back(x.get<double>() * factor);
  }
}

double list_factor(const json& section, const std::string& field) {
  if (section.contains("units") && section.at("units").contains(field)) {
    return unit_factor(field, section.at("units").at(field).get<std::string>());
  }
  return 1.0;
}

} // namespace

RunConfig paper_default_config() {
  RunConfig cfg;
  cfg.params = paper_default_params();
  cfg.profile = default_profile(cfg.params, 1.95e-6);
  // Reported parameter uncertainties; nbar is used as a fixed simulation input.
  cfg.uncertainties.mass = 0.2e-17;
  cfg.uncertainties.nbar = 0.0;
  cfg.uncertainties.omega0 = constants::two_pi * 1e3;
  cfg.uncertainties.omega1 = constants::two_pi * 10.0;
  return cfg;
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }

  RunConfig cfg = paper_default_config();

  if (root.contains("params")) {
    const json& p = root.at("params");
    read_quantity(p, "mass", cfg.params.mass);
    read_quantity(p, "radius", cfg.params.radius);
    read_quantity(p, "density", cfg.params.density);
    read_quantity(p, "omega0", cfg.params.omega0);
    read_quantity(p, "omega1", cfg.params.omega1);
    read_quantity(p, "nbar", cfg.params.nbar);
    read_quantity(p, "gas_temperature", cfg.params.gas_temperature);
    read_quantity(p, "pressure", cfg.params.pressure);
    read_quantity(p, "gravity", cfg.params.gravity);
    read_quantity(p, "theta0", cfg.params.theta0);
    read_quantity(p, "chi", cfg.params.chi);
    read_quantity(p, "heating_rate", cfg.params.heating_rate);
    validate(cfg.params);
    // Keep the profile's q consistent with any frequency override unless the
    // config pins the profile explicitly below.
    cfg.profile = default_profile(cfg.params, cfg.profile.tau_exp, cfg.profile.t0);
  }

  if (root.contains("profile")) {
    const json& p = root.at("profile");
    double tau = cfg.profile.tau_exp;
    read_quantity(p, "tau_exp", tau);
    cfg.profile = default_profile(cfg.params, tau, cfg.profile.t0);
    read_quantity(p, "intensity0", cfg.profile.intensity0);
    read_quantity(p, "q", cfg.profile.q);
    read_quantity(p, "t0", cfg.profile.t0);
    read_quantity(p, "ts", cfg.profile.ts);
    read_quantity(p, "Ts", cfg.profile.Ts);
    validate(cfg.profile);
  }

  if (root.contains("uncertainties")) {
    const json& u = root.at("uncertainties");
    read_quantity(u, "mass", cfg.uncertainties.mass);
    read_quantity(u, "nbar", cfg.uncertainties.nbar);
    read_quantity(u, "omega0", cfg.uncertainties.omega0);
    read_quantity(u, "omega1", cfg.uncertainties.omega1);
  }

  if (root.contains("gas")) {
    read_quantity(root.at("gas"), "n2_fraction", cfg.gas.n2_fraction);
    if (cfg.gas.n2_fraction < 0.0 || cfg.gas.n2_fraction > 1.0) {
      throw std::invalid_argument("config: gas.n2_fraction must lie in [0, 1]");
    }
  }

  if (root.contains("lpn")) {
    const json& l = root.at("lpn");
    read_quantity(l, "wavelength", cfg.lpn.wavelength);
    read_quantity(l, "mirror_distance", cfg.lpn.mirror_distance);
    read_quantity(l, "freq_noise_psd", cfg.lpn.freq_noise_psd);
  }

  if (root.contains("sweep")) {
    const json& s = root.at("sweep");
    SweepSpec sweep;
    read_list(s, "tau", list_factor(s, "tau"), sweep.tau);
    read_list(s, "tilt", list_factor(s, "tilt"), sweep.tilt);
    read_list(s, "heating", list_factor(s, "heating"), sweep.heating);
    cfg.sweep = std::move(sweep);
  }

  if (root.contains("output_dir")) {
    cfg.output_dir = root.at("output_dir").get<std::string>();
  }
  if (root.contains("seed")) {
    if (!root.at("seed").is_number_unsigned() && !root.at("seed").is_number_integer()) {
      throw std::invalid_argument("config: seed must be an integer");
    }
    cfg.seed = root.at("seed").get<uint64_t>();
  }
  if (root.contains("format")) {
    cfg.format = root.at("format").get<std::string>();
    if (cfg.format != "csv" && cfg.format != "json") {
      throw std::invalid_argument("config: format must be 'csv' or 'json'");
    }
  }
  if (root.contains("workers")) {
    cfg.workers = root.at("workers").get<unsigned>();
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("config: cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

std::string config_to_json(const RunConfig& cfg) {
  nlohmann::ordered_json root;
  nlohmann::ordered_json p;
  p["mass"] = cfg.params.mass;
  p["radius"] = cfg.params.radius;
  p["density"] = cfg.params.density;
  p["omega0"] = cfg.params.omega0;
  p["omega1"] = cfg.params.omega1;
  p["nbar"] = cfg.params.nbar;
  p["gas_temperature"] = cfg.params.gas_temperature;
  p["pressure"] = cfg.params.pressure;
  p["gravity"] = cfg.params.gravity;
  p["theta0"] = cfg.params.theta0;
  p["chi"] = cfg.params.chi;
  p["heating_rate"] = cfg.params.heating_rate;
  p["units"] = {{"omega0", "rad/s"}, {"omega1", "rad/s"}, {"theta0", "rad"},
                {"chi", "m"},        {"heating_rate", "K/s"}};
  root["params"] = p;

  nlohmann::ordered_json pr;
  pr["intensity0"] = cfg.profile.intensity0;
  pr["q"] = cfg.profile.q;
  pr["tau_exp"] = cfg.profile.tau_exp;
  pr["t0"] = cfg.profile.t0;
  pr["ts"] = cfg.profile.ts;
  pr["Ts"] = cfg.profile.Ts;
  root["profile"] = pr;

  nlohmann::ordered_json u;
  u["mass"] = cfg.uncertainties.mass;
  u["nbar"] = cfg.uncertainties.nbar;
  u["omega0"] = cfg.uncertainties.omega0;
  u["omega1"] = cfg.uncertainties.omega1;
  root["uncertainties"] = u;

  root["gas"] = {{"n2_fraction", cfg.gas.n2_fraction}};
  root["lpn"] = {{"wavelength", cfg.lpn.wavelength},
                 {"mirror_distance", cfg.lpn.mirror_distance},
                 {"freq_noise_psd", cfg.lpn.freq_noise_psd}};

  if (cfg.sweep) {
    nlohmann::ordered_json s;
    if (!cfg.sweep->tau.empty()) s["tau"] = cfg.sweep->tau;
    if (!cfg.sweep->tilt.empty()) s["tilt"] = cfg.sweep->tilt;
    if (!cfg.sweep->heating.empty()) s["heating"] = cfg.sweep->heating;
    root["sweep"] = s;
  }

  root["output_dir"] = cfg.output_dir.string();
  root["seed"] = cfg.seed;
  root["format"] = cfg.format;
  root["workers"] = cfg.workers;
  return root.dump(2);
}

} // namespace qacc
