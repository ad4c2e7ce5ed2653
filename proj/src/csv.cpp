#include "qacc/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qacc {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& field, size_t line_no) {
  try {
    size_t used = 0;
    const double v = std::stod(field, &used);
    if (trim(field.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw std::runtime_error("csv: malformed numeric field '" + field + "' on line " +
                           std::to_string(line_no));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("csv: cannot open " + path.string() + " for writing");
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("csv: cannot open " + path.string());
  return is;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  return csv_path.string() + ".json";
}

} // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::pair<double, double>> read_pair_csv(std::istream& is,
                                                     const std::string& col0,
                                                     const std::string& col1) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("csv: empty input");
  if (trim(line) != col0 + "," + col1) {
    throw std::runtime_error("csv: expected header '" + col0 + "," + col1 + "', got '" +
                             trim(line) + "'");
  }
  std::vector<std::pair<double, double>> rows;
  size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("csv: missing column on line " + std::to_string(line_no));
    }
    rows.emplace_back(parse_double(t.substr(0, comma), line_no),
                      parse_double(t.substr(comma + 1), line_no));
  }
  return rows;
}

void write_pair_csv(std::ostream& os, const std::string& col0, const std::string& col1,
                    std::span<const std::pair<double, double>> rows) {
  os << col0 << "," << col1 << "\n";
  for (const auto& [a, b] : rows) {
    os << format_double(a) << "," << format_double(b) << "\n";
  }
}

void save_shotset(const ShotSet& shots, const std::filesystem::path& csv_path) {
  auto os = open_out(csv_path);
  os << "sample_m\n";
  for (double s : shots.samples) os << format_double(s) << "\n";

  nlohmann::ordered_json meta;
  meta["measure_time_s"] = shots.measure_time;
  meta["tilt_rad"] = shots.tilt;
  meta["seed"] = shots.seed;
  meta["count"] = shots.samples.size();
  auto js = open_out(sidecar_path(csv_path));
  js << meta.dump(2) << "\n";
}

ShotSet load_shotset(const std::filesystem::path& csv_path) {
  auto is = open_in(csv_path);
  std::string line;
  if (!std::getline(is, line) || trim(line) != "sample_m") {
    throw std::runtime_error("csv: expected header 'sample_m' in " + csv_path.string());
  }
  ShotSet shots;
  size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    shots.samples.push_back(parse_double(t, line_no));
  }

  const auto side = sidecar_path(csv_path);
  if (std::filesystem::exists(side)) {
    auto js = open_in(side);
    nlohmann::json meta = nlohmann::json::parse(js);
    shots.measure_time = meta.value("measure_time_s", 0.0);
    shots.tilt = meta.value("tilt_rad", 0.0);
    shots.seed = meta.value("seed", uint64_t{0});
  }
  return shots;
}

void save_accel_series(const AccelSeries& series, const std::filesystem::path& csv_path) {
  auto os = open_out(csv_path);
  os << "a_mps2\n";
  for (double v : series.values) os << format_double(v) << "\n";

  nlohmann::ordered_json meta;
  meta["sample_rate_hz"] = series.sample_rate;
  meta["count"] = series.values.size();
  auto js = open_out(sidecar_path(csv_path));
  js << meta.dump(2) << "\n";
}

AccelSeries load_accel_series(const std::filesystem::path& csv_path) {
  auto is = open_in(csv_path);
  std::string line;
  if (!std::getline(is, line) || trim(line) != "a_mps2") {
    throw std::runtime_error("csv: expected header 'a_mps2' in " + csv_path.string());
  }
  AccelSeries series;
  size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    series.values.push_back(parse_double(t, line_no));
  }

  auto js = open_in(sidecar_path(csv_path));
  nlohmann::json meta = nlohmann::json::parse(js);
  if (!meta.contains("sample_rate_hz")) {
    throw std::runtime_error("csv: sidecar missing sample_rate_hz for " + csv_path.string());
  }
  series.sample_rate = meta["sample_rate_hz"].get<double>();
  return series;
}

void save_sigma_trace(const SigmaTrace& trace, const std::filesystem::path& csv_path) {
  auto os = open_out(csv_path);
  write_pair_csv(os, "t_s", "sigma_m", trace.points);

  nlohmann::ordered_json meta;
  meta["tau_s"] = trace.tau;
  auto js = open_out(sidecar_path(csv_path));
  js << meta.dump(2) << "\n";
}

SigmaTrace load_sigma_trace(const std::filesystem::path& csv_path) {
  auto is = open_in(csv_path);
  SigmaTrace trace;
  trace.points = read_pair_csv(is, "t_s", "sigma_m");

  auto js = open_in(sidecar_path(csv_path));
  nlohmann::json meta = nlohmann::json::parse(js);
  if (!meta.contains("tau_s")) {
    throw std::runtime_error("csv: sidecar missing tau_s for " + csv_path.string());
  }
  trace.tau = meta["tau_s"].get<double>();
  return trace;
}

void write_allan_csv(std::ostream& os, const AllanSeries& series) {
  os << "t_A_s,allan_mps2,terms\n";
  for (size_t i = 0; i < series.integration_times.size(); ++i) {
    os << format_double(series.integration_times[i]) << ","
       << format_double(series.deviations[i]) << "," << series.terms[i] << "\n";
  }
}

} // namespace qacc
