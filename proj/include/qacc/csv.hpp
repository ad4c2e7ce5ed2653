#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qacc/allan.hpp"
#include "qacc/heating.hpp"
#include "qacc/shots.hpp"

namespace qacc {

/// Two-column numeric CSV with a mandatory header naming exactly the two
/// expected columns. Throws std::runtime_error on a header mismatch or a
/// malformed row.
std::vector<std::pair<double, double>> read_pair_csv(std::istream& is,
                                                     const std::string& col0,
                                                     const std::string& col1);

void write_pair_csv(std::ostream& os, const std::string& col0, const std::string& col1,
                    std::span<const std::pair<double, double>> rows);

/// ShotSet: `sample_m` single-column CSV plus a JSON sidecar
/// (<csv path>.json) carrying measure_time_s, tilt_rad and seed.
void save_shotset(const ShotSet& shots, const std::filesystem::path& csv_path);
ShotSet load_shotset(const std::filesystem::path& csv_path);

/// AccelSeries: `a_mps2` single-column CSV plus a JSON sidecar with f_s.
void save_accel_series(const AccelSeries& series, const std::filesystem::path& csv_path);
AccelSeries load_accel_series(const std::filesystem::path& csv_path);

/// Width trace: `t_s,sigma_m` CSV plus a JSON sidecar with tau_s.
void save_sigma_trace(const SigmaTrace& trace, const std::filesystem::path& csv_path);
SigmaTrace load_sigma_trace(const std::filesystem::path& csv_path);

/// Columns: t_A_s,allan_mps2,terms.
void write_allan_csv(std::ostream& os, const AllanSeries& series);

/// Deterministic shortest-roundtrip formatting used by every CSV writer.
std::string format_double(double v);

} // namespace qacc
