#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "mtscore/distributions.hpp"
#include "mtscore/simulation.hpp"
#include "mtscore/types.hpp"

namespace mtscore {

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

enum class RunMode { size, power, width_curve, single_test };

std::string run_mode_name(RunMode mode);
RunMode parse_run_mode(const std::string& name);

/// Location as it appears in config files: bearing in degrees. The engine
/// converts to radians when the scenario is assembled.
struct ConfigLocation {
  double range_m = 0.0;
  double bearing_deg = 0.0;
  bool operator==(const ConfigLocation&) const = default;
};

struct WidthGridSpec {
  double min = 1.0;
  double max = 30.0;
  double step = 0.5;
  bool operator==(const WidthGridSpec&) const = default;
};

struct DetectorConfig {
  DetectorKind kind = DetectorKind::mt_gqst;
  WidthPolicy width_policy = WidthPolicy::data_driven;
  double width = 5.0;        // fixed policy only
  double clip_factor = 3.0;  // zmnl_gqst only
  bool operator==(const DetectorConfig&) const = default;
};

struct ConfigGeometry {
  int sensors = 8;
  double spacing_m = 0.25;
  double wavelength_m = 1.0;
  bool operator==(const ConfigGeometry&) const = default;
};

struct ConfigNoise {
  NoiseSpec::Family family = NoiseSpec::Family::gaussian;
  double variance = 1.0;
  double shape = 0.75;  // k_dist only
  bool operator==(const ConfigNoise&) const = default;
};

/// Complete experiment description as read from a JSON config file. Defaults
/// reproduce the reference near-field scenario: an 8-sensor quarter-wavelength
/// array, a source at 1.5 m broadside tested against (1.51 m, 0.5 deg),
/// N = 1000 snapshots, size 0.01, 10^4 trials, widths 1..30.
struct ExperimentConfig {
  RunMode mode = RunMode::power;
  std::uint64_t seed = 12345;
  long trials = 10000;
  int snapshots = 1000;
  double alpha = 0.01;
  ConfigGeometry array;
  ConfigLocation theta0{1.5, 0.0};
  ConfigLocation theta1{1.51, 0.5};
  ConfigNoise noise;
  SignalSpec signal{1.0};
  std::vector<double> snr_grid_db = {-10, -8, -6, -4, -2, 0, 2, 4, 6, 8, 10};
  WidthGridSpec width_grid;
  std::vector<DetectorConfig> detectors{
      DetectorConfig{DetectorKind::mt_gqst, WidthPolicy::data_driven, 5.0, 3.0},
      DetectorConfig{DetectorKind::gqst, WidthPolicy::data_driven, 5.0, 3.0},
      DetectorConfig{DetectorKind::zmnl_gqst, WidthPolicy::data_driven, 5.0, 3.0}};
  std::string output_dir = "out";
  int threads = 0;  // 0 = one worker per hardware thread

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parse a JSON config. Unknown fields anywhere are rejected (ParseError,
/// naming the valid fields); type mismatches are ParseError; out-of-range
/// values are ValidationError. Every field is optional and defaults as above.
ExperimentConfig parse_config(const std::string& json_text);

/// Read and parse a config file. Unreadable file is IoError.
ExperimentConfig load_config_file(const std::string& path);

/// Emit a config as JSON such that parse_config(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& config);

}  // namespace mtscore
