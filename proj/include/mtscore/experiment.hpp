#pragma once

#include <vector>

#include "mtscore/config.hpp"
#include "mtscore/csv.hpp"
#include "mtscore/simulation.hpp"

namespace mtscore {

inline constexpr const char* kVersion = "0.1.0";

Scenario make_scenario(const ExperimentConfig& config);
DetectorSpec make_detector(const DetectorConfig& config, const WidthGridSpec& grid);

/// Execute the configured mode and write its artifacts into
/// config.output_dir: size.csv, power.csv, width_curve.csv, or report.json,
/// plus a manifest.json (config echo, seed, threads, version, wall time),
/// always listed last. config.threads = 0 means one worker per hardware
/// thread. Rerunning the same config and seed reproduces the files byte for
/// byte (the manifest differs only in its wall-time entry).
std::vector<ResultArtifact> run_experiment(const ExperimentConfig& config);

}  // namespace mtscore
