#include "mtscore/experiment.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <thread>

#include "mtscore/errors.hpp"
#include "mtscore/rng.hpp"

namespace mtscore {

using nlohmann::json;

namespace {

constexpr std::uint64_t kStreamWidthCurve = 3;
constexpr std::uint64_t kStreamSingleTest = 4;

std::vector<std::string> detector_labels(const std::vector<DetectorConfig>& detectors) {
  std::vector<int> kind_count(3, 0), kind_seen(3, 0);
  for (const auto& d : detectors) ++kind_count[static_cast<int>(d.kind)];
  std::vector<std::string> labels;
  for (const auto& d : detectors) {
    std::string label = detector_kind_name(d.kind);
    const int idx = ++kind_seen[static_cast<int>(d.kind)];
    if (kind_count[static_cast<int>(d.kind)] > 1) label += "#" + std::to_string(idx);
    labels.push_back(label);
  }
  return labels;
}

std::string artifact_path(const ExperimentConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.output_dir) / name).string();
}

ResultArtifact run_size(const ExperimentConfig& cfg, int threads) {
  const Scenario scenario = make_scenario(cfg);
  const auto labels = detector_labels(cfg.detectors);

  std::vector<CsvRow> rows;
  for (std::size_t d = 0; d < cfg.detectors.size(); ++d) {
    const SizeEstimate est =
        empirical_size(scenario, make_detector(cfg.detectors[d], cfg.width_grid), threads);
    rows.push_back({labels[d], static_cast<long long>(est.rejections),
                    static_cast<long long>(est.valid), static_cast<long long>(est.invalid),
                    est.rate, est.std_error});
  }
  return emit_csv({"detector", "rejections", "trials", "invalid", "rate", "stderr"}, rows,
                  artifact_path(cfg, "size.csv"));
}

ResultArtifact run_power(const ExperimentConfig& cfg, int threads) {
  const Scenario scenario = make_scenario(cfg);
  std::vector<DetectorSpec> detectors;
  for (const auto& d : cfg.detectors) detectors.push_back(make_detector(d, cfg.width_grid));

  const PowerCurve curve = power_curve(scenario, cfg.snr_grid_db, detectors, threads);

  std::vector<CsvRow> rows;
  for (std::size_t s = 0; s < curve.snr_db.size(); ++s)
    for (std::size_t d = 0; d < detectors.size(); ++d)
      rows.push_back({curve.snr_db[s], curve.labels[d],
                      static_cast<long long>(curve.rejections[d][s]),
                      static_cast<long long>(curve.valid[d][s]), curve.rate[d][s],
                      curve.std_error[d][s], curve.analytic[d][s]});
  return emit_csv({"snr_db", "detector", "rejections", "trials", "rate", "stderr",
                   "analytic_rate"},
                  rows, artifact_path(cfg, "power.csv"));
}

ResultArtifact run_width_curve(const ExperimentConfig& cfg) {
  const Scenario scenario = make_scenario(cfg);
  auto rng = make_engine(scenario.seed, {kStreamWidthCurve, 0});
  const SampleBatch batch = generate_batch(rng, scenario.theta0, scenario);
  const auto grid = make_width_grid(cfg.width_grid.min, cfg.width_grid.max, cfg.width_grid.step);
  const WidthSelection sel = select_width(batch, scenario.theta0, scenario.geom, grid);

  std::vector<CsvRow> rows;
  for (std::size_t i = 0; i < sel.grid.size(); ++i)
    rows.push_back({sel.grid[i], sel.objective[i]});
  return emit_csv({"omega", "spectral_norm"}, rows, artifact_path(cfg, "width_curve.csv"));
}

ResultArtifact run_single_test(const ExperimentConfig& cfg) {
  const Scenario scenario = make_scenario(cfg);
  const DetectorSpec detector = make_detector(cfg.detectors.front(), cfg.width_grid);
  auto rng = make_engine(scenario.seed, {kStreamSingleTest, 0});
  const SampleBatch batch = generate_batch(rng, scenario.theta0, scenario);

  const SampleBatch* data = &batch;
  SampleBatch clipped;
  if (detector.kind == DetectorKind::zmnl_gqst) {
    clipped = zmnl_clip(batch, detector.clip_factor);
    data = &clipped;
  }
  const ScoreEvaluator evaluator(*data, scenario.theta0, scenario.geom);
  MTFunction u = MTFunction::constant();
  std::optional<double> width;
  if (detector.kind == DetectorKind::mt_gqst) {
    width = detector.width_policy == WidthPolicy::data_driven
                ? select_width(evaluator, detector.width_grid).width
                : detector.width;
    u = MTFunction::gaussian(*width);
  }
  const TestReport report = decide(evaluator.test_statistic(u), scenario.alpha, 2, width);

  json out;
  out["detector"] = detector_kind_name(detector.kind);
  out["statistic"] = report.statistic;
  out["threshold"] = report.threshold;
  out["alpha"] = report.alpha;
  out["df"] = report.df;
  out["reject"] = report.reject;
  if (report.width)
    out["width"] = *report.width;
  else
    out["width"] = "constant";
  out["seed"] = scenario.seed;

  const std::string path = artifact_path(cfg, "report.json");
  write_file_atomic(path, out.dump(2) + "\n");
  return ResultArtifact{path, "json", kArtifactSchemaVersion};
}

}  // namespace

Scenario make_scenario(const ExperimentConfig& cfg) {
  Scenario s;
  s.geom = ArrayGeometry{cfg.array.sensors, cfg.array.spacing_m, cfg.array.wavelength_m};
  s.theta0 = LocationParam{cfg.theta0.range_m, deg2rad(cfg.theta0.bearing_deg)};
  s.theta1 = LocationParam{cfg.theta1.range_m, deg2rad(cfg.theta1.bearing_deg)};
  s.noise.family = cfg.noise.family;
  s.noise.variance = cfg.noise.variance;
  s.noise.shape = cfg.noise.shape;
  s.signal.variance = cfg.signal.variance;
  s.snapshots = cfg.snapshots;
  s.alpha = cfg.alpha;
  s.trials = cfg.trials;
  s.seed = cfg.seed;
  return s;
}

DetectorSpec make_detector(const DetectorConfig& config, const WidthGridSpec& grid) {
  DetectorSpec d;
  d.kind = config.kind;
  d.width_policy = config.width_policy;
  d.width = config.width;
  d.clip_factor = config.clip_factor;
  d.width_grid = make_width_grid(grid.min, grid.max, grid.step);
  return d;
}

std::vector<ResultArtifact> run_experiment(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const auto start = std::chrono::steady_clock::now();

  const int threads =
      cfg.threads > 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());

  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.output_dir + ": " + ec.message());

  std::vector<ResultArtifact> artifacts;
  switch (cfg.mode) {
    case RunMode::size: artifacts.push_back(run_size(cfg, threads)); break;
    case RunMode::power: artifacts.push_back(run_power(cfg, threads)); break;
    case RunMode::width_curve: artifacts.push_back(run_width_curve(cfg)); break;
    case RunMode::single_test: artifacts.push_back(run_single_test(cfg)); break;
  }

  const double wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest;
  manifest["version"] = kVersion;
  manifest["mode"] = run_mode_name(cfg.mode);
  manifest["seed"] = cfg.seed;
  manifest["threads"] = threads;
  manifest["wall_time_s"] = wall_s;
  manifest["config"] = json::parse(emit_config(cfg));
  manifest["files"] = json::array();
  for (const auto& a : artifacts)
    manifest["files"].push_back(
        {{"path", a.path}, {"format", a.format}, {"schema_version", a.schema_version}});

  const std::string manifest_path = artifact_path(cfg, "manifest.json");
  write_file_atomic(manifest_path, manifest.dump(2) + "\n");
  artifacts.push_back(ResultArtifact{manifest_path, "json", kArtifactSchemaVersion});
  return artifacts;
}

}  // namespace mtscore
