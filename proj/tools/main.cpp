#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "mtscore/config.hpp"
#include "mtscore/errors.hpp"
#include "mtscore/experiment.hpp"
#include "mtscore/steering.hpp"

namespace {

void warn_if_outside_fresnel(const mtscore::ExperimentConfig& cfg) {
  const mtscore::ArrayGeometry geom{cfg.array.sensors, cfg.array.spacing_m,
                                    cfg.array.wavelength_m};
  const auto [lo, hi] = mtscore::fresnel_region(geom);
  for (const auto& [name, loc] :
       {std::pair{"theta0", cfg.theta0}, std::pair{"theta1", cfg.theta1}}) {
    if (loc.range_m <= lo || loc.range_m >= hi)
      std::cerr << "warning: " << name << " range " << loc.range_m
                << " m lies outside the near-field validity interval (" << lo << ", " << hi
                << ") m of this array\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measure-transformed Gaussian quasi score test simulator"};

  std::string config_path;
  std::string mode_override;
  std::string out_override;
  std::uint64_t seed_override = 0;
  int threads = 0;

  app.add_option("--config", config_path, "JSON experiment config")->required();
  app.add_option("--mode", mode_override, "override config mode (size|power|width_curve|single_test)");
  auto* seed_opt = app.add_option("--seed", seed_override, "override config seed");
  auto* threads_opt =
      app.add_option("--threads", threads, "worker thread count (0 = one per hardware thread)")
          ->envname("MTSCORE_THREADS");
  app.add_option("--out", out_override, "override config output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    mtscore::ExperimentConfig cfg = mtscore::load_config_file(config_path);
    if (!mode_override.empty()) cfg.mode = mtscore::parse_run_mode(mode_override);
    if (seed_opt->count() > 0) cfg.seed = seed_override;
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (threads_opt->count() > 0) cfg.threads = threads < 0 ? 0 : threads;

    warn_if_outside_fresnel(cfg);

    const auto artifacts = mtscore::run_experiment(cfg);
    for (const auto& a : artifacts) std::cout << "wrote " << a.path << "\n";
    return 0;
  } catch (const mtscore::ParseError& e) {
    std::cerr << "config parse error: " << e.what() << "\n";
    return 2;
  } catch (const mtscore::ValidationError& e) {
    std::cerr << "config validation error: " << e.what() << "\n";
    return 3;
  } catch (const mtscore::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
