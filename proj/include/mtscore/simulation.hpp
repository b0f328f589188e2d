#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mtscore/distributions.hpp"
#include "mtscore/score_test.hpp"
#include "mtscore/types.hpp"

namespace mtscore {

enum class DetectorKind { mt_gqst, gqst, zmnl_gqst };
enum class WidthPolicy { data_driven, fixed };

struct DetectorSpec {
  DetectorKind kind = DetectorKind::mt_gqst;
  WidthPolicy width_policy = WidthPolicy::data_driven;  // mt_gqst only
  double width = 5.0;                                   // used by the fixed policy
  double clip_factor = 3.0;                             // zmnl_gqst only
  std::vector<double> width_grid = make_width_grid(1.0, 30.0, 0.5);
  // Data-driven selection normally reruns on every trial's own batch; the
  // fast mode selects once on trial 0 and reuses that width.
  bool reselect_per_trial = true;
};

std::string detector_kind_name(DetectorKind kind);

/// One simulated experiment: a source at theta0 (null) or theta1 (alternative)
/// emitting BPSK symbols through the array, in Gaussian or K-distributed
/// noise, tested at size alpha on batches of `snapshots` snapshots.
struct Scenario {
  ArrayGeometry geom{8, 0.25, 1.0};
  LocationParam theta0{1.5, 0.0};
  LocationParam theta1{1.51, 0.008726646259971648};  // 0.5 degrees
  NoiseSpec noise;
  SignalSpec signal;
  int snapshots = 1000;
  double alpha = 0.01;
  long trials = 10000;
  std::uint64_t seed = 0;
};

/// Snapshots X_n = S_n a(theta) + nu_n Z_n, n = 1..N, with BPSK symbols S_n,
/// circular Gaussian Z_n of the configured noise variance, and texture nu_n
/// (identically 1 for the gaussian family). Symbol and noise draws come from
/// two independent streams derived from `rng`.
SampleBatch generate_batch(std::mt19937_64& rng, const LocationParam& theta,
                           const Scenario& scenario);

/// Clipping threshold c = clip_factor * median snapshot norm.
double zmnl_threshold(const SampleBatch& batch, double clip_factor);

///// Zero-memory nonlinearity: snapshots with norm above c are rescaled onto the
/// radius-c sphere, all others pass through unchanged.
SampleBatch zmnl_clip_at(const SampleBatch& batch, double c);
SampleBatch zmnl_clip(const SampleBatch& batch, double clip_factor);

enum class Hypothesis { null, alternative };

enum class TrialOutcome { accept, reject, invalid };

///// One complete trial: draw a batch under the given hypothesis, run the
/// detector at theta0, return the decision. Singular estimates (or no
/// admissible width) make the trial invalid rather than a decision.
TrialOutcome run_trial(std::mt19937_64& rng, const Scenario& scenario,
                       const DetectorSpec& detector, Hypothesis hypothesis);

struct SizeEstimate {
  long rejections = 0;
  long valid = 0;
  long invalid = 0;
  double rate = 0.0;
  double std_error = 0.0;
};

/// Null rejection rate over scenario.trials independent trials. Trial k draws
/// from a stream keyed by (seed, k), so results do not depend on the worker
/// count. Invalid trials are excluded from the rate denominator and counted.
SizeEstimate empirical_size(const Scenario& scenario, const DetectorSpec& detector,
                            int threads = 1);

struct PowerCurve {
  std::vector<double> snr_db;
  std::vector<DetectorSpec> detectors;
  std::vector<std::string> labels;
  // Indexed [detector][snr point].
  std::vector<std::vector<long>> rejections;
  std::vector<std::vector<long>> valid;
  std::vector<std::vector<long>> invalid;
  std::vector<std::vector<double>> rate;
  std::vector<std::vector<double>> std_error;
  std::vector<std::vector<double>> analytic;  // NaN where no estimate was available
};

/// Rejection rate under the alternative across an SNR grid, one batch per
/// (snr, trial) shared by all detectors. The signal variance at each point is
/// noise variance * 10^(snr_db/10). Alongside the empirical rates, an
/// asymptotic prediction is computed per detector from the local drift
/// h = sqrt(N) (theta1 - theta0) and the parameter covariance estimate
/// averaged over the first 50 trials.
PowerCurve power_curve(const Scenario& scenario, const std::vector<double>& snr_grid_db,
                       const std::vector<DetectorSpec>& detectors, int threads = 1);

}  // namespace mtscore
