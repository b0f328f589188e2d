#include "mtscore/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "mtscore/errors.hpp"
#include "mtscore/rng.hpp"
#include "mtscore/steering.hpp"

namespace mtscore {

namespace {

constexpr std::uint64_t kStreamSize = 1;
constexpr std::uint64_t kStreamPower = 2;

const double kNaN = std::numeric_limits<double>::quiet_NaN();

void parallel_for(long n, int threads, const std::function<void(long)>& body) {
  if (threads <= 1 || n <= 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr first_error = nullptr;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const long i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(n, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct DetectorEvaluation {
  TrialOutcome outcome = TrialOutcome::invalid;
  std::optional<Eigen::Matrix2d> r;  // covariance at the applied MT-function
};

DetectorEvaluation evaluate_detector(const SampleBatch& batch, const Scenario& scenario,
                                     const DetectorSpec& detector, double threshold,
                                     bool want_r) {
  DetectorEvaluation ev;
  try {
    const SampleBatch* data = &batch;
    SampleBatch clipped;
    if (detector.kind == DetectorKind::zmnl_gqst) {
      clipped = zmnl_clip(batch, detector.clip_factor);
      data = &clipped;
    }
    const ScoreEvaluator evaluator(*data, scenario.theta0, scenario.geom);
    MTFunction u = MTFunction::constant();
    if (detector.kind == DetectorKind::mt_gqst) {
      const double w = detector.width_policy == WidthPolicy::data_driven
                           ? select_width(evaluator, detector.width_grid).width
                           : detector.width;
      u = MTFunction::gaussian(w);
    }
    const double stat = evaluator.test_statistic(u);
    ev.outcome = stat > threshold ? TrialOutcome::reject : TrialOutcome::accept;
    if (want_r) {
      try {
        ev.r = evaluator.r_hat(u);
      } catch (const Error&) {
        // no covariance estimate for this trial; the analytic curve skips it
      }
    }
  } catch (const SingularGHat&) {
    ev.outcome = TrialOutcome::invalid;
  } catch (const SingularFHat&) {
    ev.outcome = TrialOutcome::invalid;
  } catch (const NoAdmissibleWidth&) {
    ev.outcome = TrialOutcome::invalid;
  }
  return ev;
}

void check_scenario(const Scenario& scenario) {
  if (scenario.snapshots < 1) throw std::invalid_argument("Scenario: snapshots must be >= 1");
  if (scenario.trials < 1) throw std::invalid_argument("Scenario: trials must be >= 1");
  if (!(scenario.alpha > 0.0 && scenario.alpha < 1.0))
    throw std::invalid_argument("Scenario: alpha must lie in (0, 1)");
}

// Fast-mode width selection: pick the width once on a reference batch and pin
// it, so later trials skip the grid sweep. Falls back to per-trial selection
// when the reference batch itself admits no width.
DetectorSpec freeze_width(const DetectorSpec& detector, const SampleBatch& batch0,
                          const Scenario& scenario) {
  if (detector.kind != DetectorKind::mt_gqst ||
      detector.width_policy != WidthPolicy::data_driven || detector.reselect_per_trial)
    return detector;
  DetectorSpec frozen = detector;
  try {
    const ScoreEvaluator evaluator(batch0, scenario.theta0, scenario.geom);
    frozen.width = select_width(evaluator, detector.width_grid).width;
    frozen.width_policy = WidthPolicy::fixed;
  } catch (const Error&) {
  }
  return frozen;
}

}  // namespace

std::string detector_kind_name(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::mt_gqst: return "mt_gqst";
    case DetectorKind::gqst: return "gqst";
    case DetectorKind::zmnl_gqst: return "zmnl_gqst";
  }
  return "unknown";
}

SampleBatch generate_batch(std::mt19937_64& rng, const LocationParam& theta,
                           const Scenario& scenario) {
  if (scenario.snapshots < 1) throw std::invalid_argument("generate_batch: snapshots must be >= 1");
  const Eigen::VectorXcd a = steering_vector(theta, scenario.geom);
  const int p = scenario.geom.sensors;
  const int n = scenario.snapshots;

  std::mt19937_64 signal_rng(rng());
  std::mt19937_64 noise_rng(rng());

  Eigen::MatrixXcd samples(p, n);
  for (int i = 0; i < n; ++i) {
    const cplx s = sample_bpsk(signal_rng, scenario.signal.variance);
    double nu = 1.0;
    if (scenario.noise.family == NoiseSpec::Family::k_dist)
      nu = sample_k_texture(noise_rng, scenario.noise.shape);
    const Eigen::VectorXcd z = sample_complex_gaussian(noise_rng, p, scenario.noise.variance);
    samples.col(i) = s * a + nu * z;
  }
  return SampleBatch(std::move(samples));
}

double zmnl_threshold(const SampleBatch& batch, double clip_factor) {
  if (!(clip_factor > 0.0)) throw std::invalid_argument("zmnl: clip factor must be positive");
  const Eigen::Index n = batch.size();
  if (n == 0) throw std::invalid_argument("zmnl: empty batch");
  std::vector<double> norms(n);
  for (Eigen::Index i = 0; i < n; ++i) norms[i] = batch.samples.col(i).norm();
  std::sort(norms.begin(), norms.end());
  const double median = (n % 2 == 1) ? norms[n / 2] : 0.5 * (norms[n / 2 - 1] + norms[n / 2]);
  return clip_factor * median;
}

SampleBatch zmnl_clip_at(const SampleBatch& batch, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("zmnl: clipping threshold must be positive");
  SampleBatch out = batch;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double norm = out.samples.col(i).norm();
    if (norm > c) out.samples.col(i) *= c / norm;
  }
  return out;
}

SampleBatch zmnl_clip(const SampleBatch& batch, double clip_factor) {
  return zmnl_clip_at(batch, zmnl_threshold(batch, clip_factor));
}

TrialOutcome run_trial(std::mt19937_64& rng, const Scenario& scenario,
                       const DetectorSpec& detector, Hypothesis hypothesis) {
  check_scenario(scenario);
  const LocationParam& theta =
      hypothesis == Hypothesis::null ? scenario.theta0 : scenario.theta1;
  const SampleBatch batch = generate_batch(rng, theta, scenario);
  const double threshold = chi2_isf(scenario.alpha, 2);
  return evaluate_detector(batch, scenario, detector, threshold, false).outcome;
}

SizeEstimate empirical_size(const Scenario& scenario, const DetectorSpec& detector, int threads) {
  check_scenario(scenario);
  if (scenario.trials < 100)
    throw std::invalid_argument("empirical_size: needs at least 100 trials");
  const double threshold = chi2_isf(scenario.alpha, 2);

  DetectorSpec applied = detector;
  if (!detector.reselect_per_trial) {
    auto rng0 = make_engine(scenario.seed, {kStreamSize, 0});
    applied = freeze_width(detector, generate_batch(rng0, scenario.theta0, scenario), scenario);
  }

  std::vector<std::uint8_t> outcomes(scenario.trials);
  parallel_for(scenario.trials, threads, [&](long k) {
    auto rng = make_engine(scenario.seed, {kStreamSize, static_cast<std::uint64_t>(k)});
    const SampleBatch batch = generate_batch(rng, scenario.theta0, scenario);
    outcomes[k] =
        static_cast<std::uint8_t>(evaluate_detector(batch, scenario, applied, threshold, false).outcome);
  });

  SizeEstimate est;
  for (const auto o : outcomes) {
    if (o == static_cast<std::uint8_t>(TrialOutcome::invalid))
      ++est.invalid;
    else {
      ++est.valid;
      if (o == static_cast<std::uint8_t>(TrialOutcome::reject)) ++est.rejections;
    }
  }
  if (est.valid > 0) {
    est.rate = static_cast<double>(est.rejections) / est.valid;
    est.std_error = std::sqrt(est.rate * (1.0 - est.rate) / est.valid);
  } else {
    est.rate = kNaN;
    est.std_error = kNaN;
  }
  return est;
}

PowerCurve power_curve(const Scenario& scenario, const std::vector<double>& snr_grid_db,
                       const std::vector<DetectorSpec>& detectors, int threads) {
  check_scenario(scenario);
  if (snr_grid_db.empty()) throw std::invalid_argument("power_curve: empty SNR grid");
  if (detectors.empty()) throw std::invalid_argument("power_curve: no detectors");
  if (scenario.theta1.range_m == scenario.theta0.range_m &&
      scenario.theta1.bearing_rad == scenario.theta0.bearing_rad)
    throw std::invalid_argument("power_curve: theta1 must differ from theta0");

  const double threshold = chi2_isf(scenario.alpha, 2);
  const std::size_t nd = detectors.size();
  const std::size_t ns = snr_grid_db.size();
  const long n_cov_trials = std::min<long>(50, scenario.trials);

  PowerCurve curve;
  curve.snr_db = snr_grid_db;
  curve.detectors = detectors;
  curve.rejections.assign(nd, std::vector<long>(ns, 0));
  curve.valid.assign(nd, std::vector<long>(ns, 0));
  curve.invalid.assign(nd, std::vector<long>(ns, 0));
  curve.rate.assign(nd, std::vector<double>(ns, kNaN));
  curve.std_error.assign(nd, std::vector<double>(ns, kNaN));
  curve.analytic.assign(nd, std::vector<double>(ns, kNaN));

  // Labels: the kind name, numbered when a kind appears more than once.
  std::vector<int> kind_count(3, 0);
  for (const auto& d : detectors) ++kind_count[static_cast<int>(d.kind)];
  std::vector<int> kind_seen(3, 0);
  for (const auto& d : detectors) {
    std::string label = detector_kind_name(d.kind);
    const int idx = ++kind_seen[static_cast<int>(d.kind)];
    if (kind_count[static_cast<int>(d.kind)] > 1) label += "#" + std::to_string(idx);
    curve.labels.push_back(label);
  }

  const Eigen::Vector2d drift =
      std::sqrt(static_cast<double>(scenario.snapshots)) *
      Eigen::Vector2d(scenario.theta1.range_m - scenario.theta0.range_m,
                      scenario.theta1.bearing_rad - scenario.theta0.bearing_rad);

  for (std::size_t s = 0; s < ns; ++s) {
    Scenario point = scenario;
    point.signal.variance = scenario.noise.variance * std::pow(10.0, snr_grid_db[s] / 10.0);

    std::vector<DetectorSpec> applied = detectors;
    if (std::any_of(detectors.begin(), detectors.end(),
                    [](const DetectorSpec& d) { return !d.reselect_per_trial; })) {
      auto rng0 = make_engine(scenario.seed, {kStreamPower, static_cast<std::uint64_t>(s), 0});
      const SampleBatch batch0 = generate_batch(rng0, point.theta1, point);
      for (auto& d : applied) d = freeze_width(d, batch0, point);
    }

    std::vector<std::uint8_t> outcomes(scenario.trials * nd);
    std::vector<std::vector<std::optional<Eigen::Matrix2d>>> covs(
        nd, std::vector<std::optional<Eigen::Matrix2d>>(n_cov_trials));

    parallel_for(scenario.trials, threads, [&](long k) {
      auto rng = make_engine(scenario.seed,
                             {kStreamPower, static_cast<std::uint64_t>(s),
                              static_cast<std::uint64_t>(k)});
      const SampleBatch batch = generate_batch(rng, point.theta1, point);
      const bool want_r = k < n_cov_trials;
      for (std::size_t d = 0; d < nd; ++d) {
        const DetectorEvaluation ev =
            evaluate_detector(batch, point, applied[d], threshold, want_r);
        outcomes[k * nd + d] = static_cast<std::uint8_t>(ev.outcome);
        if (want_r && ev.r) covs[d][k] = ev.r;
      }
    });

    for (std::size_t d = 0; d < nd; ++d) {
      long rej = 0, valid = 0, invalid = 0;
      for (long k = 0; k < scenario.trials; ++k) {
        const auto o = outcomes[k * nd + d];
        if (o == static_cast<std::uint8_t>(TrialOutcome::invalid))
          ++invalid;
        else {
          ++valid;
          if (o == static_cast<std::uint8_t>(TrialOutcome::reject)) ++rej;
        }
      }
      curve.rejections[d][s] = rej;
      curve.valid[d][s] = valid;
      curve.invalid[d][s] = invalid;
      if (valid > 0) {
        const double rate = static_cast<double>(rej) / valid;
        curve.rate[d][s] = rate;
        curve.std_error[d][s] = std::sqrt(rate * (1.0 - rate) / valid);
      }

      Eigen::Matrix2d r_bar = Eigen::Matrix2d::Zero();
      long n_r = 0;
      for (const auto& r : covs[d])
        if (r) {
          r_bar += *r;
          ++n_r;
        }
      if (n_r > 0) {
        r_bar /= static_cast<double>(n_r);
        try {
          curve.analytic[d][s] = asymptotic_power(drift, r_bar, 2, scenario.alpha);
        } catch (const Error&) {
          // averaged covariance not invertible; leave NaN
        }
      }
    }
  }
  return curve;
}

}  // namespace mtscore
