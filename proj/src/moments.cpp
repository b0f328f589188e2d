#include "mtscore/moments.hpp"

#include <cmath>
#include <limits>

#include "mtscore/errors.hpp"

namespace mtscore {

Eigen::VectorXd mt_weights(const SampleBatch& batch, const MTFunction& u) {
  const Eigen::Index n = batch.size();
  if (n == 0) throw std::invalid_argument("mt_weights: empty batch");

  Eigen::VectorXd logw(n);
  double logw_max = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    logw(i) = u.log_weight_from_sqnorm(batch.samples.col(i).squaredNorm());
    if (logw(i) > logw_max) logw_max = logw(i);
  }
  if (std::isinf(logw_max) && logw_max < 0.0)
    throw AllWeightsZero("mt_weights: all transformed weights are zero");

  Eigen::VectorXd w(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    w(i) = std::exp(logw(i) - logw_max);
    total += w(i);
  }
  return w / total;
}

Eigen::VectorXcd empirical_mt_mean(const SampleBatch& batch, const MTFunction& u) {
  return batch.samples * mt_weights(batch, u).cast<cplx>();
}

Eigen::MatrixXcd empirical_mt_cov(const SampleBatch& batch, const MTFunction& u) {
  return empirical_mt_moments(batch, u).cov;
}

MTMoments empirical_mt_moments(const SampleBatch& batch, const MTFunction& u) {
  const Eigen::VectorXd w = mt_weights(batch, u);
  const Eigen::Index p = batch.dim();

  MTMoments m;
  m.weight_total = 0.0;
  for (Eigen::Index i = 0; i < batch.size(); ++i)
    m.weight_total += u(batch.samples.col(i));
  m.mean = batch.samples * w.cast<cplx>();
  Eigen::MatrixXcd second = Eigen::MatrixXcd::Zero(p, p);
  for (Eigen::Index i = 0; i < batch.size(); ++i) {
    const auto x = batch.samples.col(i);
    second.noalias() += w(i) * (x * x.adjoint());
  }
  second -= m.mean * m.mean.adjoint();
  m.cov = 0.5 * (second + second.adjoint());
  return m;
}

}  // namespace mtscore
