#pragma once

#include <Eigen/Dense>

#include "mtscore/mt_function.hpp"
#include "mtscore/types.hpp"

namespace mtscore {

/// Normalized transformed weights: w_n = u(X_n) / sum_k u(X_k).
///
/// Computed in log space with the max log-weight subtracted before
/// exponentiation, so a batch whose raw u values all underflow still yields
/// finite weights. Throws AllWeightsZero only when every log-weight is -inf.
Eigen::VectorXd mt_weights(const SampleBatch& batch, const MTFunction& u);

/// Weighted sample mean under the transformed measure, sum_n X_n w_n.
Eigen::VectorXcd empirical_mt_mean(const SampleBatch& batch, const MTFunction& u);

/// Weighted sample covariance under the transformed measure,
/// sum_n X_n X_n^H w_n - mean mean^H, returned exactly Hermitian.
Eigen::MatrixXcd empirical_mt_cov(const SampleBatch& batch, const MTFunction& u);

/// Mean and covariance computed from one weight pass, along with the raw
/// (unnormalized) weight total sum_n u(X_n).
struct MTMoments {
  Eigen::VectorXcd mean;
  Eigen::MatrixXcd cov;
  double weight_total = 0.0;
};

MTMoments empirical_mt_moments(const SampleBatch& batch, const MTFunction& u);

}  // namespace mtscore
