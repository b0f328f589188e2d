#pragma once

#include <Eigen/Dense>
#include <functional>

#include "mtscore/moments.hpp"
#include "mtscore/steering.hpp"
#include "mtscore/types.hpp"

namespace mtscore {

/// Response vector and its partials evaluated once at a fixed location, for
/// reuse across the snapshots of a batch.
struct SteeringContext {
  Eigen::VectorXcd a;
  SteeringDerivatives deriv;

  SteeringContext(const LocationParam& theta, const ArrayGeometry& geom)
      : a(steering_vector(theta, geom)), deriv(steering_derivatives(theta, geom)) {}
};

/// Per-snapshot score contribution and its curvature in theta = (range, bearing):
///   psi_i     = 2 Re{ (a^H x) (x^H da_i) }
///   gamma_ij  = 2 Re{ (da_j^H x)(x^H da_i) + (a^H x)(x^H d2a_ij) }.
struct ScoreIngredients {
  Eigen::Vector2d psi;
  Eigen::Matrix2d gamma;
};

ScoreIngredients score_ingredients(const Eigen::VectorXcd& x, const SteeringContext& ctx);
ScoreIngredients score_ingredients(const Eigen::VectorXcd& x, const LocationParam& theta,
                                   const ArrayGeometry& geom);

/// Log-determinant divergence between positive definite Hermitian matrices,
/// D[A||B] = tr(A B^-1) - log det(A B^-1) - q. Zero iff A = B.
double logdet_divergence(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Parametric mean/covariance maps the fitted family supplies.
struct ModelMoments {
  std::function<Eigen::VectorXcd(const LocationParam&)> mean;
  std::function<Eigen::MatrixXcd(const LocationParam&)> covariance;
};

/// Fit criterion maximized by the transformed-moment estimator:
///   J(theta) = -D[cov_hat || Sigma(theta)] - (mean_hat - mu(theta))^H
///              Sigma(theta)^-1 (mean_hat - mu(theta)).
/// Always <= 0; -inf when the empirical covariance is singular.
double mtgqmle_objective(const MTMoments& moments, const LocationParam& candidate,
                         const ModelMoments& model);
double mtgqmle_objective(const SampleBatch& batch, const LocationParam& candidate,
                         const ModelMoments& model, const MTFunction& u);

}  // namespace mtscore
