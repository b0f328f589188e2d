#pragma once

#include <Eigen/Dense>
#include <random>

#include "mtscore/types.hpp"

namespace mtscore {

/// Upper tail P[X > x] of a central chi-square with df degrees of freedom.
/// Regularized incomplete gamma, series/continued-fraction split; absolute
/// error below 1e-10 on df in 1..200, x in [0, 1e4].
double chi2_sf(double x, int df);

/// Inverse of chi2_sf in x: the threshold exceeded with probability alpha.
double chi2_isf(double alpha, int df);

/// Upper tail of a noncentral chi-square with noncentrality lambda, computed
/// as a Poisson mixture of central tails. The sum starts at the modal Poisson
/// index and stops once the remaining mixture mass is below 1e-12.
double noncentral_chi2_sf(double x, int df, double lambda);

/// Power of a size-alpha chi-square score test against a local alternative
/// with drift h and asymptotic parameter covariance r: noncentral upper tail
/// at the size-alpha threshold with lambda = h^T r^-1 h.
double asymptotic_power(const Eigen::VectorXd& h, const Eigen::MatrixXd& r, int df, double alpha);

/// Power guaranteed against every drift of norm c: the least favorable
/// direction carries noncentrality c^2 / ||r||_spectral.
double worst_case_power(double c, const Eigen::MatrixXd& r, int df, double alpha);

/// Circular complex Gaussian vector: independent N(0, variance/2) real and
/// imaginary parts per coordinate, so E||Z||^2 = p * variance.
Eigen::VectorXcd sample_complex_gaussian(std::mt19937_64& rng, int p, double variance);

/// Texture factor nu = sqrt(tau), tau ~ Gamma(shape, 1/shape), so E[nu^2] = 1.
/// Multiplying a unit-variance Gaussian vector by nu gives K-distributed noise.
double sample_k_texture(std::mt19937_64& rng, double shape);

/// Real BPSK symbol +-sqrt(variance) with equal probability.
cplx sample_bpsk(std::mt19937_64& rng, double variance);

struct NoiseSpec {
  enum class Family { gaussian, k_dist };
  Family family = Family::gaussian;
  double variance = 1.0;
  double shape = 0.75;  // texture shape, used by the k_dist family only
};

struct SignalSpec {
  double variance = 1.0;
  bool operator==(const SignalSpec&) const = default;
};

}  // namespace mtscore
