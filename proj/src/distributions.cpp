#include "mtscore/distributions.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mtscore/errors.hpp"
#include "mtscore/linalg.hpp"

namespace mtscore {

namespace {

// Regularized lower incomplete gamma P(a,x) by series expansion, valid and
// fast for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int i = 0; i < 10000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a,x) by continued fraction with
// modified Lentz iteration, for x >= a + 1.
double gamma_q_cf(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

}  // namespace

double chi2_sf(double x, int df) {
  if (df < 1) throw std::invalid_argument("chi2_sf: df must be >= 1");
  if (!(x >= 0.0)) throw std::invalid_argument("chi2_sf: x must be nonnegative");
  return gamma_q(0.5 * df, 0.5 * x);
}

double chi2_isf(double alpha, int df) {
  if (df < 1) throw std::invalid_argument("chi2_isf: df must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("chi2_isf: alpha must lie in (0, 1)");

  double hi = 1.0;
  while (chi2_sf(hi, df) > alpha) {
    hi *= 2.0;
    if (hi > 1e300) return std::numeric_limits<double>::infinity();
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(hi, 1.0); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (chi2_sf(mid, df) > alpha)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double noncentral_chi2_sf(double x, int df, double lambda) {
  if (df < 1) throw std::invalid_argument("noncentral_chi2_sf: df must be >= 1");
  if (!(x >= 0.0)) throw std::invalid_argument("noncentral_chi2_sf: x must be nonnegative");
  if (!(lambda >= 0.0)) throw std::invalid_argument("noncentral_chi2_sf: lambda must be >= 0");
  if (lambda == 0.0) return chi2_sf(x, df);
  if (x == 0.0) return 1.0;

  // Poisson(lambda/2) mixture of central tails with df + 2j degrees of
  // freedom, summed outward from the modal index so the first weight never
  // underflows even for large lambda.
  const double h = 0.5 * lambda;
  const long j0 = static_cast<long>(h);
  const double w0 = std::exp(j0 * std::log(h) - h - std::lgamma(j0 + 1.0));

  double sum = w0 * chi2_sf(x, df + 2 * static_cast<int>(j0));
  double mass = w0;
  double w_down = w0, w_up = w0;
  long j_down = j0, j_up = j0;
  while (mass < 1.0 - 1e-12 && j_up - j0 < 100000) {
    if (j_down > 0) {
      w_down *= j_down / h;
      --j_down;
      sum += w_down * chi2_sf(x, df + 2 * static_cast<int>(j_down));
      mass += w_down;
    }
    w_up *= h / (j_up + 1.0);
    ++j_up;
    sum += w_up * chi2_sf(x, df + 2 * static_cast<int>(j_up));
    mass += w_up;
  }
  return std::min(sum, 1.0);
}

double asymptotic_power(const Eigen::VectorXd& h, const Eigen::MatrixXd& r, int df, double alpha) {
  if (h.size() != r.rows() || r.rows() != r.cols())
    throw std::invalid_argument("asymptotic_power: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(r);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("asymptotic_power: covariance is not positive definite");
  const double lambda = h.dot(llt.solve(h));
  return noncentral_chi2_sf(chi2_isf(alpha, df), df, lambda);
}

double worst_case_power(double c, const Eigen::MatrixXd& r, int df, double alpha) {
  if (!(c >= 0.0)) throw std::invalid_argument("worst_case_power: c must be nonnegative");
  Eigen::LLT<Eigen::MatrixXd> llt(r);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("worst_case_power: covariance is not positive definite");
  const double lambda = c * c / spectral_norm(r);
  return noncentral_chi2_sf(chi2_isf(alpha, df), df, lambda);
}

Eigen::VectorXcd sample_complex_gaussian(std::mt19937_64& rng, int p, double variance) {
  if (p < 1) throw std::invalid_argument("sample_complex_gaussian: p must be >= 1");
  if (!(variance > 0.0))
    throw std::invalid_argument("sample_complex_gaussian: variance must be positive");
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * variance));
  Eigen::VectorXcd z(p);
  for (int i = 0; i < p; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    z(i) = cplx(re, im);
  }
  return z;
}

double sample_k_texture(std::mt19937_64& rng, double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("sample_k_texture: shape must be positive");
  std::gamma_distribution<double> gamma(shape, 1.0 / shape);
  return std::sqrt(gamma(rng));
}

cplx sample_bpsk(std::mt19937_64& rng, double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("sample_bpsk: variance must be positive");
  const double s = std::sqrt(variance);
  return (rng() & 1ULL) ? cplx(s, 0.0) : cplx(-s, 0.0);
}

}  // namespace mtscore
