#include "mtscore/surrogate.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mtscore/errors.hpp"

namespace mtscore {

ScoreIngredients score_ingredients(const Eigen::VectorXcd& x, const SteeringContext& ctx) {
  if (x.size() != ctx.a.size())
    throw std::invalid_argument("score_ingredients: snapshot dimension mismatch");

  const cplx c0 = x.dot(ctx.a);  // x^H a
  cplx cd[2], s[3];
  for (int i = 0; i < 2; ++i) cd[i] = x.dot(ctx.deriv.first.col(i));
  for (int k = 0; k < 3; ++k) s[k] = x.dot(ctx.deriv.second.col(k));
  const cplx a0 = std::conj(c0);  // a^H x

  ScoreIngredients out;
  for (int i = 0; i < 2; ++i) out.psi(i) = 2.0 * (a0 * cd[i]).real();
  for (int i = 0; i < 2; ++i)
    for (int j = i; j < 2; ++j) {
      const double v =
          2.0 * (std::conj(cd[j]) * cd[i] + a0 * s[SteeringDerivatives::second_index(i, j)]).real();
      out.gamma(i, j) = v;
      out.gamma(j, i) = v;
    }
  return out;
}

ScoreIngredients score_ingredients(const Eigen::VectorXcd& x, const LocationParam& theta,
                                   const ArrayGeometry& geom) {
  return score_ingredients(x, SteeringContext(theta, geom));
}

namespace {

// log det of a Hermitian positive definite matrix via its Cholesky factor.
// Throws NotPositiveDefinite if the factorization fails.
double logdet_pd(const Eigen::LLT<Eigen::MatrixXcd>& llt, const char* who) {
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite(std::string(who) + ": matrix is not positive definite");
  double ld = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) ld += std::log(l(i, i).real());
  return 2.0 * ld;
}

}  // namespace

double logdet_divergence(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw std::invalid_argument("logdet_divergence: dimension mismatch");
  const Eigen::Index q = a.rows();

  Eigen::LLT<Eigen::MatrixXcd> llt_b(b);
  const double logdet_b = logdet_pd(llt_b, "logdet_divergence (second argument)");
  Eigen::LLT<Eigen::MatrixXcd> llt_a(a);
  const double logdet_a = logdet_pd(llt_a, "logdet_divergence (first argument)");

  const double trace_ab = llt_b.solve(a).trace().real();
  return trace_ab - (logdet_a - logdet_b) - static_cast<double>(q);
}

double mtgqmle_objective(const MTMoments& moments, const LocationParam& candidate,
                         const ModelMoments& model) {
  const Eigen::VectorXcd mu = model.mean(candidate);
  const Eigen::MatrixXcd sigma = model.covariance(candidate);

  Eigen::LLT<Eigen::MatrixXcd> llt_sigma(sigma);
  const double logdet_sigma = logdet_pd(llt_sigma, "mtgqmle_objective (model covariance)");

  Eigen::LLT<Eigen::MatrixXcd> llt_cov(moments.cov);
  if (llt_cov.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  double logdet_cov = 0.0;
  const auto& l = llt_cov.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i) logdet_cov += 2.0 * std::log(l(i, i).real());

  const double trace_term = llt_sigma.solve(moments.cov).trace().real();
  const double div =
      trace_term - (logdet_cov - logdet_sigma) - static_cast<double>(moments.cov.rows());

  const Eigen::VectorXcd delta = moments.mean - mu;
  const double mahal = delta.dot(llt_sigma.solve(delta)).real();
  return -div - mahal;
}

double mtgqmle_objective(const SampleBatch& batch, const LocationParam& candidate,
                         const ModelMoments& model, const MTFunction& u) {
  return mtgqmle_objective(empirical_mt_moments(batch, u), candidate, model);
}

}  // namespace mtscore
