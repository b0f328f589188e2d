#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

namespace mtscore {

/// Eigenvalues of a symmetric 2x2 matrix [[a,b],[b,c]], descending.
inline std::array<double, 2> sym2_eigenvalues(const Eigen::Matrix2d& m) {
  const double a = m(0, 0), b = m(0, 1), c = m(1, 1);
  const double mid = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), b);
  return {mid + rad, mid - rad};
}

/// Largest absolute eigenvalue of a symmetric matrix. Closed form for 2x2,
/// iterative symmetric eigensolver otherwise.
double spectral_norm(const Eigen::MatrixXd& m);

/// Ratio of largest to smallest absolute eigenvalue of a symmetric 2x2 matrix.
/// Returns +inf when the smallest is exactly zero.
inline double sym2_condition(const Eigen::Matrix2d& m) {
  const auto ev = sym2_eigenvalues(m);
  const double hi = std::max(std::abs(ev[0]), std::abs(ev[1]));
  const double lo = std::min(std::abs(ev[0]), std::abs(ev[1]));
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

inline Eigen::Matrix2d symmetrize(const Eigen::Matrix2d& m) {
  return 0.5 * (m + m.transpose());
}

}  // namespace mtscore
