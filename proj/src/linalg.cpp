#include "mtscore/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace mtscore {

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("spectral_norm: matrix must be square");
  if (m.rows() == 1) return std::abs(m(0, 0));
  if (m.rows() == 2) {
    const auto ev = sym2_eigenvalues(m);
    return std::max(std::abs(ev[0]), std::abs(ev[1]));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace mtscore
