#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace mtscore {

using cplx = std::complex<double>;

/// A batch of N complex snapshots of common dimension p, stored column-wise.
struct SampleBatch {
  Eigen::MatrixXcd samples;  // p x N

  SampleBatch() = default;
  explicit SampleBatch(Eigen::MatrixXcd s) : samples(std::move(s)) {}

  static SampleBatch from_vectors(const std::vector<Eigen::VectorXcd>& xs) {
    if (xs.empty()) throw std::invalid_argument("SampleBatch: empty sample list");
    const Eigen::Index p = xs.front().size();
    Eigen::MatrixXcd m(p, static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i].size() != p)
        throw std::invalid_argument("SampleBatch: snapshots differ in dimension");
      m.col(static_cast<Eigen::Index>(i)) = xs[i];
    }
    return SampleBatch(std::move(m));
  }

  Eigen::Index dim() const { return samples.rows(); }
  Eigen::Index size() const { return samples.cols(); }
};

/// Source location parameter: range in meters, bearing in radians.
struct LocationParam {
  double range_m = 0.0;
  double bearing_rad = 0.0;
};

/// Uniform linear array: element count, spacing and carrier wavelength in meters.
struct ArrayGeometry {
  int sensors = 0;
  double spacing_m = 0.0;
  double wavelength_m = 0.0;
};

}  // namespace mtscore
