#pragma once

#include <Eigen/Dense>
#include <utility>

#include "mtscore/types.hpp"

namespace mtscore {

/// Range interval (r_min, r_max) in meters on which the quadratic-phase
/// near-field model of the array response is considered valid.
/// Throws DegenerateRegion when the interval is empty.
std::pair<double, double> fresnel_region(const ArrayGeometry& geom);

bool in_fresnel_region(const LocationParam& theta, const ArrayGeometry& geom);

/// Electrical angles of the quadratic-phase response: the k-th sensor sees
/// phase omega_e*k + phi_e*k^2, with
///   omega_e = -2 pi d sin(bearing) / wavelength
///   phi_e   =  pi d^2 cos^2(bearing) / (wavelength * range).
struct ElectricalAngles {
  double omega_e = 0.0;
  double phi_e = 0.0;
};

ElectricalAngles electrical_angles(const LocationParam& theta, const ArrayGeometry& geom);

/// Unit-modulus response vector a_k = exp(j (omega_e k + phi_e k^2)), k = 0..p-1.
Eigen::VectorXcd steering_vector(const LocationParam& theta, const ArrayGeometry& geom);

/// First and second partials of the response vector in theta = (range, bearing).
/// `first` columns are d/d(range), d/d(bearing); `second` columns are the
/// three distinct second partials in the order rr, r-bearing, bearing-bearing
/// (index with second_index(i, j) = i + j).
struct SteeringDerivatives {
  Eigen::MatrixXcd first;   // p x 2
  Eigen::MatrixXcd second;  // p x 3

  static int second_index(int i, int j) { return i + j; }
};

SteeringDerivatives steering_derivatives(const LocationParam& theta, const ArrayGeometry& geom);

}  // namespace mtscore
