#include "mtscore/steering.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mtscore/errors.hpp"

namespace mtscore {

namespace {

constexpr double kPi = std::numbers::pi;

void check_geometry(const ArrayGeometry& geom) {
  if (geom.sensors < 2) throw std::invalid_argument("ArrayGeometry: need at least 2 sensors");
  if (!(geom.spacing_m > 0.0)) throw std::invalid_argument("ArrayGeometry: spacing must be positive");
  if (!(geom.wavelength_m > 0.0))
    throw std::invalid_argument("ArrayGeometry: wavelength must be positive");
}

void check_location(const LocationParam& theta) {
  if (!(theta.range_m > 0.0)) throw std::invalid_argument("LocationParam: range must be positive");
  if (!(std::abs(theta.bearing_rad) < 0.5 * kPi))
    throw std::invalid_argument("LocationParam: bearing must lie in (-pi/2, pi/2)");
}

}  // namespace

std::pair<double, double> fresnel_region(const ArrayGeometry& geom) {
  check_geometry(geom);
  const double aperture = geom.spacing_m * (geom.sensors - 1);
  const double r_min = 0.62 * std::sqrt(aperture * aperture * aperture / geom.wavelength_m);
  const double r_max = 2.0 * aperture * aperture / geom.wavelength_m;
  if (!(r_min < r_max))
    throw DegenerateRegion("fresnel_region: empty validity interval for this geometry");
  return {r_min, r_max};
}

bool in_fresnel_region(const LocationParam& theta, const ArrayGeometry& geom) {
  const auto [lo, hi] = fresnel_region(geom);
  return theta.range_m > lo && theta.range_m < hi;
}

ElectricalAngles electrical_angles(const LocationParam& theta, const ArrayGeometry& geom) {
  check_geometry(geom);
  check_location(theta);
  const double d = geom.spacing_m;
  const double lam = geom.wavelength_m;
  const double cosb = std::cos(theta.bearing_rad);
  ElectricalAngles e;
  e.omega_e = -2.0 * kPi * d * std::sin(theta.bearing_rad) / lam;
  e.phi_e = kPi * d * d * cosb * cosb / (lam * theta.range_m);
  return e;
}

Eigen::VectorXcd steering_vector(const LocationParam& theta, const ArrayGeometry& geom) {
  const ElectricalAngles e = electrical_angles(theta, geom);
  Eigen::VectorXcd a(geom.sensors);
  for (int k = 0; k < geom.sensors; ++k) {
    const double phase = e.omega_e * k + e.phi_e * k * k;
    a(k) = cplx(std::cos(phase), std::sin(phase));
  }
  return a;
}

SteeringDerivatives steering_derivatives(const LocationParam& theta, const ArrayGeometry& geom) {
  const Eigen::VectorXcd a = steering_vector(theta, geom);

  const double d = geom.spacing_m;
  const double lam = geom.wavelength_m;
  const double r = theta.range_m;
  const double b = theta.bearing_rad;
  const double cosb = std::cos(b);
  const double c = kPi * d * d / lam;  // common factor of the quadratic phase

  // Partials of the electrical angles in theta = (range, bearing).
  const double dw[2] = {0.0, -2.0 * kPi * d * cosb / lam};
  const double dphi[2] = {-c * cosb * cosb / (r * r), -c * std::sin(2.0 * b) / r};
  // Distinct second partials in the order rr, r-bearing, bearing-bearing.
  const double d2w[3] = {0.0, 0.0, 2.0 * kPi * d * std::sin(b) / lam};
  const double d2phi[3] = {2.0 * c * cosb * cosb / (r * r * r), c * std::sin(2.0 * b) / (r * r),
                           -2.0 * c * std::cos(2.0 * b) / r};

  const int p = geom.sensors;
  SteeringDerivatives out;
  out.first.resize(p, 2);
  out.second.resize(p, 3);
  for (int k = 0; k < p; ++k) {
    const double k2 = static_cast<double>(k) * k;
    const double g[2] = {k * dw[0] + k2 * dphi[0], k * dw[1] + k2 * dphi[1]};
    for (int i = 0; i < 2; ++i) out.first(k, i) = cplx(0.0, g[i]) * a(k);
    for (int i = 0; i < 2; ++i)
      for (int j = i; j < 2; ++j) {
        const int s = SteeringDerivatives::second_index(i, j);
        const double big_g = k * d2w[s] + k2 * d2phi[s];
        out.second(k, s) = (cplx(0.0, big_g) - g[i] * g[j]) * a(k);
      }
  }
  return out;
}

}  // namespace mtscore
