#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace mtscore {

/// Nonnegative reweighting function u(x) that defines the transformed measure.
///
/// Two families are supported:
///   gaussian: u(x) = scale * exp(-||x||^2 / width^2), bounded, and u(x)*||x||^2
///             bounded, which is what makes the downstream test B-robust;
///   constant: u(x) = scale, which reduces every transformed quantity to its
///             plain (untransformed) counterpart.
///
/// `scale` is a fixed positive factor c expressing c*u; all shipped statistics
/// are invariant to it and it defaults to 1.
class MTFunction {
public:
  enum class Kind { gaussian, constant };

  static MTFunction gaussian(double width, double scale = 1.0) {
    if (!(width > 0.0)) throw std::invalid_argument("MTFunction: width must be positive");
    return MTFunction(Kind::gaussian, width, scale);
  }

  static MTFunction constant(double scale = 1.0) {
    return MTFunction(Kind::constant, 0.0, scale);
  }

  Kind kind() const { return kind_; }
  double width() const { return width_; }
  double scale() const { return scale_; }

  /// log u(x) given the squared norm of x. -inf is a legal result (underflow
  /// of u itself); callers that form weight ratios work in log space.
  double log_weight_from_sqnorm(double sqnorm) const {
    const double base = (kind_ == Kind::gaussian) ? -sqnorm / (width_ * width_) : 0.0;
    return base + log_scale_;
  }

  double log_weight(const Eigen::VectorXcd& x) const {
    return log_weight_from_sqnorm(x.squaredNorm());
  }

  double operator()(const Eigen::VectorXcd& x) const {
    return std::exp(log_weight(x));
  }

private:
  MTFunction(Kind k, double width, double scale) : kind_(k), width_(width), scale_(scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("MTFunction: scale must be positive");
    log_scale_ = std::log(scale);
  }

  Kind kind_;
  double width_;
  double scale_;
  double log_scale_;
};

}  // namespace mtscore
