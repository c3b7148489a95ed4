#pragma once

// Reference values computed independently of the library: adaptive
// tanh-sinh quadrature from Boost.Math and closed forms.

#include <cmath>
#include <functional>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

/// The standard bump exp(−1/(1 − x²)) on (−1, 1).
inline double bump(double x) {
  const double s = 1.0 - x * x;
  return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

inline double integrate(const std::function<double(double)>& f, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> rule;
  return rule.integrate([&f](double x) { return f(x); }, a, b);
}

/// Frozen values of ∫Φ and (∫Φ²)^{1/2} over (−1, 1), from 30-digit quadrature.
inline constexpr double kBumpIntegral = 0.443993816168079;
inline constexpr double kBumpL2 = 0.364809704976436;

}  // namespace oracle
