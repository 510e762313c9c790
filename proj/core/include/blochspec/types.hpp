// Common scalar/vector aliases and dual-lattice geometry helpers.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

namespace blochspec {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Vec3i = Eigen::Vector3i;
using Eigen::Matrix3d;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::Vector3cd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double two_pi = 6.283185307179586476925286766559;

// Euclidean distance from theta to the dual lattice 2*pi*Z^3.
inline double dist_to_dual(const Vec3& theta) {
  double d2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double r = theta[i] - two_pi * std::round(theta[i] / two_pi);
    d2 += r * r;
  }
  return std::sqrt(d2);
}

// Componentwise wrap into (-pi, pi].
inline Vec3 wrap_to_centered(const Vec3& theta) {
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    double r = theta[i] - two_pi * std::round(theta[i] / two_pi);
    out[i] = r;
  }
  return out;
}

// Default guard distance from the dual lattice for singular fiber operators.
inline constexpr double default_delta_min = 1e-6;

}  // namespace blochspec
