// Shared densities and independent oracles for the test suites.  Oracles
// deliberately re-derive values through separate code paths (long double
// scalar formulas, direct lattice summation) so they stay independent of
// the library implementation they check.
#pragma once

#include <cmath>
#include <random>

#include "blochspec/ion_density.hpp"

namespace testsup {

using namespace blochspec;

// The running example density: profile sin(xi/2)/xi * exp(-xi^2),
// total charge (1/2)^3 = e*Z with e = 1/8, Z = 1.
inline IonDensity example_density(double M_ion = 1.0) {
  return IonDensity::separable_sinc_gauss(0.125, 1.0, M_ion, 1.0);
}

// Same sinc structure with a softer Gaussian factor exp(-(xi/2)^2); keeps
// the exact Jellium zeros but has slower Fourier decay (better-conditioned
// phonon bands for dynamics experiments).
inline IonDensity soft_density(double M_ion = 1.0) {
  return IonDensity::separable_sinc_gauss(0.125, 1.0, M_ion, 0.5);
}

// Jellium-violating negative control.
inline IonDensity gaussian_density(double width = 1.0) {
  return IonDensity::isotropic_gaussian(1.0, 1.0, 1.0, width, 1.0);
}

// Constant sigma_hat = c on a wide cube (covers |xi|_inf <= xi_max).
inline IonDensity constant_table_density(double c, double e, double Z,
                                         double xi_max = 40.0, int n = 4) {
  TabulatedSamples t;
  t.xi_max = xi_max;
  t.n = n;
  const std::size_t count =
      static_cast<std::size_t>(2 * n + 1) * (2 * n + 1) * (2 * n + 1);
  t.values.assign(count, Complex(c, 0.0));
  return IonDensity::tabulated(e, Z, 1.0, std::move(t));
}

// sigma_hat supported only in a thin slab around the xi1 axis: the Wiener
// matrix vanishes identically at grid points whose transverse components
// exceed the slab half-width (rank-deficient Sigma).
inline IonDensity axis_slab_density() {
  const double xi_max = 20.0;
  const int n = 40;  // h = 0.5
  TabulatedSamples t;
  t.xi_max = xi_max;
  t.n = n;
  const int side = 2 * n + 1;
  t.values.assign(static_cast<std::size_t>(side) * side * side,
                  Complex(0.0, 0.0));
  for (int i = 0; i < side; ++i) {
    const double xi1 = -xi_max + i * (xi_max / n);
    // only the axis row (xi2 = xi3 = 0)
    t.values[(static_cast<std::size_t>(i) * side + n) * side + n] =
        Complex(0.125 * std::exp(-xi1 * xi1), 0.0);
  }
  return IonDensity::tabulated(0.125, 1.0, 1.0, std::move(t));
}

// Long-double scalar oracle for the example profile.
inline long double profile_oracle(long double xi, long double a = 1.0L) {
  if (std::abs(xi) < 1e-18L) return 0.5L * std::exp(-(a * xi) * (a * xi));
  return std::sin(xi / 2.0L) / xi * std::exp(-(a * xi) * (a * xi));
}

// Direct double-precision summation of the Wiener matrix, independent loop.
inline Matrix3d wiener_oracle(const IonDensity& d, const Vec3& theta,
                              int radius) {
  Matrix3d s = Matrix3d::Zero();
  for (int m1 = -radius; m1 <= radius; ++m1)
    for (int m2 = -radius; m2 <= radius; ++m2)
      for (int m3 = -radius; m3 <= radius; ++m3) {
        const Vec3 xi = two_pi * Vec3(m1, m2, m3) + theta;
        const double w = std::norm(d.sigma_hat(xi));
        if (w == 0.0) continue;
        s += (w / xi.squaredNorm()) * (xi * xi.transpose());
      }
  return s;
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline VectorXcd random_vector(int n, std::mt19937_64& gen, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = Complex(dist(gen), dist(gen));
  return v;
}

}  // namespace testsup
