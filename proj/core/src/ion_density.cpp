#include "blochspec/ion_density.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "blochspec/hp_positivity.hpp"
#include "blochspec/parallel.hpp"

namespace blochspec {

namespace {

double sinc_gauss_1d(double xi, double a) {
  // sin(xi/2)/xi with the removable singularity at 0 expanded.
  double s;
  if (std::abs(xi) < 1e-8) {
    const double u = 0.5 * xi;
    s = 0.5 * (1.0 - u * u / 6.0);
  } else {
    s = std::sin(0.5 * xi) / xi;
  }
  const double ax = a * xi;
  return s * std::exp(-ax * ax);
}

Complex interp_table(const TabulatedSamples& t, const Vec3& xi) {
  const int n = t.n;
  const double h = t.xi_max / n;
  double f[3];
  int i0[3];
  for (int k = 0; k < 3; ++k) {
    if (std::abs(xi[k]) >= t.xi_max) return Complex(0.0, 0.0);
    const double u = (xi[k] + t.xi_max) / h;  // in [0, 2n)
    i0[k] = static_cast<int>(u);
    if (i0[k] >= 2 * n) i0[k] = 2 * n - 1;
    f[k] = u - i0[k];
  }
  const int stride = 2 * n + 1;
  auto at = [&](int i, int j, int k) {
    return t.values[(static_cast<std::size_t>(i) * stride + j) * stride + k];
  };
  Complex acc(0.0, 0.0);
  for (int di = 0; di < 2; ++di)
    for (int dj = 0; dj < 2; ++dj)
      for (int dk = 0; dk < 2; ++dk) {
        const double w = (di ? f[0] : 1.0 - f[0]) * (dj ? f[1] : 1.0 - f[1]) *
                         (dk ? f[2] : 1.0 - f[2]);
        acc += w * at(i0[0] + di, i0[1] + dj, i0[2] + dk);
      }
  return acc;
}

}  // namespace

void IonDensity::validate_charge() const {
  const Complex c0 = sigma_hat(Vec3::Zero());
  if (std::abs(c0.imag()) > 1e-12 * std::max(1.0, std::abs(c0.real())) ||
      c0.real() <= 0.0) {
    std::ostringstream os;
    os << "ion density has non-positive total charge sigma_hat(0) = " << c0;
    throw NonPositiveCharge(os.str());
  }
  const double target = e_ * Z_;
  if (std::abs(c0.real() - target) > 1e-12 * std::abs(target)) {
    std::ostringstream os;
    os << "sigma_hat(0) = " << c0.real() << " does not match e*Z = " << target;
    throw ChargeMismatch(os.str());
  }
}

IonDensity IonDensity::separable_sinc_gauss(double e, double Z, double M_ion,
                                            double gauss_width, double scale,
                                            double decay_rate) {
  if (e <= 0 || Z <= 0 || M_ion <= 0)
    throw Error("IonDensity: e, Z, M_ion must be positive");
  IonDensity d;
  d.kind_ = DensityKind::SeparableProfile;
  d.e_ = e;
  d.Z_ = Z;
  d.M_ion_ = M_ion;
  d.gauss_width_ = gauss_width;
  d.scale_ = scale;
  d.decay_rate_ = decay_rate;
  d.validate_charge();
  return d;
}

IonDensity IonDensity::isotropic_gaussian(double e, double Z, double M_ion,
                                          double width, double amplitude,
                                          double decay_rate) {
  if (e <= 0 || Z <= 0 || M_ion <= 0)
    throw Error("IonDensity: e, Z, M_ion must be positive");
  IonDensity d;
  d.kind_ = DensityKind::IsotropicGaussian;
  d.e_ = e;
  d.Z_ = Z;
  d.M_ion_ = M_ion;
  d.gauss_width_ = width;
  d.amplitude_ = amplitude;
  d.decay_rate_ = decay_rate;
  d.validate_charge();
  return d;
}

IonDensity IonDensity::tabulated(double e, double Z, double M_ion,
                                 TabulatedSamples samples, double decay_rate) {
  if (e <= 0 || Z <= 0 || M_ion <= 0)
    throw Error("IonDensity: e, Z, M_ion must be positive");
  if (samples.n < 1 || samples.xi_max <= 0)
    throw Error("IonDensity: tabulated samples need n >= 1, xi_max > 0");
  const std::size_t expect = static_cast<std::size_t>(2 * samples.n + 1) *
                             (2 * samples.n + 1) * (2 * samples.n + 1);
  if (samples.values.size() != expect)
    throw Error("IonDensity: tabulated sample count mismatch");
  IonDensity d;
  d.kind_ = DensityKind::Tabulated;
  d.e_ = e;
  d.Z_ = Z;
  d.M_ion_ = M_ion;
  d.decay_rate_ = decay_rate;
  d.table_ = std::move(samples);
  d.validate_charge();
  return d;
}

double IonDensity::profile_1d(double xi) const {
  switch (kind_) {
    case DensityKind::SeparableProfile:
      return std::cbrt(scale_) * sinc_gauss_1d(xi, gauss_width_);
    case DensityKind::IsotropicGaussian: {
      const double w = gauss_width_;
      return std::cbrt(amplitude_) * std::exp(-0.25 * w * w * xi * xi);
    }
    case DensityKind::Tabulated:
      throw Error("profile_1d: tabulated densities are not separable");
  }
  return 0.0;
}

Complex IonDensity::sigma_hat(const Vec3& xi) const {
  switch (kind_) {
    case DensityKind::SeparableProfile:
      return Complex(scale_ * sinc_gauss_1d(xi[0], gauss_width_) *
                         sinc_gauss_1d(xi[1], gauss_width_) *
                         sinc_gauss_1d(xi[2], gauss_width_),
                     0.0);
    case DensityKind::IsotropicGaussian: {
      const double w = gauss_width_;
      return Complex(amplitude_ * std::exp(-0.25 * w * w * xi.squaredNorm()),
                     0.0);
    }
    case DensityKind::Tabulated:
      return interp_table(table_, xi);
  }
  return Complex(0.0, 0.0);
}

double total_charge(const IonDensity& d) {
  const Complex c0 = d.sigma_hat(Vec3::Zero());
  if (c0.real() <= 0.0) throw NonPositiveCharge("sigma_hat(0) <= 0");
  return c0.real();
}

JelliumCheck check_jellium(const IonDensity& d, int radius, double tol) {
  if (radius < 1) throw Error("check_jellium: radius must be >= 1");
  JelliumCheck out;
  out.passed = true;
  double best = -1.0;
  for (int m1 = -radius; m1 <= radius; ++m1)
    for (int m2 = -radius; m2 <= radius; ++m2)
      for (int m3 = -radius; m3 <= radius; ++m3) {
        if (m1 == 0 && m2 == 0 && m3 == 0) continue;
        const Vec3i m(m1, m2, m3);
        const double v =
            std::abs(d.sigma_hat(two_pi * m.cast<double>()));
        const bool lex_greater =
            m1 > out.worst_m[0] ||
            (m1 == out.worst_m[0] &&
             (m2 > out.worst_m[1] ||
              (m2 == out.worst_m[1] && m3 > out.worst_m[2])));
        if (v > best || (v == best && lex_greater)) {
          best = v;
          out.worst_m = m;
        }
      }
  out.worst_abs = best;
  out.passed = best <= tol;
  return out;
}

Matrix3d wiener_matrix(const IonDensity& d, const Vec3& theta, int radius,
                       double delta_min, double last_shell_tol) {
  if (radius < 1) throw Error("wiener_matrix: radius must be >= 1");
  if (dist_to_dual(theta) < delta_min)
    throw ThetaOnDualLattice("wiener_matrix: theta within delta_min of 2pi*Z^3");
  Matrix3d sum = Matrix3d::Zero();
  Matrix3d last_shell = Matrix3d::Zero();
  for (int m1 = -radius; m1 <= radius; ++m1)
    for (int m2 = -radius; m2 <= radius; ++m2)
      for (int m3 = -radius; m3 <= radius; ++m3) {
        const Vec3 xi = two_pi * Vec3(m1, m2, m3) + theta;
        const double n2 = xi.squaredNorm();
        const double w = std::norm(d.sigma_hat(xi));
        if (w == 0.0) continue;
        const Matrix3d term = (w / n2) * (xi * xi.transpose());
        sum += term;
        const int linf = std::max({std::abs(m1), std::abs(m2), std::abs(m3)});
        if (linf == radius) last_shell += term;
      }
  if (last_shell.norm() >= last_shell_tol) {
    std::ostringstream os;
    os << "wiener_matrix: last shell |m|_inf = " << radius
       << " contributes " << last_shell.norm() << " >= " << last_shell_tol;
    throw TruncationNotConverged(os.str());
  }
  return sum;
}

WienerReport check_wiener(const IonDensity& d, const ThetaGrid& grid,
                          int radius, double tol, double delta_min) {
  return check_wiener(d, grid.points(), radius, tol, delta_min);
}

WienerReport check_wiener(const IonDensity& d, const std::vector<Vec3>& points,
                          int radius, double tol, double delta_min) {
  WienerReport rep;
  rep.truncation_radius = radius;
  rep.grid = points;
  if (rep.grid.empty()) {
    rep.passed = true;
    rep.empty_grid_warning = true;
    return rep;
  }
  rep.min_eig.assign(rep.grid.size(), 0.0);
  // Truncation check once per report; the lattice tail is theta-uniform
  // at this tolerance.
  (void)wiener_matrix(d, rep.grid.front(), radius, delta_min);
  parallel_for(rep.grid.size(), default_worker_count(), [&](std::size_t i) {
    if (dist_to_dual(rep.grid[i]) < delta_min)
      throw ThetaOnDualLattice("check_wiener: grid point near 2pi*Z^3");
    rep.min_eig[i] = wiener_min_eig_hp(d, rep.grid[i], radius);
  });
  rep.passed = true;
  for (double v : rep.min_eig)
    if (!(v > tol)) rep.passed = false;
  return rep;
}

}  // namespace blochspec
