// Ion charge density in Fourier space and its structural conditions:
// charge normalization, Jellium zeros on the dual lattice, and the Wiener
// positivity matrix built from dual-lattice translates.
#pragma once

#include <string>
#include <vector>

#include "blochspec/errors.hpp"
#include "blochspec/theta_grid.hpp"
#include "blochspec/types.hpp"

namespace blochspec {

enum class DensityKind { SeparableProfile, IsotropicGaussian, Tabulated };

// Samples of sigma_hat on a uniform cube [-xi_max, xi_max]^3 with (2n+1)
// nodes per axis, lexicographic order; evaluated by trilinear interpolation
// and zero outside the cube.
struct TabulatedSamples {
  double xi_max = 0.0;
  int n = 0;
  std::vector<Complex> values;
};

class IonDensity {
 public:
  // sigma_hat_1(xi) = sin(xi/2)/xi * exp(-(a*xi)^2), scaled; a = gauss_width.
  // The sin factor puts exact zeros on 2pi*Z \ {0}, so the Jellium condition
  // holds for every width.
  static IonDensity separable_sinc_gauss(double e, double Z, double M_ion,
                                         double gauss_width = 1.0,
                                         double scale = 1.0,
                                         double decay_rate = 1.0);

  // sigma_hat(xi) = amplitude * exp(-width^2 |xi|^2 / 4).  Violates Jellium:
  // the standard negative control.
  static IonDensity isotropic_gaussian(double e, double Z, double M_ion,
                                       double width = 1.0,
                                       double amplitude = 1.0,
                                       double decay_rate = 1.0);

  static IonDensity tabulated(double e, double Z, double M_ion,
                              TabulatedSamples samples,
                              double decay_rate = 1.0);

  Complex sigma_hat(const Vec3& xi) const;

  // 1-D profile factor; valid for SeparableProfile and IsotropicGaussian
  // (both are componentwise products).
  double profile_1d(double xi) const;
  bool is_separable() const { return kind_ != DensityKind::Tabulated; }

  DensityKind kind() const { return kind_; }
  double e() const { return e_; }
  double Z() const { return Z_; }
  double M_ion() const { return M_ion_; }
  double decay_rate() const { return decay_rate_; }
  double gauss_width() const { return gauss_width_; }
  double scale() const { return scale_; }
  double amplitude() const { return amplitude_; }
  const TabulatedSamples& table() const { return table_; }

 private:
  IonDensity() = default;
  void validate_charge() const;

  DensityKind kind_ = DensityKind::SeparableProfile;
  double e_ = 1.0;
  double Z_ = 1.0;
  double M_ion_ = 1.0;
  double decay_rate_ = 1.0;
  double gauss_width_ = 1.0;  // SeparableProfile: a in exp(-(a xi)^2); Gaussian: width
  double scale_ = 1.0;
  double amplitude_ = 1.0;
  TabulatedSamples table_;
};

struct JelliumCheck {
  bool passed = false;
  Vec3i worst_m = Vec3i::Zero();
  double worst_abs = 0.0;
};

struct WienerReport {
  std::vector<Vec3> grid;
  std::vector<double> min_eig;
  bool passed = false;
  int truncation_radius = 0;
  bool empty_grid_warning = false;
};

// sigma_hat(0); throws NonPositiveCharge if <= 0.
double total_charge(const IonDensity& d);

// |sigma_hat(2pi m)| <= tol for all 0 < |m|_inf <= radius; reports argmax.
JelliumCheck check_jellium(const IonDensity& d, int radius, double tol);

// Sigma(theta) = sum_{|m|_inf<=radius} [xi (x) xi / |xi|^2 |sigma_hat(xi)|^2]
// at xi = 2pi m + theta.  Entries are real since the weights are |.|^2.
// Throws ThetaOnDualLattice within delta_min of the dual lattice and
// TruncationNotConverged if the last shell contributes more than
// last_shell_tol in Frobenius norm.
Matrix3d wiener_matrix(const IonDensity& d, const Vec3& theta, int radius,
                       double delta_min = default_delta_min,
                       double last_shell_tol = 1e-10);

// lambda_min of Sigma(theta_j) at every grid point; passed iff all > tol.
// Uses the extended-precision kernel (see hp_positivity.hpp): for strongly
// decaying densities the smallest eigenvalue sits far below the double
// rounding floor of the assembled 3x3 matrix.
WienerReport check_wiener(const IonDensity& d, const ThetaGrid& grid,
                          int radius, double tol,
                          double delta_min = default_delta_min);

// Same over an explicit point list; empty list passes vacuously with the
// warning flag set.
WienerReport check_wiener(const IonDensity& d, const std::vector<Vec3>& points,
                          int radius, double tol,
                          double delta_min = default_delta_min);

}  // namespace blochspec
