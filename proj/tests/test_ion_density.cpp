#include <doctest.h>

#include <cmath>

#include "blochspec/bloch_assembly.hpp"
#include "blochspec/hp_positivity.hpp"
#include "test_support.hpp"

using namespace blochspec;
using namespace testsup;

TEST_SUITE_BEGIN("ion_density");

TEST_CASE("total charge of the example density is (1/2)^3") {
  // oracle: numerical limit of the profile at xi -> 0, cubed
  const long double lim = profile_oracle(1e-8L);
  const long double oracle = lim * lim * lim;
  CHECK(std::abs(static_cast<double>(oracle) - 0.125) < 1e-9);

  const IonDensity d = example_density();
  CHECK(total_charge(d) == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("total charge: gaussian with amplitude 1 and tabulated linearity") {
  const IonDensity g = gaussian_density();
  CHECK(total_charge(g) == doctest::Approx(1.0).epsilon(1e-14));

  const IonDensity t1 = constant_table_density(0.125, 0.125, 1.0);
  const IonDensity t2 = constant_table_density(0.25, 0.25, 1.0);
  CHECK(total_charge(t2) == doctest::Approx(2.0 * total_charge(t1)).epsilon(1e-14));
}

TEST_CASE("construction rejects bad charges") {
  TabulatedSamples t;
  t.xi_max = 10.0;
  t.n = 1;
  t.values.assign(27, Complex(-1.0, 0.0));
  CHECK_THROWS_AS(IonDensity::tabulated(1.0, 1.0, 1.0, std::move(t)),
                  NonPositiveCharge);
  // sigma_hat(0) = 1 but e*Z = 2
  CHECK_THROWS_AS(IonDensity::isotropic_gaussian(2.0, 1.0, 1.0, 1.0, 1.0),
                  ChargeMismatch);
}

TEST_CASE("jellium: example passes at radius 5, gaussian fails at |m|=1") {
  const JelliumCheck ok = check_jellium(example_density(), 5, 1e-12);
  CHECK(ok.passed);

  const JelliumCheck bad = check_jellium(gaussian_density(), 1, 1e-12);
  CHECK_FALSE(bad.passed);
  CHECK(bad.worst_m == Vec3i(1, 0, 0));
  // oracle: sigma_hat(2pi e1) = exp(-pi^2), transverse factors are 1
  CHECK(bad.worst_abs ==
        doctest::Approx(std::exp(-M_PI * M_PI)).epsilon(1e-12));

  CHECK_THROWS_AS(check_jellium(example_density(), 0, 1e-12), Error);
}

TEST_CASE("wiener matrix: trace identity and PSD") {
  const IonDensity d = example_density();
  const Vec3 theta(0.9, 1.7, 2.3);
  const Matrix3d sigma = wiener_matrix(d, theta, 8);

  // trace Sigma = sum_m |sigma_hat(2pi m + theta)|^2 (rank-1 projector trace)
  double trace_oracle = 0.0;
  for (int m1 = -8; m1 <= 8; ++m1)
    for (int m2 = -8; m2 <= 8; ++m2)
      for (int m3 = -8; m3 <= 8; ++m3)
        trace_oracle +=
            std::norm(d.sigma_hat(two_pi * Vec3(m1, m2, m3) + theta));
  CHECK(sigma.trace() == doctest::Approx(trace_oracle).epsilon(1e-12));

  Eigen::SelfAdjointEigenSolver<Matrix3d> es(sigma);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  CHECK((sigma - sigma.transpose()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("wiener matrix: truncation tail and cross-check against T1") {
  const IonDensity d = example_density();
  const Vec3 theta(0.9, 1.7, 2.3);
  const Matrix3d s6 = wiener_matrix(d, theta, 6);
  const Matrix3d s12 = wiener_matrix(d, theta, 12);
  CHECK((s6 - s12).norm() < 1e-10);

  // m <-> -m resummation: Sigma(theta) equals T1(theta) for real sigma
  const Eigen::Matrix3cd t1 = assemble_t1(d, theta, 8);
  CHECK((s6.cast<Complex>() - t1).cwiseAbs().maxCoeff() < 1e-12);

  // independent double summation oracle
  CHECK((s6 - wiener_oracle(d, theta, 6)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("wiener matrix: reflection resummation identity") {
  const IonDensity d = example_density();
  const Vec3 theta(0.9, 1.7, 2.3);
  const Vec3 refl = Vec3(two_pi, two_pi, two_pi) - theta;
  const int r = 6;
  // Sigma(theta) over m in [-r, r]^3 equals the sum rebuilt with
  // m -> -m - (1,1,1) at the reflected point (oracle: direct summation)
  Matrix3d lhs = Matrix3d::Zero(), rhs = Matrix3d::Zero();
  for (int m1 = -r; m1 <= r; ++m1)
    for (int m2 = -r; m2 <= r; ++m2)
      for (int m3 = -r; m3 <= r; ++m3) {
        {
          const Vec3 xi = two_pi * Vec3(m1, m2, m3) + theta;
          lhs += (std::norm(d.sigma_hat(xi)) / xi.squaredNorm()) *
                 (xi * xi.transpose());
        }
        {
          const Vec3 xi =
              two_pi * Vec3(-m1 - 1, -m2 - 1, -m3 - 1) + refl;
          rhs += (std::norm(d.sigma_hat(xi)) / xi.squaredNorm()) *
                 (xi * xi.transpose());
        }
      }
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13 * std::max(1.0, lhs.norm()));
}

TEST_CASE("wiener matrix: theta guard and truncation error") {
  CHECK_THROWS_AS(wiener_matrix(example_density(), Vec3(1e-9, 0.0, 0.0), 4),
                  ThetaOnDualLattice);
  // slowly decaying Fourier tail: last shell still contributes at radius 8
  const IonDensity wide = IonDensity::isotropic_gaussian(1.0, 1.0, 1.0, 0.05);
  CHECK_THROWS_AS(wiener_matrix(wide, Vec3(0.9, 1.7, 2.3), 8),
                  TruncationNotConverged);
}

TEST_CASE("extended-precision min-eig matches the high-precision oracle") {
  // frozen from a 60-digit independent computation of lambda_min(Sigma)
  // at shifted 8^3 grid points, radius 8
  const IonDensity d = example_density();
  const double p0 = two_pi * 0.5 / 8.0;   // pi/8
  const double p3 = two_pi * 3.5 / 8.0;   // 7pi/8
  const double p4 = two_pi * 4.5 / 8.0;   // 9pi/8

  const double corner = wiener_min_eig_hp(d, Vec3(p0, p0, p0), 8);
  CHECK(corner == doctest::Approx(2.9582952e-35).epsilon(5e-2));
  const double mid = wiener_min_eig_hp(d, Vec3(p4, p4, p4), 8);
  CHECK(mid == doctest::Approx(1.8837904e-27).epsilon(1e-4));
  const double mixed = wiener_min_eig_hp(d, Vec3(p0, p3, p4), 8);
  CHECK(mixed == doctest::Approx(1.3551296e-22).epsilon(1e-5));
}

TEST_CASE("check_wiener: example density passes on a shifted grid") {
  const ThetaGrid grid(4);
  const WienerReport rep = check_wiener(example_density(), grid, 8, 0.0);
  CHECK(rep.passed);
  CHECK(rep.min_eig.size() == 64);
  for (double v : rep.min_eig) CHECK(v > 0.0);
}

TEST_CASE("check_wiener: axis-supported density is rank deficient") {
  const ThetaGrid grid(4);
  const WienerReport rep = check_wiener(axis_slab_density(), grid, 2, 0.0);
  CHECK_FALSE(rep.passed);
  bool some_zero = false;
  for (double v : rep.min_eig) some_zero = some_zero || v == 0.0;
  CHECK(some_zero);
}

TEST_CASE("check_wiener: empty grid passes vacuously with a warning") {
  const std::vector<Vec3> empty;
  const WienerReport rep = check_wiener(example_density(), empty, 8, 0.0);
  CHECK(rep.passed);
  CHECK(rep.empty_grid_warning);
}

TEST_SUITE_END();
