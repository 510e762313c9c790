#include <doctest.h>

#include <cmath>

#include "blochspec/resolvent.hpp"
#include "test_support.hpp"

using namespace blochspec;
using namespace testsup;

namespace {

// single-eigenpair toy sweep on a 2-point grid (B = 0 is not representable;
// use D = 8 with identity frames and prescribed omegas)
SpectralSweep toy_sweep(std::shared_ptr<const ThetaGrid> grid,
                        const VectorXd& omegas) {
  SpectralSweep s;
  s.grid = grid;
  s.N = 1;
  SpectralData sd;
  sd.omegas = omegas;
  sd.vectors = MatrixXcd::Identity(omegas.size(), omegas.size());
  s.spectra.assign(grid->size(), sd);
  return s;
}

}  // namespace

TEST_SUITE_BEGIN("resolvent");

TEST_CASE("toy multiplier: omega=0, eps=1 on an eigenvalue at 2") {
  auto grid = std::make_shared<const ThetaGrid>(2);
  VectorXd om(8);
  om << 2, 3, 4, 5, 6, 7, 8, 9;
  const SpectralSweep sweep = toy_sweep(grid, om);
  BlochField z = zero_field(grid, 1);
  for (auto& v : z.values) {
    v.setZero();
    v[0] = 1.0;
  }
  const BlochField rz = apply_resolvent(z, sweep, 0.0, 1.0);
  // (2 - 0 - i)^(-1) = (2 + i)/5
  for (const auto& v : rz.values) {
    CHECK(std::abs(v[0] - Complex(0.4, 0.2)) < 1e-15);
    CHECK(v.tail(7).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(apply_resolvent(z, sweep, 0.0, 0.0), Error);
}

TEST_CASE("selfadjoint resolvent bound pointwise") {
  const IonDensity d = soft_density();
  auto grid = std::make_shared<const ThetaGrid>(2);
  const SpectralSweep sweep = compute_sweep(d, grid, 1);
  auto gen = rng(7);
  BlochField z = zero_field(grid, (sweep.spectra[0].vectors.rows() - 6) / 2);
  for (auto& v : z.values) v = random_vector(z.dim(), gen);

  const double omega = -50.0;  // far below the spectrum
  const double eps = 3.0;
  const BlochField rz = apply_resolvent(z, sweep, omega, eps);
  for (std::size_t p = 0; p < grid->size(); ++p) {
    double dist = 1e300;
    for (Eigen::Index k = 0; k < sweep.spectra[p].omegas.size(); ++k)
      dist = std::min(dist, std::abs(Complex(sweep.spectra[p].omegas[k], 0) -
                                     Complex(omega, eps)));
    CHECK(rz.values[p].norm() <= z.values[p].norm() / dist * (1 + 1e-12));
  }
}

TEST_CASE("residual identity against the explicit fiber operator") {
  const IonDensity d = soft_density();
  auto grid = std::make_shared<const ThetaGrid>(4);
  const SpectralSweep sweep = compute_sweep(d, grid, 2);
  auto gen = rng(19);
  BlochField z = zero_field(grid, (sweep.spectra[0].vectors.rows() - 6) / 2);
  for (auto& v : z.values) v = random_vector(z.dim(), gen);

  const double omega = 0.7, eps = 0.35;
  const BlochField rz = apply_resolvent(z, sweep, omega, eps);
  double worst = 0.0;
  for (std::size_t p = 0; p < grid->size(); p += 7) {
    const FiberSolve fs = solve_fiber(d, grid->point(p), 2);
    const MatrixXcd K = build_k(fs.sqrtb.lambda(), fs.ops.B);
    const VectorXcd resid =
        K * rz.values[p] - Complex(omega, eps) * rz.values[p] - z.values[p];
    worst = std::max(worst, resid.norm() / z.values[p].norm());
  }
  MESSAGE("max relative residual ", worst);
  CHECK(worst < 1e-9);
}

TEST_CASE("conjugate symmetry of the pairing is exact") {
  const IonDensity d = soft_density();
  auto grid = std::make_shared<const ThetaGrid>(2);
  const SpectralSweep sweep = compute_sweep(d, grid, 1);
  auto gen = rng(23);
  BlochField z = zero_field(grid, (sweep.spectra[0].vectors.rows() - 6) / 2);
  for (auto& v : z.values) v = random_vector(z.dim(), gen);
  for (double omega : {-0.5, 0.01, 0.9}) {
    const double up = resolvent_pairing_im(z, sweep, omega, 0.25);
    const double dn = resolvent_pairing_im(z, sweep, omega, -0.25);
    CHECK(std::abs(up + dn) <= 1e-12 * std::abs(up));
  }
}

TEST_CASE("first resolvent identity") {
  const IonDensity d = soft_density();
  auto grid = std::make_shared<const ThetaGrid>(2);
  const SpectralSweep sweep = compute_sweep(d, grid, 1);
  auto gen = rng(29);
  BlochField z = zero_field(grid, (sweep.spectra[0].vectors.rows() - 6) / 2);
  for (auto& v : z.values) v = random_vector(z.dim(), gen);

  const double w1 = 0.3, w2 = -0.8, eps = 0.5;
  const BlochField r1 = apply_resolvent(z, sweep, w1, eps);
  const BlochField r2 = apply_resolvent(z, sweep, w2, eps);
  const BlochField r12 = apply_resolvent(r2, sweep, w1, eps);
  for (std::size_t p = 0; p < grid->size(); ++p) {
    const VectorXcd lhs = r1.values[p] - r2.values[p];
    const VectorXcd rhs = (w1 - w2) * r12.values[p];
    CHECK((lhs - rhs).norm() < 1e-8 * std::max(1.0, lhs.norm()));
  }
}

TEST_CASE("spectral density: lorentzian peak, positivity, total mass") {
  auto grid = std::make_shared<const ThetaGrid>(2);
  VectorXd om(8);
  om << 5, 11, 12, 13, 14, 15, 16, 17;  // isolated flat value at 5
  const SpectralSweep sweep = toy_sweep(grid, om);
  BlochField z = zero_field(grid, 1);
  for (auto& v : z.values) {
    v.setZero();
    v[0] = 2.0;
  }
  const double eps = 0.01;
  // peak height |Z|^2-weighted: each point contributes |c|^2 / eps
  const double peak = spectral_density(z, sweep, 5.0, eps);
  CHECK(peak == doctest::Approx(4.0 / eps).epsilon(1e-6));
  CHECK(spectral_density(z, sweep, 5.3, eps) >= 0.0);
  CHECK_THROWS_AS(spectral_density(z, sweep, 5.0, -0.1), Error);

  // trapezoid total mass ~ pi |Z|^2 (grid-averaged)
  const double a = 5.0 - 120.0 * eps, b = 5.0 + 120.0 * eps;
  const int n = 4000;
  double mass = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = a + (b - a) * i / n;
    const double f = spectral_density(z, sweep, w, eps);
    mass += (i == 0 || i == n ? 0.5 : 1.0) * f;
  }
  mass *= (b - a) / n;
  CHECK(mass == doctest::Approx(M_PI * 4.0).epsilon(2e-2));
}

TEST_CASE("lap_scan: zero probe, flags, validation") {
  const IonDensity d = soft_density();
  auto grid = std::make_shared<const ThetaGrid>(2);
  const SpectralSweep sweep = compute_sweep(d, grid, 1);

  ResolventProbe probe;
  probe.Z = zero_field(grid, (sweep.spectra[0].vectors.rows() - 6) / 2);
  probe.omega_lo = 0.0;
  probe.omega_hi = 1.0;
  probe.epsilons = {0.5, 0.25};
  const LapTable table = lap_scan(probe, sweep, -4.0, 0, 5);
  CHECK(table.rows.size() == 10);
  for (const LapRow& r : table.rows) {
    CHECK(r.density == 0.0);
    CHECK(r.weighted_norm == 0.0);
  }
  // untrusted rows must be flagged, not dropped
  ResolventProbe fine = probe;
  fine.epsilons = {1e-12};
  const LapTable t2 = lap_scan(fine, sweep, -4.0, 0, 3);
  for (const LapRow& r : t2.rows) CHECK_FALSE(r.trusted);

  ResolventProbe bad = probe;
  bad.epsilons = {0.1, 0.5};
  CHECK_THROWS_AS(lap_scan(bad, sweep, -4.0, 0, 5), Error);
  bad.epsilons = {};
  CHECK_THROWS_AS(lap_scan(bad, sweep, -4.0, 0, 5), Error);
}

TEST_CASE("probes built by splitting have no flat-band component") {
  const IonDensity d = example_density();
  auto grid = std::make_shared<const ThetaGrid>(2);
  const SpectralSweep sweep = compute_sweep(d, grid, 2);

  FlatBandReport flat;
  flat.flat_tol = 1e-6;
  flat.values = {sweep.spectra[0].omegas[0]};
  flat.band_indices = {0};
  flat.max_deviation = {1e-7};

  auto gen = rng(41);
  BlochField z = zero_field(grid, (sweep.spectra[0].vectors.rows() - 6) / 2);
  for (auto& v : z.values) v = random_vector(z.dim(), gen);
  auto [dpart, cpart] = split_components(z, sweep, flat);

  // overlap of the continuous part with every selected flat column vanishes
  double worst = 0.0;
  for (std::size_t p = 0; p < grid->size(); ++p) {
    const SpectralData& sd = sweep.spectra[p];
    for (Eigen::Index k = 0; k < sd.omegas.size(); ++k) {
      const double tol = std::max(10.0 * flat.max_deviation[0],
                                  flat.flat_tol *
                                      std::max(1.0, std::abs(flat.values[0])));
      if (std::abs(sd.omegas[k] - flat.values[0]) <= tol)
        worst = std::max(worst,
                         std::abs(sd.vectors.col(k).dot(cpart.values[p])));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_SUITE_END();
