#include <doctest.h>

#include <cmath>

#include "blochspec/spectral.hpp"
#include "test_support.hpp"

using namespace blochspec;
using namespace testsup;

TEST_SUITE_BEGIN("spectral");

TEST_CASE("sqrt_b: diagonal toy and square identity") {
  MatrixXcd Bm = MatrixXcd::Zero(2, 2);
  Bm(0, 0) = 4.0;
  Bm(1, 1) = 9.0;
  const SqrtB sq = sqrt_b(Bm);
  const MatrixXcd lam = sq.lambda();
  CHECK(std::abs(lam(0, 0) - 2.0) < 1e-14);
  CHECK(std::abs(lam(1, 1) - 3.0) < 1e-14);
  CHECK(std::abs(lam(0, 1)) < 1e-14);

  const IonDensity d = soft_density();
  const PlaneWaveBasis basis(1);
  const BlochOperatorSet ops = assemble_b(d, Vec3(0.9, 1.7, 2.3), basis);
  const SqrtB sq2 = sqrt_b(ops.Bmat);
  const MatrixXcd lam2 = sq2.lambda();
  const double bnorm = ops.Bmat.cwiseAbs().maxCoeff();
  CHECK((lam2 * lam2 - ops.Bmat).cwiseAbs().maxCoeff() < 1e-9 * bnorm);
}

TEST_CASE("sqrt_b: indefinite rejection and clamp band") {
  MatrixXcd ind = MatrixXcd::Zero(2, 2);
  ind(0, 0) = 1.0;
  ind(1, 1) = -1.0;
  CHECK_THROWS_AS(sqrt_b(ind), EnergyNotPositive);

  MatrixXcd nearpsd = MatrixXcd::Zero(2, 2);
  nearpsd(0, 0) = 1.0;
  nearpsd(1, 1) = -1e-12;
  const SqrtB sq = sqrt_b(nearpsd);
  CHECK(sq.clamped);
  CHECK(sq.lambda_min == doctest::Approx(-1e-12));
  CHECK(sq.sqrt_eigs.minCoeff() == 0.0);
}

TEST_CASE("kappa: gram identity and scaling") {
  const PlaneWaveBasis basis(1);
  const VectorXd w = x1_gram_diagonal(basis);
  MatrixXcd W = w.cast<Complex>().asDiagonal();
  CHECK(kappa(W, basis) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kappa((3.0 * W).eval(), basis) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("lambda inverse obeys the X1 bound from kappa") {
  // well-conditioned synthetic energy operator: Gram plus a random
  // Hermitian perturbation
  const PlaneWaveBasis basis(1);
  const int D = 2 * basis.size() + 6;
  auto gen = rng(3);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  MatrixXcd P = MatrixXcd::Zero(D, D);
  for (int i = 0; i < D; ++i)
    for (int j = 0; j <= i; ++j) {
      const Complex z(0.1 * uni(gen), 0.1 * uni(gen));
      P(i, j) = i == j ? Complex(std::abs(z.real()), 0) : z;
      P(j, i) = std::conj(P(i, j));
    }
  const VectorXd w = x1_gram_diagonal(basis);
  MatrixXcd Bm = MatrixXcd(w.cast<Complex>().asDiagonal()) + P;
  const double kap = kappa(Bm, basis);
  REQUIRE(kap > 0.0);
  const SqrtB sq = sqrt_b(Bm);
  for (int trial = 0; trial < 20; ++trial) {
    const VectorXcd z = random_vector(D, gen);
    const BlochState y(basis.size(), sq.apply_inv(z));
    const double x1 = std::sqrt(y.xs_norm_sq(basis, 1.0));
    CHECK(x1 <= std::sqrt(1.0 / kap) * z.norm() * (1.0 + 1e-9));
  }
}

TEST_CASE("build_k is Hermitian") {
  const IonDensity d = soft_density();
  const PlaneWaveBasis basis(1);
  const BlochOperatorSet ops = assemble_b(d, Vec3(0.9, 1.7, 2.3), basis);
  const SqrtB sq = sqrt_b(ops.Bmat);
  const MatrixXcd K = build_k(sq.lambda(), ops.B);
  const double knorm = K.cwiseAbs().maxCoeff();
  CHECK((K - K.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * knorm);
}

TEST_CASE("phonon sector: closed form at zero coupling") {
  const IonDensity d = soft_density(2.5);
  AssemblyOptions zc;
  zc.zero_coupling = true;
  const Vec3 theta(0.9, 1.7, 2.3);
  const FiberSolve fs = solve_fiber(d, theta, 1, zc);

  // oracle: +-sqrt(eig(T1)/M) on the 6-dim (q,p) sector
  const Eigen::Matrix3cd t1 = assemble_t1(d, theta, 8);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> est(t1);
  std::vector<double> expect;
  for (int i = 0; i < 3; ++i) {
    const double w = std::sqrt(est.eigenvalues()[i] / d.M_ion());
    expect.push_back(-w);
    expect.push_back(w);
  }
  std::sort(expect.begin(), expect.end());

  std::vector<double> got;
  for (Eigen::Index k = 0; k < fs.spectral.omegas.size(); ++k) {
    const double qp_w = fs.spectral.vectors.col(k).tail(6).squaredNorm();
    if (qp_w > 0.5) got.push_back(fs.spectral.omegas[k]);
  }
  REQUIRE(got.size() == 6);
  std::sort(got.begin(), got.end());
  for (int i = 0; i < 6; ++i) CHECK(std::abs(got[i] - expect[i]) < 1e-8);
}

TEST_CASE("phonon sector: frequencies vanish as M grows") {
  const IonDensity d = soft_density(1e12);
  AssemblyOptions zc;
  zc.zero_coupling = true;
  const FiberSolve fs = solve_fiber(d, Vec3(0.9, 1.7, 2.3), 1, zc);
  double max_qp = 0.0;
  for (Eigen::Index k = 0; k < fs.spectral.omegas.size(); ++k)
    if (fs.spectral.vectors.col(k).tail(6).squaredNorm() > 0.5)
      max_qp = std::max(max_qp, std::abs(fs.spectral.omegas[k]));
  CHECK(max_qp < 1e-5);
}

TEST_CASE("eig_k: 2x2 toy, ordering and phase convention") {
  MatrixXcd K = MatrixXcd::Zero(2, 2);
  K(0, 1) = 3.0;
  K(1, 0) = 3.0;
  const SpectralData sd = eig_k(K, Vec3::Zero());
  CHECK(sd.omegas[0] == doctest::Approx(-3.0).epsilon(1e-14));
  CHECK(sd.omegas[1] == doctest::Approx(3.0).epsilon(1e-14));
  // orthonormal, phase-fixed columns
  CHECK((sd.vectors.adjoint() * sd.vectors - MatrixXcd::Identity(2, 2))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  for (int k = 0; k < 2; ++k) {
    Eigen::Index imax;
    sd.vectors.col(k).cwiseAbs().maxCoeff(&imax);
    CHECK(sd.vectors.col(k)[imax].imag() == doctest::Approx(0.0));
    CHECK(sd.vectors.col(k)[imax].real() > 0.0);
  }
}

TEST_CASE("similarity: eig(J B) equals -i omega_k") {
  const IonDensity d = soft_density();
  const PlaneWaveBasis basis(1);
  const Vec3 theta(0.9, 1.7, 2.3);
  BlochOperatorSet ops = assemble_b(d, theta, basis);
  assemble_a(ops);
  const FiberSolve fs = solve_fiber(d, theta, 1);

  Eigen::ComplexEigenSolver<MatrixXcd> ces(ops.Amat);
  REQUIRE(ces.info() == Eigen::Success);
  VectorXcd expect(fs.spectral.omegas.size());
  for (Eigen::Index k = 0; k < expect.size(); ++k)
    expect[k] = Complex(0.0, -fs.spectral.omegas[k]);
  const double scale = fs.spectral.omegas.cwiseAbs().maxCoeff();
  CHECK(hausdorff_distance(ces.eigenvalues(), expect) < 1e-7 * scale);
}

TEST_CASE("dispersion relations never vanish on a shifted grid") {
  const IonDensity d = soft_density();
  const ThetaGrid grid(2);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const FiberSolve fs = solve_fiber(d, grid.point(p), 1);
    CHECK(fs.spectral.omegas.cwiseAbs().minCoeff() > 0.0);
  }
}

TEST_CASE("growth law on the free-spectrum toy") {
  // oracle: Weyl counting by direct sorting of 0.5|theta-2pi m|^2, each
  // value twice (psi1/psi2 pair)
  const PlaneWaveBasis basis(3);
  const Vec3 theta(M_PI, M_PI, M_PI);
  std::vector<double> vals;
  for (int i = 0; i < basis.size(); ++i) {
    const double h = 0.5 * basis.frequency(theta, i).squaredNorm();
    vals.push_back(h);
    vals.push_back(h);
  }
  std::sort(vals.begin(), vals.end());
  SpectralData sd;
  sd.omegas = Eigen::Map<VectorXd>(vals.data(), vals.size());
  const GrowthFit fit = growth_fit(sd, 20, 150);
  CHECK(fit.slope == doctest::Approx(0.6147).epsilon(2e-3));
  CHECK(fit.slope > 0.55);
  CHECK(fit.slope < 0.80);
  CHECK(fit.eps_empirical > 0.0);
  CHECK_FALSE(fit.flat_flag);
}

TEST_CASE("growth fit: degenerate ranges") {
  SpectralData sd;
  sd.omegas = VectorXd::Constant(600, 2.0);
  const GrowthFit fit = growth_fit(sd, 20, 150);
  CHECK(std::abs(fit.slope) < 1e-12);
  CHECK(fit.flat_flag);
  CHECK_THROWS_AS(growth_fit(sd, 20, 25), RangeTooSmall);
  CHECK_THROWS_AS(growth_fit(sd, 20, 400), RangeTooSmall);
}

TEST_CASE("propagator preserves the Euclidean norm") {
  const IonDensity d = soft_density();
  const FiberSolve fs = solve_fiber(d, Vec3(0.9, 1.7, 2.3), 1);
  auto gen = rng(5);
  const VectorXcd z =
      random_vector(static_cast<int>(fs.spectral.omegas.size()), gen);
  for (double t : {1.0, 10.0, 100.0}) {
    VectorXcd c = fs.spectral.vectors.adjoint() * z;
    for (Eigen::Index k = 0; k < c.size(); ++k)
      c[k] *= std::polar(1.0, -fs.spectral.omegas[k] * t);
    const VectorXcd zt = fs.spectral.vectors * c;
    CHECK(std::abs(zt.norm() - z.norm()) < 1e-10 * z.norm());
  }
}

TEST_CASE("energy-form identity |Lambda Y|^2 = <B Y, Y>") {
  const IonDensity d = example_density();
  const PlaneWaveBasis basis(1);
  const BlochOperatorSet ops = assemble_b(d, Vec3(0.9, 1.7, 2.3), basis);
  const SqrtB sq = sqrt_b(ops.Bmat);
  auto gen = rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const VectorXcd y = random_vector(ops.D, gen);
    const double lhs = energy_form(sq, y);
    const double rhs = std::real(y.dot(ops.Bmat * y));
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("theta-reflection spectrum defect is reported") {
  // truncation breaks the exact pairing Spec K(2pi-theta) = -Spec K(theta);
  // the defect is a diagnostic, not an enforced identity
  const IonDensity d = soft_density();
  const Vec3 theta(0.9, 1.7, 2.3);
  const Vec3 refl = Vec3(two_pi, two_pi, two_pi) - theta;
  const FiberSolve a = solve_fiber(d, theta, 2);
  const FiberSolve b = solve_fiber(d, refl, 2);
  VectorXcd sa(a.spectral.omegas.size()), sb(b.spectral.omegas.size());
  for (Eigen::Index k = 0; k < sa.size(); ++k) {
    sa[k] = Complex(a.spectral.omegas[k], 0.0);
    sb[k] = Complex(-b.spectral.omegas[k], 0.0);
  }
  const double defect = hausdorff_distance(sa, sb);
  const double scale = a.spectral.omegas.cwiseAbs().maxCoeff();
  MESSAGE("reflection defect = ", defect, " (scale ", scale, ")");
  CHECK(defect < 0.5 * scale);
}

TEST_SUITE_END();
