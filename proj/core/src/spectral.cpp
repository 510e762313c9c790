#include "blochspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

namespace blochspec {

MatrixXcd SqrtB::lambda() const {
  return vectors * sqrt_eigs.asDiagonal() * vectors.adjoint();
}

MatrixXcd SqrtB::lambda_inv() const {
  VectorXd inv(sqrt_eigs.size());
  for (Eigen::Index i = 0; i < inv.size(); ++i)
    inv[i] = sqrt_eigs[i] > 0.0 ? 1.0 / sqrt_eigs[i] : 0.0;
  return vectors * inv.asDiagonal() * vectors.adjoint();
}

VectorXcd SqrtB::apply(const VectorXcd& x) const {
  return vectors * (sqrt_eigs.array() *
                    (vectors.adjoint() * x).array())
                       .matrix();
}

VectorXcd SqrtB::apply_inv(const VectorXcd& x) const {
  VectorXcd c = vectors.adjoint() * x;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    c[i] = sqrt_eigs[i] > 0.0 ? c[i] / sqrt_eigs[i] : Complex(0, 0);
  return vectors * c;
}

SqrtB sqrt_b(const MatrixXcd& Bmat, double tol_psd_rel) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(Bmat);
  if (es.info() != Eigen::Success)
    throw EigFailed("sqrt_b: eigensolver breakdown");
  SqrtB out;
  out.vectors = es.eigenvectors();
  out.eigs = es.eigenvalues();
  out.lambda_min = out.eigs.minCoeff();
  const double bnorm =
      std::max(std::abs(out.eigs.minCoeff()), std::abs(out.eigs.maxCoeff()));
  const double tol_psd = tol_psd_rel * bnorm;
  if (out.lambda_min < -tol_psd) {
    std::ostringstream os;
    os << "sqrt_b: lambda_min(B) = " << out.lambda_min << " < -" << tol_psd;
    throw EnergyNotPositive(os.str(), out.lambda_min);
  }
  out.sqrt_eigs.resize(out.eigs.size());
  for (Eigen::Index i = 0; i < out.eigs.size(); ++i) {
    if (out.eigs[i] < 0.0) {
      out.eigs[i] = 0.0;
      out.clamped = true;
    }
    out.sqrt_eigs[i] = std::sqrt(out.eigs[i]);
  }
  return out;
}

double kappa(const MatrixXcd& Bmat, const PlaneWaveBasis& basis) {
  const VectorXd w = x1_gram_diagonal(basis);
  if (w.size() != Bmat.rows()) throw Error("kappa: dimension mismatch");
  const VectorXd wantihalf = w.cwiseSqrt().cwiseInverse();
  MatrixXcd scaled = wantihalf.asDiagonal() * Bmat * wantihalf.asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(scaled,
                                              Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw EigFailed("kappa: eigensolver breakdown");
  return es.eigenvalues().minCoeff();
}

MatrixXcd build_k(const MatrixXcd& lambda, int B) {
  const Eigen::Index D = lambda.rows();
  if (D != 2 * B + 6) throw Error("build_k: dimension mismatch");
  // (iJ) * Lambda is an exact block-row combination, then one product.
  MatrixXcd jl(D, D);
  const Complex ih(0.0, 0.5);
  const Complex i1(0.0, 1.0);
  jl.topRows(B) = ih * lambda.middleRows(B, B);
  jl.middleRows(B, B) = -ih * lambda.topRows(B);
  jl.middleRows(2 * B, 3) = i1 * lambda.middleRows(2 * B + 3, 3);
  jl.middleRows(2 * B + 3, 3) = -i1 * lambda.middleRows(2 * B, 3);
  return lambda * jl;
}

SpectralData eig_k(const MatrixXcd& K, const Vec3& theta, double lambda_min_B,
                   double kappa_value) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(K);
  if (es.info() != Eigen::Success)
    throw EigFailed("eig_k: eigensolver breakdown");
  const Eigen::Index D = K.rows();
  const VectorXd& ev = es.eigenvalues();

  std::vector<Eigen::Index> order(D);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double aa = std::abs(ev[a]), ab = std::abs(ev[b]);
    if (aa != ab) return aa < ab;
    return ev[a] < ev[b];
  });

  SpectralData sd;
  sd.theta = theta;
  sd.lambda_min_B = lambda_min_B;
  sd.kappa = kappa_value;
  sd.omegas.resize(D);
  sd.vectors.resize(D, D);
  for (Eigen::Index k = 0; k < D; ++k) {
    sd.omegas[k] = ev[order[k]];
    VectorXcd col = es.eigenvectors().col(order[k]);
    // deterministic phase: largest-magnitude component made real positive
    Eigen::Index imax = 0;
    double amax = -1.0;
    for (Eigen::Index i = 0; i < D; ++i) {
      const double a = std::abs(col[i]);
      if (a > amax) {
        amax = a;
        imax = i;
      }
    }
    if (amax > 0.0) col *= std::conj(col[imax]) / amax;
    sd.vectors.col(k) = col;
  }

  const double knorm = sd.omegas.cwiseAbs().maxCoeff();
  const double resid_tol = 1e-9 * std::max(knorm, 1e-300);
  for (Eigen::Index k = 0; k < D; ++k) {
    const double r =
        (K * sd.vectors.col(k) - sd.omegas[k] * sd.vectors.col(k)).norm();
    if (r > resid_tol) {
      std::ostringstream os;
      os << "eig_k: residual " << r << " > " << resid_tol << " at band " << k;
      throw EigFailed(os.str());
    }
  }
  return sd;
}

FiberSolve solve_fiber(const IonDensity& d, const Vec3& theta, int N,
                       const AssemblyOptions& opts, bool want_kappa) {
  FiberSolve fs;
  const PlaneWaveBasis basis(N);
  fs.ops = assemble_b(d, theta, basis, opts);
  fs.sqrtb = sqrt_b(fs.ops.Bmat);
  const double kap = want_kappa ? kappa(fs.ops.Bmat, basis) : 0.0;
  const MatrixXcd K = build_k(fs.sqrtb.lambda(), fs.ops.B);
  fs.spectral = eig_k(K, theta, fs.sqrtb.lambda_min, kap);
  return fs;
}

GrowthFit growth_fit(const SpectralData& sd, int k_lo, int k_hi) {
  const int D = static_cast<int>(sd.omegas.size());
  if (k_lo < 1 || k_hi > D / 2)
    throw RangeTooSmall("growth_fit: range must satisfy 1 <= k_lo, k_hi <= D/2");
  const int n = k_hi - k_lo + 1;
  if (n < 10) throw RangeTooSmall("growth_fit: fewer than 10 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double eps = std::numeric_limits<double>::infinity();
  for (int k = k_lo; k <= k_hi; ++k) {
    const double w = std::abs(sd.omegas[k - 1]);
    const double x = std::log(static_cast<double>(k));
    const double y = std::log(std::max(w, 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    eps = std::min(eps, w / std::pow(static_cast<double>(k), 2.0 / 3.0));
  }
  GrowthFit fit;
  const double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.log_prefactor = (sy - fit.slope * sx) / n;
  fit.eps_empirical = eps;
  fit.flat_flag = std::abs(fit.slope) < 0.05;
  return fit;
}

double energy_form(const SqrtB& sq, const VectorXcd& y) {
  VectorXcd c = sq.vectors.adjoint() * y;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    acc += sq.eigs[i] * std::norm(c[i]);
  return acc;
}

int longitudinal_qp_index(const SpectralData& sd) {
  int kbest = -1;
  double wbest = -1.0;
  for (Eigen::Index k = 0; k < sd.omegas.size(); ++k) {
    const double qp_weight = sd.vectors.col(k).tail(6).squaredNorm();
    if (qp_weight > 0.5 && sd.omegas[k] > 0.0 && sd.omegas[k] > wbest) {
      wbest = sd.omegas[k];
      kbest = static_cast<int>(k);
    }
  }
  return kbest;
}

int lowest_psi_index(const SpectralData& sd) {
  int kbest = -1;
  double wbest = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < sd.omegas.size(); ++k) {
    const double qp_weight = sd.vectors.col(k).tail(6).squaredNorm();
    if (qp_weight <= 0.5 && sd.omegas[k] > 0.0 && sd.omegas[k] < wbest) {
      wbest = sd.omegas[k];
      kbest = static_cast<int>(k);
    }
  }
  return kbest;
}

double hausdorff_distance(const VectorXcd& a, const VectorXcd& b) {
  auto directed = [](const VectorXcd& u, const VectorXcd& v) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < v.size(); ++j)
        best = std::min(best, std::abs(u[i] - v[j]));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace blochspec
