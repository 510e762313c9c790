// Square-root reduction of the fiber energy operator and the Hermitian
// eigenproblem for the dispersion relations.
//
// Lambda = B^{1/2} turns the non-selfadjoint Hamilton generator A = J B into
// the selfadjoint K = Lambda (iJ) Lambda; the eigenvalues omega_k(theta) of
// K are the dispersion relations, and eig(A) = { -i omega_k }.
#pragma once

#include "blochspec/bloch_assembly.hpp"

namespace blochspec {

struct SqrtB {
  MatrixXcd vectors;    // eigenvectors of B
  VectorXd eigs;        // eigenvalues, tiny negatives clamped to 0
  VectorXd sqrt_eigs;
  double lambda_min = 0.0;  // raw smallest eigenvalue of B
  bool clamped = false;     // some eigenvalue was clamped to 0

  MatrixXcd lambda() const;      // V diag(sqrt eig) V^H
  MatrixXcd lambda_inv() const;  // pseudo-inverse on clamped directions
  VectorXcd apply(const VectorXcd& x) const;
  VectorXcd apply_inv(const VectorXcd& x) const;
};

// Spectral square root; throws EnergyNotPositive when lambda_min(B) is below
// -tol_psd_rel * |B| (spectral norm).  Negative eigenvalues inside the
// tolerance band are clamped to zero and flagged.
SqrtB sqrt_b(const MatrixXcd& Bmat, double tol_psd_rel = 1e-8);

// Largest kappa with <B Y, Y> >= kappa |Y|_{X^1}^2 on the truncated space:
// lambda_min of W^{-1/2} B W^{-1/2} with W the diagonal X^1 Gram.
double kappa(const MatrixXcd& Bmat, const PlaneWaveBasis& basis);

// K = Lambda (iJ) Lambda; Hermitian since iJ is Hermitian.
MatrixXcd build_k(const MatrixXcd& lambda, int B);

struct SpectralData {
  Vec3 theta = Vec3::Zero();
  VectorXd omegas;    // sorted by |omega| ascending, ties by signed value
  MatrixXcd vectors;  // orthonormal columns, deterministic phase
  double lambda_min_B = 0.0;
  double kappa = 0.0;
};

// Full Hermitian eigendecomposition with the band ordering and phase fixing
// applied; residuals are verified to 1e-9 * |K|.
SpectralData eig_k(const MatrixXcd& K, const Vec3& theta,
                   double lambda_min_B = 0.0, double kappa_value = 0.0);

// Convenience: assemble, square-root, build K and diagonalize at one theta.
struct FiberSolve {
  BlochOperatorSet ops;
  SqrtB sqrtb;
  SpectralData spectral;
};
FiberSolve solve_fiber(const IonDensity& d, const Vec3& theta, int N,
                       const AssemblyOptions& opts = {},
                       bool want_kappa = false);

struct GrowthFit {
  double slope = 0.0;           // log|omega_k| vs log k least squares
  double log_prefactor = 0.0;
  double eps_empirical = 0.0;   // min_k |omega_k| / k^(2/3) over the range
  bool flat_flag = false;       // |slope| < 0.05
};

// Least-squares growth law over 1-based indices k in [k_lo, k_hi];
// requires k_hi <= D/2 and at least 10 points.
GrowthFit growth_fit(const SpectralData& sd, int k_lo, int k_hi);

// |Lambda y|^2 evaluated through the spectral factors.  Equals <B y, y>
// in exact arithmetic and stays well-conditioned when y carries amplified
// near-null components.
double energy_form(const SqrtB& sq, const VectorXcd& y);

// Index (into the |omega|-sorted eigenpairs) of the positive qp-dominant
// branch with the largest frequency: the longitudinal phonon.  Returns -1
// if no eigenvector has majority (q,p) weight with omega > 0.
int longitudinal_qp_index(const SpectralData& sd);

// Index of the lowest positive psi-dominant branch (the folded free
// electron band in the weak-coupling regime).  Returns -1 if absent.
int lowest_psi_index(const SpectralData& sd);

// Symmetric Hausdorff distance between two finite sets in C.
double hausdorff_distance(const VectorXcd& a, const VectorXcd& b);

}  // namespace blochspec
