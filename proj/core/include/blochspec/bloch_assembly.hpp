// Assembly of the fiber operator blocks at one quasimomentum theta and of
// the block matrices B(theta) (Hermitian energy operator) and
// A(theta) = J B(theta) (Hamilton generator).
//
// Block layout over (psi1, psi2, q, p), D = 2B + 6:
//   B = [ 2H0 + 4e^2 Z G   0      2S    0      ]
//       [ 0                2H0    0     0      ]
//       [ 2S^H             0      T     0      ]
//       [ 0                0      0     M^-1 I ]
// with H0, G diagonal in the plane-wave basis and T the 3x3 ion block
// T1(theta) + T2 (T2 dropped when the Jellium condition is asserted).
#pragma once

#include <string>

#include "blochspec/bloch_state.hpp"
#include "blochspec/ion_density.hpp"
#include "blochspec/plane_wave_basis.hpp"

namespace blochspec {

struct AssemblyOptions {
  int radius = 8;              // lattice-sum truncation |m|_inf for T1/T2
  bool jellium = true;         // assert |T2|_F small and drop it
  bool zero_coupling = false;  // force e = 0 in S and the G coupling term
  double delta_min = default_delta_min;
  double last_shell_tol = 1e-10;
  double jellium_tol = 1e-10;
};

struct BlochOperatorSet {
  Vec3 theta = Vec3::Zero();
  int N = 0;
  int B = 0;
  int D = 0;
  VectorXd h0;          // H0 diagonal entries 0.5 |theta - 2pi m|^2
  VectorXd xi_norm_sq;  // |theta - 2pi m|^2 (inverse of the G multiplier)
  VectorXd g;           // G diagonal entries 1 / |theta - 2pi m|^2
  MatrixXcd S;          // B x 3
  Eigen::Matrix3cd T;
  MatrixXcd Bmat;  // D x D Hermitian
  MatrixXcd Amat;  // D x D, filled by assemble_a
  bool zero_coupling = false;
  double M_ion = 1.0;
};

// Fourier coefficients of the Bloch fiber of sigma at theta: coefficient at
// mode m is sigma_hat(theta - 2pi m).
VectorXcd zak_coefficients(const IonDensity& d, const Vec3& theta,
                           const PlaneWaveBasis& basis);

VectorXd assemble_h0(const Vec3& theta, const PlaneWaveBasis& basis);

// Diagonal multiplier of G(theta); largest entry is dist(theta, 2pi Z^3)^-2.
VectorXd assemble_g(const Vec3& theta, const PlaneWaveBasis& basis,
                    double delta_min = default_delta_min);

// S(theta) entry (m, j) = e sqrt(Z) * (-i (theta-2pi m)_j)
//                         * sigma_hat(theta-2pi m) / |theta-2pi m|^2.
MatrixXcd assemble_s(const IonDensity& d, const Vec3& theta,
                     const PlaneWaveBasis& basis,
                     double delta_min = default_delta_min,
                     bool zero_coupling = false);

// T1(theta): projector-weighted lattice sum at xi = 2pi m - theta.
Eigen::Matrix3cd assemble_t1(const IonDensity& d, const Vec3& theta, int radius,
                             double last_shell_tol = 1e-10);
// T2: the theta-independent counter term at xi = 2pi m, m != 0.
Eigen::Matrix3cd assemble_t2(const IonDensity& d, int radius,
                             double last_shell_tol = 1e-10);

// T1 + T2; with jellium=true asserts |T2|_F < jellium_tol and drops it.
Eigen::Matrix3cd assemble_t(const IonDensity& d, const Vec3& theta, int radius,
                            bool jellium, double last_shell_tol = 1e-10,
                            double jellium_tol = 1e-10);

// Builds all blocks and the Hermitian Bmat.  Amat is left empty.
BlochOperatorSet assemble_b(const IonDensity& d, const Vec3& theta,
                            const PlaneWaveBasis& basis,
                            const AssemblyOptions& opts = {});

// Amat = J * Bmat (exact block-row product); also returns it.
const MatrixXcd& assemble_a(BlochOperatorSet& ops);

// y = J x on the concatenated layout.
VectorXcd apply_j(const VectorXcd& x, int B);
// Dense J for oracles and cross-checks.
MatrixXd j_matrix(int B);

// Binary dump of Bmat: 32-byte header (magic "BLB1", uint16 N, uint16 D,
// 3 x float64 theta), then row-major complex128.
void write_blb1(const std::string& path, const BlochOperatorSet& ops);
BlochOperatorSet read_blb1(const std::string& path);

}  // namespace blochspec
