#include "blochspec/bloch_assembly.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace blochspec {

VectorXcd zak_coefficients(const IonDensity& d, const Vec3& theta,
                           const PlaneWaveBasis& basis) {
  const int B = basis.size();
  VectorXcd c(B);
  for (int i = 0; i < B; ++i) c[i] = d.sigma_hat(basis.frequency(theta, i));
  return c;
}

VectorXd assemble_h0(const Vec3& theta, const PlaneWaveBasis& basis) {
  const int B = basis.size();
  VectorXd h(B);
  for (int i = 0; i < B; ++i)
    h[i] = 0.5 * basis.frequency(theta, i).squaredNorm();
  return h;
}

VectorXd assemble_g(const Vec3& theta, const PlaneWaveBasis& basis,
                    double delta_min) {
  if (dist_to_dual(theta) < delta_min)
    throw ThetaOnDualLattice("assemble_g: theta within delta_min of 2pi*Z^3");
  const int B = basis.size();
  VectorXd g(B);
  for (int i = 0; i < B; ++i)
    g[i] = 1.0 / basis.frequency(theta, i).squaredNorm();
  return g;
}

MatrixXcd assemble_s(const IonDensity& d, const Vec3& theta,
                     const PlaneWaveBasis& basis, double delta_min,
                     bool zero_coupling) {
  if (dist_to_dual(theta) < delta_min)
    throw ThetaOnDualLattice("assemble_s: theta within delta_min of 2pi*Z^3");
  const int B = basis.size();
  MatrixXcd S = MatrixXcd::Zero(B, 3);
  if (zero_coupling) return S;
  const double coupling = d.e() * std::sqrt(d.Z());
  for (int i = 0; i < B; ++i) {
    const Vec3 xi = basis.frequency(theta, i);
    const Complex factor =
        coupling * d.sigma_hat(xi) / xi.squaredNorm();
    for (int j = 0; j < 3; ++j) S(i, j) = factor * Complex(0.0, -xi[j]);
  }
  return S;
}

namespace {

Eigen::Matrix3cd projector_sum(const IonDensity& d, const Vec3& offset,
                               int radius, bool skip_origin,
                               double last_shell_tol, const char* who) {
  if (radius < 1) throw Error(std::string(who) + ": radius must be >= 1");
  Matrix3d sum = Matrix3d::Zero();
  Matrix3d last = Matrix3d::Zero();
  for (int m1 = -radius; m1 <= radius; ++m1)
    for (int m2 = -radius; m2 <= radius; ++m2)
      for (int m3 = -radius; m3 <= radius; ++m3) {
        if (skip_origin && m1 == 0 && m2 == 0 && m3 == 0) continue;
        const Vec3 xi = two_pi * Vec3(m1, m2, m3) + offset;
        const double w = std::norm(d.sigma_hat(xi));
        if (w == 0.0) continue;
        const Matrix3d term = (w / xi.squaredNorm()) * (xi * xi.transpose());
        sum += term;
        if (std::max({std::abs(m1), std::abs(m2), std::abs(m3)}) == radius)
          last += term;
      }
  if (last.norm() >= last_shell_tol) {
    std::ostringstream os;
    os << who << ": last shell |m|_inf = " << radius << " contributes "
       << last.norm() << " >= " << last_shell_tol;
    throw TruncationNotConverged(os.str());
  }
  return sum.cast<Complex>();
}

}  // namespace

Eigen::Matrix3cd assemble_t1(const IonDensity& d, const Vec3& theta, int radius,
                             double last_shell_tol) {
  return projector_sum(d, -theta, radius, false, last_shell_tol, "assemble_t1");
}

Eigen::Matrix3cd assemble_t2(const IonDensity& d, int radius,
                             double last_shell_tol) {
  return -projector_sum(d, Vec3::Zero(), radius, true, last_shell_tol,
                        "assemble_t2");
}

Eigen::Matrix3cd assemble_t(const IonDensity& d, const Vec3& theta, int radius,
                            bool jellium, double last_shell_tol,
                            double jellium_tol) {
  const Eigen::Matrix3cd t1 = assemble_t1(d, theta, radius, last_shell_tol);
  const Eigen::Matrix3cd t2 = assemble_t2(d, radius, last_shell_tol);
  if (jellium) {
    if (t2.norm() > jellium_tol) {
      std::ostringstream os;
      os << "assemble_t: |T2|_F = " << t2.norm() << " > " << jellium_tol
         << " while the Jellium condition was asserted";
      throw JelliumViolation(os.str());
    }
    return t1;
  }
  return t1 + t2;
}

BlochOperatorSet assemble_b(const IonDensity& d, const Vec3& theta,
                            const PlaneWaveBasis& basis,
                            const AssemblyOptions& opts) {
  BlochOperatorSet ops;
  ops.theta = theta;
  ops.N = basis.N();
  ops.B = basis.size();
  ops.D = 2 * ops.B + 6;
  ops.zero_coupling = opts.zero_coupling;
  ops.M_ion = d.M_ion();

  ops.h0 = assemble_h0(theta, basis);
  ops.g = assemble_g(theta, basis, opts.delta_min);
  ops.xi_norm_sq = ops.g.cwiseInverse();
  ops.S = assemble_s(d, theta, basis, opts.delta_min, opts.zero_coupling);
  ops.T = assemble_t(d, theta, opts.radius, opts.jellium, opts.last_shell_tol,
                     opts.jellium_tol);

  const int B = ops.B;
  ops.Bmat = MatrixXcd::Zero(ops.D, ops.D);
  const double e2z =
      opts.zero_coupling ? 0.0 : 4.0 * d.e() * d.e() * d.Z();
  for (int i = 0; i < B; ++i) {
    ops.Bmat(i, i) = 2.0 * ops.h0[i] + e2z * ops.g[i];
    ops.Bmat(B + i, B + i) = 2.0 * ops.h0[i];
  }
  ops.Bmat.block(0, 2 * B, B, 3) = 2.0 * ops.S;
  ops.Bmat.block(2 * B, 0, 3, B) = 2.0 * ops.S.adjoint();
  ops.Bmat.block(2 * B, 2 * B, 3, 3) = ops.T;
  ops.Bmat.block(2 * B + 3, 2 * B + 3, 3, 3) =
      (1.0 / d.M_ion()) * Eigen::Matrix3cd::Identity();
  return ops;
}

const MatrixXcd& assemble_a(BlochOperatorSet& ops) {
  const int B = ops.B;
  const int D = ops.D;
  ops.Amat.resize(D, D);
  // J has single entries per row, so J*B is an exact block-row combination.
  ops.Amat.topRows(B) = 0.5 * ops.Bmat.middleRows(B, B);
  ops.Amat.middleRows(B, B) = -0.5 * ops.Bmat.topRows(B);
  ops.Amat.middleRows(2 * B, 3) = ops.Bmat.middleRows(2 * B + 3, 3);
  ops.Amat.middleRows(2 * B + 3, 3) = -ops.Bmat.middleRows(2 * B, 3);
  return ops.Amat;
}

VectorXcd apply_j(const VectorXcd& x, int B) {
  const int D = static_cast<int>(x.size());
  if (D != 2 * B + 6) throw Error("apply_j: dimension mismatch");
  VectorXcd y(D);
  y.segment(0, B) = 0.5 * x.segment(B, B);
  y.segment(B, B) = -0.5 * x.segment(0, B);
  y.segment(2 * B, 3) = x.segment(2 * B + 3, 3);
  y.segment(2 * B + 3, 3) = -x.segment(2 * B, 3);
  return y;
}

MatrixXd j_matrix(int B) {
  const int D = 2 * B + 6;
  MatrixXd J = MatrixXd::Zero(D, D);
  for (int i = 0; i < B; ++i) {
    J(i, B + i) = 0.5;
    J(B + i, i) = -0.5;
  }
  for (int i = 0; i < 3; ++i) {
    J(2 * B + i, 2 * B + 3 + i) = 1.0;
    J(2 * B + 3 + i, 2 * B + i) = -1.0;
  }
  return J;
}

void write_blb1(const std::string& path, const BlochOperatorSet& ops) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("write_blb1: cannot open " + path);
  char header[32] = {};
  std::memcpy(header, "BLB1", 4);
  const std::uint16_t n16 = static_cast<std::uint16_t>(ops.N);
  const std::uint16_t d16 = static_cast<std::uint16_t>(ops.D);
  std::memcpy(header + 4, &n16, 2);
  std::memcpy(header + 6, &d16, 2);
  double th[3] = {ops.theta[0], ops.theta[1], ops.theta[2]};
  std::memcpy(header + 8, th, 24);
  f.write(header, 32);
  // row-major complex128
  for (int i = 0; i < ops.D; ++i)
    for (int j = 0; j < ops.D; ++j) {
      const Complex z = ops.Bmat(i, j);
      const double re = z.real(), im = z.imag();
      f.write(reinterpret_cast<const char*>(&re), 8);
      f.write(reinterpret_cast<const char*>(&im), 8);
    }
  if (!f) throw Error("write_blb1: write failed for " + path);
}

BlochOperatorSet read_blb1(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("read_blb1: cannot open " + path);
  char header[32];
  f.read(header, 32);
  if (!f || std::memcmp(header, "BLB1", 4) != 0)
    throw Error("read_blb1: bad magic in " + path);
  std::uint16_t n16, d16;
  std::memcpy(&n16, header + 4, 2);
  std::memcpy(&d16, header + 6, 2);
  BlochOperatorSet ops;
  ops.N = n16;
  ops.D = d16;
  ops.B = (ops.D - 6) / 2;
  double th[3];
  std::memcpy(th, header + 8, 24);
  ops.theta = Vec3(th[0], th[1], th[2]);
  ops.Bmat.resize(ops.D, ops.D);
  for (int i = 0; i < ops.D; ++i)
    for (int j = 0; j < ops.D; ++j) {
      double re, im;
      f.read(reinterpret_cast<char*>(&re), 8);
      f.read(reinterpret_cast<char*>(&im), 8);
      ops.Bmat(i, j) = Complex(re, im);
    }
  if (!f) throw Error("read_blb1: truncated file " + path);
  return ops;
}

}  // namespace blochspec
