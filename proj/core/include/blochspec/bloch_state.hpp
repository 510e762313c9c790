// One fiber state (psi1, psi2, q, p) stored as a single complex vector of
// dimension D = 2B + 6 over the block layout [psi1 | psi2 | q | p].
#pragma once

#include "blochspec/errors.hpp"
#include "blochspec/plane_wave_basis.hpp"
#include "blochspec/types.hpp"

namespace blochspec {

class BlochState {
 public:
  explicit BlochState(int B) : B_(B), v_(VectorXcd::Zero(2 * B + 6)) {}
  BlochState(int B, VectorXcd v) : B_(B), v_(std::move(v)) {
    if (v_.size() != 2 * B_ + 6)
      throw Error("BlochState: dimension does not match basis");
  }

  int B() const { return B_; }
  int dim() const { return static_cast<int>(v_.size()); }

  VectorXcd& vector() { return v_; }
  const VectorXcd& vector() const { return v_; }

  auto psi1() { return v_.segment(0, B_); }
  auto psi2() { return v_.segment(B_, B_); }
  auto q() { return v_.segment(2 * B_, 3); }
  auto p() { return v_.segment(2 * B_ + 3, 3); }
  auto psi1() const { return v_.segment(0, B_); }
  auto psi2() const { return v_.segment(B_, B_); }
  auto q() const { return v_.segment(2 * B_, 3); }
  auto p() const { return v_.segment(2 * B_ + 3, 3); }

  // Plancherel: the X^0 norm is the plain Euclidean norm of the coefficients.
  double x0_norm_sq() const { return v_.squaredNorm(); }

  // X^s weights (1+|2pi m|^2)^s on the psi blocks, 1 on q and p.
  double xs_norm_sq(const PlaneWaveBasis& basis, double s) const {
    double acc = 0.0;
    for (int i = 0; i < B_; ++i) {
      const double w =
          std::pow(1.0 + two_pi * two_pi *
                             basis.mode(i).cast<double>().squaredNorm(),
                   s);
      acc += w * (std::norm(v_[i]) + std::norm(v_[B_ + i]));
    }
    acc += v_.segment(2 * B_, 6).squaredNorm();
    return acc;
  }

 private:
  int B_;
  VectorXcd v_;
};

// Diagonal of the X^1 Gram on the concatenated layout (psi weights
// 1+|2pi m|^2, unit weights on q,p).
inline VectorXd x1_gram_diagonal(const PlaneWaveBasis& basis) {
  const int B = basis.size();
  VectorXd w(2 * B + 6);
  for (int i = 0; i < B; ++i) {
    const double wi =
        1.0 + two_pi * two_pi * basis.mode(i).cast<double>().squaredNorm();
    w[i] = wi;
    w[B + i] = wi;
  }
  w.tail(6).setOnes();
  return w;
}

}  // namespace blochspec
