// Truncated dual-lattice index set for torus functions.
//
// A periodic cell function is stored as coefficients c_m of exp(i 2pi m.y)
// over |m|_inf <= N, in lexicographic order over (m1,m2,m3).  The ordering
// is the contract for every matrix layout downstream.
#pragma once

#include <vector>

#include "blochspec/errors.hpp"
#include "blochspec/types.hpp"

namespace blochspec {

class PlaneWaveBasis {
 public:
  explicit PlaneWaveBasis(int N) : N_(N) {
    if (N < 1) throw Error("PlaneWaveBasis: N must be >= 1");
    const int side = 2 * N + 1;
    modes_.reserve(static_cast<std::size_t>(side) * side * side);
    for (int m1 = -N; m1 <= N; ++m1)
      for (int m2 = -N; m2 <= N; ++m2)
        for (int m3 = -N; m3 <= N; ++m3) modes_.emplace_back(m1, m2, m3);
  }

  int N() const { return N_; }
  int size() const { return static_cast<int>(modes_.size()); }
  const Vec3i& mode(int i) const { return modes_[i]; }
  const std::vector<Vec3i>& modes() const { return modes_; }

  bool contains(const Vec3i& m) const {
    return m.cwiseAbs().maxCoeff() <= N_;
  }

  int index_of(const Vec3i& m) const {
    const int side = 2 * N_ + 1;
    return ((m[0] + N_) * side + (m[1] + N_)) * side + (m[2] + N_);
  }

  // Frequency theta - 2pi m carried by basis element i in the fiber at theta.
  Vec3 frequency(const Vec3& theta, int i) const {
    return theta - two_pi * modes_[i].cast<double>();
  }

 private:
  int N_;
  std::vector<Vec3i> modes_;
};

}  // namespace blochspec
