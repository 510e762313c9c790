// Shifted uniform quadrature grid on the Brillouin zone [0,2pi]^3.
//
// Points are theta_j = 2pi(j+1/2)/L componentwise, j in {0..L-1}^3, in
// lexicographic order over (j1,j2,j3).  The shift keeps every point at
// distance >= pi/L from the dual lattice, and the grid is closed under
// the reflection theta -> 2pi*(1,1,1) - theta.
#pragma once

#include <vector>

#include "blochspec/errors.hpp"
#include "blochspec/types.hpp"

namespace blochspec {

class ThetaGrid {
 public:
  explicit ThetaGrid(int L) : L_(L) {
    if (L < 2) throw Error("ThetaGrid: L must be >= 2");
    points_.reserve(static_cast<std::size_t>(L) * L * L);
    for (int j1 = 0; j1 < L; ++j1)
      for (int j2 = 0; j2 < L; ++j2)
        for (int j3 = 0; j3 < L; ++j3)
          points_.emplace_back(coord(j1), coord(j2), coord(j3));
  }

  int L() const { return L_; }
  std::size_t size() const { return points_.size(); }
  const Vec3& point(std::size_t i) const { return points_[i]; }
  const std::vector<Vec3>& points() const { return points_; }

  // Uniform quadrature weight; weights sum to |Pi*| = (2pi)^3.
  double weight() const {
    const double h = two_pi / L_;
    return h * h * h;
  }

  std::size_t flat_index(int j1, int j2, int j3) const {
    return (static_cast<std::size_t>(j1) * L_ + j2) * L_ + j3;
  }

  // Index of the reflected point 2pi*1 - theta_i (exact grid permutation).
  std::size_t reflect_index(std::size_t i) const {
    const int j3 = static_cast<int>(i) % L_;
    const int j2 = (static_cast<int>(i) / L_) % L_;
    const int j1 = static_cast<int>(i) / (L_ * L_);
    return flat_index(L_ - 1 - j1, L_ - 1 - j2, L_ - 1 - j3);
  }

  // Neighbor in +/- direction along axis with periodic wrap.
  std::size_t neighbor_index(std::size_t i, int axis, int step) const {
    int j[3];
    j[2] = static_cast<int>(i) % L_;
    j[1] = (static_cast<int>(i) / L_) % L_;
    j[0] = static_cast<int>(i) / (L_ * L_);
    j[axis] = ((j[axis] + step) % L_ + L_) % L_;
    return flat_index(j[0], j[1], j[2]);
  }

 private:
  double coord(int j) const { return two_pi * (j + 0.5) / L_; }

  int L_;
  std::vector<Vec3> points_;
};

inline ThetaGrid make_grid(int L) { return ThetaGrid(L); }

}  // namespace blochspec
