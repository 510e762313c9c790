#include "blochspec/hp_positivity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#if defined(__SIZEOF_FLOAT128__) && defined(__GNUC__)
#include <quadmath.h>
#define BLOCHSPEC_HAVE_QUAD 1
#else
#define BLOCHSPEC_HAVE_QUAD 0
#endif

namespace blochspec {

namespace {

#if BLOCHSPEC_HAVE_QUAD
using real_hp = __float128;
inline real_hp hp_sin(real_hp x) { return sinq(x); }
inline real_hp hp_exp(real_hp x) { return expq(x); }
inline real_hp hp_abs(real_hp x) { return fabsq(x); }
inline real_hp hp_sqrt(real_hp x) { return sqrtq(x); }
const real_hp hp_two_pi = 2 * M_PIq;
#else
using real_hp = long double;
inline real_hp hp_sin(real_hp x) { return sinl(x); }
inline real_hp hp_exp(real_hp x) { return expl(x); }
inline real_hp hp_abs(real_hp x) { return fabsl(x); }
inline real_hp hp_sqrt(real_hp x) { return sqrtl(x); }
const real_hp hp_two_pi = 6.283185307179586476925286766559L;
#endif

// Kahan-compensated accumulator; the lattice sums are dominated by a single
// term, so naive partial sums would round the transverse tail away.
struct KahanHp {
  real_hp s = 0;
  real_hp c = 0;
  void add(real_hp x) {
    const real_hp y = x - c;
    const real_hp t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

struct Sym3Hp {
  // packed symmetric accumulation: xx, yy, zz, xy, xz, yz
  std::array<KahanHp, 6> a;
  void add_outer(const real_hp xi[3], real_hp w) {
    a[0].add(w * xi[0] * xi[0]);
    a[1].add(w * xi[1] * xi[1]);
    a[2].add(w * xi[2] * xi[2]);
    a[3].add(w * xi[0] * xi[1]);
    a[4].add(w * xi[0] * xi[2]);
    a[5].add(w * xi[1] * xi[2]);
  }
  void to_matrix(real_hp m[3][3]) const {
    m[0][0] = a[0].s; m[1][1] = a[1].s; m[2][2] = a[2].s;
    m[0][1] = m[1][0] = a[3].s;
    m[0][2] = m[2][0] = a[4].s;
    m[1][2] = m[2][1] = a[5].s;
  }
};

// Cyclic Jacobi for a 3x3 symmetric matrix.
real_hp min_eig_sym3(real_hp m[3][3]) {
  for (int sweep = 0; sweep < 30; ++sweep) {
    real_hp off = hp_abs(m[0][1]) + hp_abs(m[0][2]) + hp_abs(m[1][2]);
    if (off == 0) break;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (m[p][q] == 0) continue;
        const real_hp theta = (m[q][q] - m[p][p]) / (2 * m[p][q]);
        const real_hp t =
            (theta >= 0 ? 1 : real_hp(-1)) /
            (hp_abs(theta) + hp_sqrt(theta * theta + 1));
        const real_hp c = 1 / hp_sqrt(t * t + 1);
        const real_hp s = t * c;
        for (int k = 0; k < 3; ++k) {
          const real_hp mkp = m[k][p], mkq = m[k][q];
          m[k][p] = c * mkp - s * mkq;
          m[k][q] = s * mkp + c * mkq;
        }
        for (int k = 0; k < 3; ++k) {
          const real_hp mpk = m[p][k], mqk = m[q][k];
          m[p][k] = c * mpk - s * mqk;
          m[q][k] = s * mpk + c * mqk;
        }
      }
  }
  real_hp lo = m[0][0];
  if (m[1][1] < lo) lo = m[1][1];
  if (m[2][2] < lo) lo = m[2][2];
  return lo;
}

real_hp profile_hp(const IonDensity& d, real_hp xi) {
  switch (d.kind()) {
    case DensityKind::SeparableProfile: {
      const real_hp a = d.gauss_width();
      real_hp s;
      if (hp_abs(xi) < real_hp(1e-20)) {
        const real_hp u = xi / 2;
        s = real_hp(0.5) * (1 - u * u / 6);
      } else {
        s = hp_sin(xi / 2) / xi;
      }
#if BLOCHSPEC_HAVE_QUAD
      const real_hp scale_cbrt = cbrtq(real_hp(d.scale()));
#else
      const real_hp scale_cbrt = cbrtl(static_cast<long double>(d.scale()));
#endif
      return scale_cbrt * s * hp_exp(-(a * xi) * (a * xi));
    }
    case DensityKind::IsotropicGaussian: {
      const real_hp w = d.gauss_width();
#if BLOCHSPEC_HAVE_QUAD
      const real_hp amp_cbrt = cbrtq(real_hp(d.amplitude()));
#else
      const real_hp amp_cbrt = cbrtl(static_cast<long double>(d.amplitude()));
#endif
      return amp_cbrt * hp_exp(-(w * w * xi * xi) / 4);
    }
    case DensityKind::Tabulated:
      // not separable; callers use the double path
      return 0;
  }
  return 0;
}

// Per-axis profile tables for separable densities; index m+radius.
std::array<std::vector<real_hp>, 3> axis_tables(const IonDensity& d,
                                                const Vec3& theta, int radius,
                                                bool t1_orientation) {
  std::array<std::vector<real_hp>, 3> tab;
  for (int ax = 0; ax < 3; ++ax) {
    tab[ax].resize(2 * radius + 1);
    for (int m = -radius; m <= radius; ++m) {
      // Wiener orientation uses xi = 2pi m + theta; T1 uses xi = 2pi m - theta.
      // Both sweeps cover the same xi set mirrored, kept explicit for clarity.
      const real_hp xi = t1_orientation
                             ? hp_two_pi * m - real_hp(theta[ax])
                             : hp_two_pi * m + real_hp(theta[ax]);
      tab[ax][m + radius] = profile_hp(d, xi);
    }
  }
  return tab;
}

void accumulate_projector_sum(const IonDensity& d, const Vec3& theta,
                              int radius, bool t1_orientation, Sym3Hp& acc) {
  if (d.is_separable()) {
    const auto tab = axis_tables(d, theta, radius, t1_orientation);
    for (int m1 = -radius; m1 <= radius; ++m1)
      for (int m2 = -radius; m2 <= radius; ++m2)
        for (int m3 = -radius; m3 <= radius; ++m3) {
          real_hp xi[3];
          for (int ax = 0; ax < 3; ++ax) {
            const int m = ax == 0 ? m1 : (ax == 1 ? m2 : m3);
            xi[ax] = t1_orientation ? hp_two_pi * m - real_hp(theta[ax])
                                    : hp_two_pi * m + real_hp(theta[ax]);
          }
          const real_hp s = tab[0][m1 + radius] * tab[1][m2 + radius] *
                            tab[2][m3 + radius];
          if (s == 0) continue;
          const real_hp n2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
          acc.add_outer(xi, s * s / n2);
        }
    return;
  }
  // Tabulated fallback: double evaluations, quad accumulation.
  for (int m1 = -radius; m1 <= radius; ++m1)
    for (int m2 = -radius; m2 <= radius; ++m2)
      for (int m3 = -radius; m3 <= radius; ++m3) {
        const Vec3 xv = t1_orientation
                            ? (two_pi * Vec3(m1, m2, m3) - theta).eval()
                            : (two_pi * Vec3(m1, m2, m3) + theta).eval();
        const double w = std::norm(d.sigma_hat(xv));
        if (w == 0.0) continue;
        real_hp xi[3] = {xv[0], xv[1], xv[2]};
        const real_hp n2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        acc.add_outer(xi, real_hp(w) / n2);
      }
}

}  // namespace

double wiener_min_eig_hp(const IonDensity& d, const Vec3& theta, int radius) {
  Sym3Hp acc;
  accumulate_projector_sum(d, theta, radius, /*t1_orientation=*/false, acc);
  real_hp m[3][3];
  acc.to_matrix(m);
  return static_cast<double>(min_eig_sym3(m));
}

PositivityCertificate verify_positivity(const IonDensity& d, const Vec3& theta,
                                        int N, int radius, bool zero_coupling) {
  PositivityCertificate cert;

  // psi/p diagonal blocks: 2H0 entries |xi|^2 and 2H0 + 4e^2 Z G entries
  // |xi|^2 + 4e^2 Z/|xi|^2 are positive iff no |xi| vanishes; M^{-1} > 0.
  double psi_min = std::numeric_limits<double>::infinity();
  for (int m1 = -N; m1 <= N; ++m1)
    for (int m2 = -N; m2 <= N; ++m2)
      for (int m3 = -N; m3 <= N; ++m3) {
        const Vec3 xi = theta - two_pi * Vec3(m1, m2, m3);
        psi_min = std::min(psi_min, xi.squaredNorm());
      }
  cert.psi_diag_min = psi_min;
  if (!(psi_min > 0.0)) return cert;

  // Ion Schur complement: T1(theta) - 4 e^2 Z sum_{|m|<=N} of
  //   xi (x) xi |sigma_hat(xi)|^2 / (|xi|^4 + 4 e^2 Z),  xi = theta - 2pi m,
  // where the denominator is |xi|^2 * A1(m) with A1 = |xi|^2 + 4e^2 Z/|xi|^2.
  Sym3Hp acc;
  accumulate_projector_sum(d, theta, radius, /*t1_orientation=*/true, acc);
  if (!zero_coupling) {
    const real_hp e2z = real_hp(4.0) * real_hp(d.e()) * real_hp(d.e()) *
                        real_hp(d.Z());
    for (int m1 = -N; m1 <= N; ++m1)
      for (int m2 = -N; m2 <= N; ++m2)
        for (int m3 = -N; m3 <= N; ++m3) {
          real_hp xi[3];
          const int mm[3] = {m1, m2, m3};
          for (int ax = 0; ax < 3; ++ax)
            xi[ax] = real_hp(theta[ax]) - hp_two_pi * mm[ax];
          real_hp s;
          if (d.is_separable()) {
            s = profile_hp(d, xi[0]) * profile_hp(d, xi[1]) *
                profile_hp(d, xi[2]);
          } else {
            const Vec3 xv = theta - two_pi * Vec3(m1, m2, m3);
            s = real_hp(std::abs(d.sigma_hat(xv)));
          }
          if (s == 0) continue;
          const real_hp n2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
          // weight -4e^2Z |sigma|^2 / (|xi|^6 + 4e^2Z |xi|^2)
          acc.add_outer(xi, -e2z * s * s / ((n2 * n2 + e2z) * n2));
        }
  }
  real_hp m[3][3];
  acc.to_matrix(m);
  cert.schur_min_eig = static_cast<double>(min_eig_sym3(m));
  cert.positive = cert.schur_min_eig > 0.0 && psi_min > 0.0;
  return cert;
}

}  // namespace blochspec
