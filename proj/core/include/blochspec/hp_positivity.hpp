// Extended-precision positivity kernels.
//
// For densities with very fast Fourier decay the transverse eigenvalues of
// Sigma(theta) and of the ion-block Schur complement of B(theta) can sit
// 30+ decades below the matrix norm.  Double assembly then loses the sign;
// these kernels accumulate the lattice sums and solve the 3x3 eigenproblem
// in __float128 (long double fallback), which resolves the worst case of
// the shifted 8^3 grid with margin.
#pragma once

#include "blochspec/ion_density.hpp"
#include "blochspec/types.hpp"

namespace blochspec {

// lambda_min(Sigma(theta)) with quad-precision accumulation.
double wiener_min_eig_hp(const IonDensity& d, const Vec3& theta, int radius);

// Positivity certificate for the fiber energy operator B(theta) at plane-wave
// cutoff N.  B > 0 is reduced by congruence to positive diagonal psi/p blocks
// plus the 3x3 ion Schur complement  T1(theta) - 4 S^H A1^{-1} S  with
// A1 = 2 H0 + 4 e^2 Z G; the latter is evaluated in quad precision.
// kappa(theta) > 0 is equivalent (diagonal congruence by the X^1 Gram).
struct PositivityCertificate {
  bool positive = false;
  double schur_min_eig = 0.0;   // lambda_min of the ion Schur complement
  double psi_diag_min = 0.0;    // min over the psi/p diagonal entries
};

PositivityCertificate verify_positivity(const IonDensity& d, const Vec3& theta,
                                        int N, int radius,
                                        bool zero_coupling = false);

}  // namespace blochspec
