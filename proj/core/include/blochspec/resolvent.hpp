// Fiberwise resolvent of the reduced selfadjoint generator K, spectral
// density scans (Lorentzian broadening) and the limiting-absorption
// stabilization diagnostics.
#pragma once

#include <vector>

#include "blochspec/dynamics.hpp"

namespace blochspec {

struct ResolventProbe {
  BlochField Z;
  double omega_lo = 0.0;
  double omega_hi = 0.0;
  std::vector<double> epsilons;  // strictly positive, descending
};

// Per point: sum_k (omega_k - omega - i eps)^{-1} P_k Z.  eps may carry
// either sign but not zero.
BlochField apply_resolvent(const BlochField& field, const SpectralSweep& sweep,
                           double omega, double eps);

// Im <Z, R_K(omega + i eps) Z> with the |Pi*|^{-1}-weighted grid pairing.
double resolvent_pairing_im(const BlochField& Z, const SpectralSweep& sweep,
                            double omega, double eps);

// |Pi*|^{-1} sum_j w_j sum_k eps / ((omega - omega_k)^2 + eps^2) |P_k Z_j|^2;
// nonnegative, integrates to pi * |Z|^2 over omega as eps -> 0.
double spectral_density(const BlochField& Z, const SpectralSweep& sweep,
                        double omega, double eps);

// Median spacing of the fiber eigenvalues that fall inside the window;
// the resolution floor for trustworthy eps.
double grid_level_spacing(const SpectralSweep& sweep, double omega_lo,
                          double omega_hi);

struct LapRow {
  double omega = 0.0;
  double eps = 0.0;
  double density = 0.0;
  double weighted_norm = 0.0;  // ||| R(omega+i eps) Z |||_alpha, box R
  bool trusted = false;        // eps >= 2 x grid level spacing
};

struct LapTable {
  std::vector<LapRow> rows;  // omega-major, then epsilons in given order
  double level_spacing = 0.0;
  double alpha = -4.0;
  int R = 0;
};

// For every omega sample and eps: density and the weighted norm of the
// inverted resolvent image.  Rows with eps below the resolution floor are
// flagged, not dropped.
LapTable lap_scan(const ResolventProbe& probe, const SpectralSweep& sweep,
                  double alpha, int R, int omega_samples = 200);

}  // namespace blochspec
