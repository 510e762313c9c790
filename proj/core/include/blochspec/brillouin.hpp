// Brillouin-zone band sweep: per-point fiber solves, continuity matching by
// eigenvector overlap, flat-band detection and finite-difference band
// derivatives for the stationary-point statistics.
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "blochspec/spectral.hpp"
#include "blochspec/theta_grid.hpp"

namespace blochspec {

struct BandSurface {
  std::shared_ptr<const ThetaGrid> grid;
  int N = 0;
  int D = 0;
  // bands(p, b): band b value at grid point p after continuity matching
  MatrixXd bands;
  // match_quality(p, b): |<v_b(prev), v_b(p)>| in [0,1]; 1 at the first point
  MatrixXd match_quality;
  // perm[p][b]: index into the |omega|-sorted eigenpairs at point p that
  // realizes surface band b
  std::vector<std::vector<int>> perm;
  // raw |omega|-sorted values per point (pre-matching)
  MatrixXd sorted_omegas;
  // pointwise branch trackers (NaN where the branch is absent).  As
  // extrema of branch functions they stay continuous even where matching
  // labels drift through near-degenerate regions.
  VectorXd qp_longitudinal;  // largest positive omega with (q,p) character
  VectorXd psi_lowest;       // smallest positive omega with psi character
  double quality_threshold = 0.5;

  bool crossing_flagged(std::size_t p, int b) const {
    return match_quality(p, b) < quality_threshold;
  }
};

struct SweepOptions {
  AssemblyOptions assembly;
  unsigned workers = 0;  // 0 = hardware concurrency
};

// Solves the fiber eigenproblem at every grid point and matches band indices
// between lexicographically-adjacent points by maximal eigenvector overlap.
// Eigenvectors are not retained.
BandSurface sweep_bands(const IonDensity& d, std::shared_ptr<const ThetaGrid> grid,
                        int N, const SweepOptions& opts = {});

struct FlatBandReport {
  std::vector<double> values;       // omega* per flat band, sorted by |omega*|
  std::vector<int> band_indices;    // surface band index
  std::vector<double> max_deviation;
  double flat_tol = 1e-6;
};

// A band is flat iff (max - min over the grid) < flat_tol * max(1, median|omega|).
FlatBandReport detect_flat_bands(const BandSurface& surface,
                                 double flat_tol = 1e-6);

struct BandDerivatives {
  MatrixXd grad;                  // P x 3 central differences
  std::vector<Matrix3d> hessians; // P entries
  std::vector<std::uint8_t> contaminated;  // stencil crossed a flagged point
  double degenerate_fraction = 0.0;  // |grad|<grad_tol and |det Hess|<hess_tol
  double max_grad_norm = 0.0;        // over uncontaminated stencils
  double grad_tol = 1e-4;
  double hess_tol = 1e-4;
  std::size_t contaminated_count = 0;
};

// Periodic central finite differences for grad/Hess of band k.  If a stencil
// spans a flagged crossing the call throws CrossingContamination unless
// skip_contaminated is set, in which case those points are excluded from the
// statistics and counted.
BandDerivatives band_derivatives(const BandSurface& surface, int band,
                                 double grad_tol = 1e-4,
                                 double hess_tol = 1e-4,
                                 bool skip_contaminated = false);

}  // namespace blochspec
