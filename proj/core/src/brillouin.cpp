#include "blochspec/brillouin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "blochspec/parallel.hpp"

namespace blochspec {

namespace {

// Greedy assignment maximizing eigenvector overlap between the previous
// matched frame and the current sorted frame.
void greedy_match(const MatrixXd& overlap, std::vector<int>& assign,
                  std::vector<double>& quality) {
  const int D = static_cast<int>(overlap.rows());
  assign.assign(D, -1);
  quality.assign(D, 0.0);
  std::vector<std::pair<double, int>> entries;
  entries.reserve(static_cast<std::size_t>(D) * D);
  for (int b = 0; b < D; ++b)
    for (int k = 0; k < D; ++k)
      entries.emplace_back(overlap(b, k), b * D + k);
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;  // deterministic tie-break
  });
  std::vector<char> row_used(D, 0), col_used(D, 0);
  int placed = 0;
  for (const auto& [val, code] : entries) {
    const int b = code / D, k = code % D;
    if (row_used[b] || col_used[k]) continue;
    assign[b] = k;
    quality[b] = val;
    row_used[b] = 1;
    col_used[k] = 1;
    if (++placed == D) break;
  }
}

}  // namespace

BandSurface sweep_bands(const IonDensity& d,
                        std::shared_ptr<const ThetaGrid> grid, int N,
                        const SweepOptions& opts) {
  const std::size_t P = grid->size();
  const PlaneWaveBasis basis(N);
  const int D = 2 * basis.size() + 6;

  BandSurface surf;
  surf.grid = grid;
  surf.N = N;
  surf.D = D;
  surf.bands.resize(P, D);
  surf.match_quality.resize(P, D);
  surf.sorted_omegas.resize(P, D);
  surf.qp_longitudinal =
      VectorXd::Constant(P, std::numeric_limits<double>::quiet_NaN());
  surf.psi_lowest =
      VectorXd::Constant(P, std::numeric_limits<double>::quiet_NaN());
  surf.perm.assign(P, std::vector<int>(D, 0));

  // Keep eigenvectors only as long as the sequential matching pass needs
  // them: solve in parallel chunks, then match chunk-by-chunk in order.
  const unsigned workers =
      opts.workers == 0 ? default_worker_count() : opts.workers;
  const std::size_t chunk = std::max<std::size_t>(workers * 4, 16);
  MatrixXcd prev_frame;  // matched eigenvector frame of the previous point

  std::vector<SpectralData> buffer;
  for (std::size_t base = 0; base < P; base += chunk) {
    const std::size_t count = std::min(chunk, P - base);
    buffer.assign(count, SpectralData{});
    parallel_for(count, workers, [&](std::size_t i) {
      const FiberSolve fs =
          solve_fiber(d, grid->point(base + i), N, opts.assembly, false);
      buffer[i] = fs.spectral;
    });
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t p = base + i;
      const SpectralData& sd = buffer[i];
      surf.sorted_omegas.row(p) = sd.omegas.transpose();
      const int kl = longitudinal_qp_index(sd);
      if (kl >= 0) surf.qp_longitudinal[p] = sd.omegas[kl];
      const int kp = lowest_psi_index(sd);
      if (kp >= 0) surf.psi_lowest[p] = sd.omegas[kp];
      if (p == 0) {
        for (int b = 0; b < D; ++b) {
          surf.perm[p][b] = b;
          surf.bands(p, b) = sd.omegas[b];
          surf.match_quality(p, b) = 1.0;
        }
        prev_frame = sd.vectors;
        continue;
      }
      const MatrixXd overlap =
          (prev_frame.adjoint() * sd.vectors).cwiseAbs();
      std::vector<int> assign;
      std::vector<double> quality;
      greedy_match(overlap, assign, quality);
      MatrixXcd frame(D, D);
      for (int b = 0; b < D; ++b) {
        surf.perm[p][b] = assign[b];
        surf.bands(p, b) = sd.omegas[assign[b]];
        surf.match_quality(p, b) = quality[b];
        frame.col(b) = sd.vectors.col(assign[b]);
      }
      prev_frame.swap(frame);
    }
  }
  return surf;
}

FlatBandReport detect_flat_bands(const BandSurface& surface, double flat_tol) {
  FlatBandReport rep;
  rep.flat_tol = flat_tol;
  const std::size_t P = surface.bands.rows();
  const int D = static_cast<int>(surface.bands.cols());
  std::vector<double> column(P);
  struct Entry {
    double value;
    int band;
    double dev;
  };
  std::vector<Entry> found;
  for (int b = 0; b < D; ++b) {
    for (std::size_t p = 0; p < P; ++p) column[p] = surface.bands(p, b);
    const auto [mn, mx] = std::minmax_element(column.begin(), column.end());
    std::vector<double> mags(P);
    for (std::size_t p = 0; p < P; ++p) mags[p] = std::abs(column[p]);
    std::nth_element(mags.begin(), mags.begin() + P / 2, mags.end());
    const double median = mags[P / 2];
    const double dev = *mx - *mn;
    if (dev < flat_tol * std::max(1.0, median)) {
      // omega* reported as the midrange value
      found.push_back({0.5 * (*mn + *mx), b, dev});
    }
  }
  std::sort(found.begin(), found.end(), [](const Entry& a, const Entry& b) {
    if (std::abs(a.value) != std::abs(b.value))
      return std::abs(a.value) < std::abs(b.value);
    return a.band < b.band;
  });
  for (const Entry& e : found) {
    rep.values.push_back(e.value);
    rep.band_indices.push_back(e.band);
    rep.max_deviation.push_back(e.dev);
  }
  return rep;
}

BandDerivatives band_derivatives(const BandSurface& surface, int band,
                                 double grad_tol, double hess_tol,
                                 bool skip_contaminated) {
  const ThetaGrid& grid = *surface.grid;
  const std::size_t P = grid.size();
  const double h = two_pi / grid.L();

  BandDerivatives out;
  out.grad_tol = grad_tol;
  out.hess_tol = hess_tol;
  out.grad.resize(P, 3);
  out.hessians.assign(P, Matrix3d::Zero());
  out.contaminated.assign(P, 0);

  auto flagged = [&](std::size_t p) {
    return surface.crossing_flagged(p, band);
  };

  std::size_t usable = 0, degenerate = 0;
  for (std::size_t p = 0; p < P; ++p) {
    bool bad = flagged(p);
    std::size_t nb[3][2];
    for (int ax = 0; ax < 3; ++ax) {
      nb[ax][0] = grid.neighbor_index(p, ax, +1);
      nb[ax][1] = grid.neighbor_index(p, ax, -1);
      bad = bad || flagged(nb[ax][0]) || flagged(nb[ax][1]);
    }
    // corner neighbors used by the mixed second differences
    std::size_t corner[3][3][4];
    for (int a = 0; a < 3; ++a)
      for (int b2 = a + 1; b2 < 3; ++b2) {
        const std::size_t pp = grid.neighbor_index(nb[a][0], b2, +1);
        const std::size_t pm = grid.neighbor_index(nb[a][0], b2, -1);
        const std::size_t mp = grid.neighbor_index(nb[a][1], b2, +1);
        const std::size_t mm = grid.neighbor_index(nb[a][1], b2, -1);
        corner[a][b2][0] = pp;
        corner[a][b2][1] = pm;
        corner[a][b2][2] = mp;
        corner[a][b2][3] = mm;
        bad = bad || flagged(pp) || flagged(pm) || flagged(mp) || flagged(mm);
      }
    if (bad) {
      out.contaminated[p] = 1;
      ++out.contaminated_count;
      if (!skip_contaminated) {
        std::ostringstream os;
        os << "band_derivatives: stencil at grid point " << p
           << " spans a flagged crossing on band " << band;
        throw CrossingContamination(os.str());
      }
      out.grad.row(p).setZero();
      continue;
    }
    const double w0 = surface.bands(p, band);
    Vec3 g;
    Matrix3d H;
    for (int ax = 0; ax < 3; ++ax) {
      const double wp = surface.bands(nb[ax][0], band);
      const double wm = surface.bands(nb[ax][1], band);
      g[ax] = (wp - wm) / (2.0 * h);
      H(ax, ax) = (wp - 2.0 * w0 + wm) / (h * h);
    }
    for (int a = 0; a < 3; ++a)
      for (int b2 = a + 1; b2 < 3; ++b2) {
        const double pp = surface.bands(corner[a][b2][0], band);
        const double pm = surface.bands(corner[a][b2][1], band);
        const double mp = surface.bands(corner[a][b2][2], band);
        const double mm = surface.bands(corner[a][b2][3], band);
        H(a, b2) = H(b2, a) = (pp - pm - mp + mm) / (4.0 * h * h);
      }
    out.grad.row(p) = g.transpose();
    out.hessians[p] = H;
    ++usable;
    out.max_grad_norm = std::max(out.max_grad_norm, g.norm());
    if (g.norm() < grad_tol && std::abs(H.determinant()) < hess_tol)
      ++degenerate;
  }
  out.degenerate_fraction =
      usable > 0 ? static_cast<double>(degenerate) / usable : 0.0;
  return out;
}

}  // namespace blochspec
