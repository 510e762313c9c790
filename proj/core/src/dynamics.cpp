#include "blochspec/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "blochspec/parallel.hpp"

namespace blochspec {

double BlochField::x0_grid_norm_sq() const {
  double acc = 0.0;
  for (const auto& v : values) acc += v.squaredNorm();
  const double L3 = static_cast<double>(grid->size());
  return acc / L3;
}

BlochField zero_field(std::shared_ptr<const ThetaGrid> grid, int B) {
  BlochField f;
  f.grid = std::move(grid);
  f.B = B;
  f.values.assign(f.grid->size(), VectorXcd::Zero(2 * B + 6));
  return f;
}

std::size_t CellField::index(const Vec3i& n) const {
  const int side = 2 * R + 1;
  return (static_cast<std::size_t>(n[0] + R) * side + (n[1] + R)) * side +
         (n[2] + R);
}

Vec3i CellField::site(std::size_t i) const {
  const int side = 2 * R + 1;
  const int n3 = static_cast<int>(i) % side - R;
  const int n2 = (static_cast<int>(i) / side) % side - R;
  const int n1 = static_cast<int>(i) / (side * side) - R;
  return Vec3i(n1, n2, n3);
}

double CellField::x0_norm_sq() const {
  double acc = 0.0;
  for (const auto& c : cells) acc += c.squaredNorm();
  return acc;
}

double CellField::imag_residual() const {
  // imaginary part of sum c_m e^{i 2pi m y} has coefficients
  // (c_m - conj(c_{-m})) / 2i; q,p must be real
  const int side_modes = static_cast<int>(std::round(std::cbrt(double(B))));
  const int N = (side_modes - 1) / 2;
  double acc = 0.0;
  for (const auto& c : cells) {
    for (int block = 0; block < 2; ++block) {
      const int off = block * B;
      for (int m1 = -N; m1 <= N; ++m1)
        for (int m2 = -N; m2 <= N; ++m2)
          for (int m3 = -N; m3 <= N; ++m3) {
            const int side = 2 * N + 1;
            const int i = ((m1 + N) * side + (m2 + N)) * side + (m3 + N);
            const int ineg = ((-m1 + N) * side + (-m2 + N)) * side + (-m3 + N);
            acc += 0.25 * std::norm(c[off + i] - std::conj(c[off + ineg]));
          }
    }
    for (int k = 0; k < 6; ++k) {
      const double im = c[2 * B + k].imag();
      acc += im * im;
    }
  }
  return std::sqrt(acc);
}

CellField zero_cell_field(int R, int B) {
  CellField f;
  f.R = R;
  f.B = B;
  const std::size_t count = static_cast<std::size_t>(2 * R + 1) * (2 * R + 1) *
                            (2 * R + 1);
  f.cells.assign(count, VectorXcd::Zero(2 * B + 6));
  return f;
}

BlochField bloch_forward(const CellField& cell,
                         std::shared_ptr<const ThetaGrid> grid) {
  // reject data touching the outermost shell: compact support in the box
  for (std::size_t i = 0; i < cell.cells.size(); ++i) {
    const Vec3i n = cell.site(i);
    if (n.cwiseAbs().maxCoeff() == cell.R && cell.R > 0 &&
        cell.cells[i].cwiseAbs().maxCoeff() > 0.0)
      throw BoxTooSmall("bloch_forward: support touches the box boundary");
  }
  BlochField out = zero_field(grid, cell.B);
  parallel_for(grid->size(), default_worker_count(), [&](std::size_t j) {
    const Vec3& th = grid->point(j);
    VectorXcd acc = VectorXcd::Zero(cell.dim());
    for (std::size_t i = 0; i < cell.cells.size(); ++i) {
      if (cell.cells[i].isZero(0)) continue;
      const Vec3i n = cell.site(i);
      const double phase = n[0] * th[0] + n[1] * th[1] + n[2] * th[2];
      acc += std::polar(1.0, phase) * cell.cells[i];
    }
    out.values[j] = acc;
  });
  return out;
}

CellField bloch_inverse(const BlochField& field, int R) {
  const int L = field.grid->L();
  if (4 * R > L) {
    std::ostringstream os;
    os << "bloch_inverse: box radius " << R << " > L/4 = " << L / 4.0
       << " aliases (cell data is L-periodic on the grid)";
    throw AliasingGuard(os.str());
  }
  CellField out = zero_cell_field(R, field.B);
  const double inv = 1.0 / static_cast<double>(field.grid->size());
  parallel_for(out.cells.size(), default_worker_count(), [&](std::size_t i) {
    const Vec3i n = out.site(i);
    VectorXcd acc = VectorXcd::Zero(field.dim());
    for (std::size_t j = 0; j < field.values.size(); ++j) {
      const Vec3& th = field.grid->point(j);
      const double phase = -(n[0] * th[0] + n[1] * th[1] + n[2] * th[2]);
      acc += std::polar(1.0, phase) * field.values[j];
    }
    out.cells[i] = inv * acc;
  });
  return out;
}

SpectralSweep compute_sweep(const IonDensity& d,
                            std::shared_ptr<const ThetaGrid> grid, int N,
                            const AssemblyOptions& opts, bool with_sqrtb,
                            unsigned workers) {
  SpectralSweep sweep;
  sweep.grid = grid;
  sweep.N = N;
  sweep.spectra.assign(grid->size(), SpectralData{});
  if (with_sqrtb) sweep.sqrts.assign(grid->size(), SqrtB{});
  if (workers == 0) workers = default_worker_count();
  parallel_for(grid->size(), workers, [&](std::size_t p) {
    FiberSolve fs = solve_fiber(d, grid->point(p), N, opts, false);
    sweep.spectra[p] = std::move(fs.spectral);
    if (with_sqrtb) sweep.sqrts[p] = std::move(fs.sqrtb);
  });
  return sweep;
}

namespace {

void check_same_grid(const BlochField& field, const SpectralSweep& sweep,
                     const char* who) {
  if (!field.grid || !sweep.grid || field.grid->L() != sweep.grid->L() ||
      field.values.size() != sweep.spectra.size())
    throw GaugeMismatch(std::string(who) + ": field/sweep grid mismatch");
}

VectorXcd evolve_point_z(const SpectralData& sd, const VectorXcd& z, double t) {
  VectorXcd c = sd.vectors.adjoint() * z;
  for (Eigen::Index k = 0; k < c.size(); ++k)
    c[k] *= std::polar(1.0, -sd.omegas[k] * t);
  return sd.vectors * c;
}

}  // namespace

BlochField evolve(const BlochField& field, const SpectralSweep& sweep, double t,
                  EvolveGauge gauge) {
  check_same_grid(field, sweep, "evolve");
  if (gauge == EvolveGauge::Y && sweep.sqrts.empty())
    throw GaugeMismatch("evolve: Y gauge requires square-root factors");
  BlochField out = field;
  parallel_for(field.values.size(), default_worker_count(), [&](std::size_t p) {
    if (gauge == EvolveGauge::Z) {
      out.values[p] = evolve_point_z(sweep.spectra[p], field.values[p], t);
    } else {
      const VectorXcd z0 = sweep.sqrts[p].apply(field.values[p]);
      const VectorXcd zt = evolve_point_z(sweep.spectra[p], z0, t);
      out.values[p] = sweep.sqrts[p].apply_inv(zt);
    }
  });
  return out;
}

namespace {

std::vector<int> flat_band_selection(const SpectralData& sd,
                                     const FlatBandReport& flat) {
  std::vector<int> sel;
  for (std::size_t f = 0; f < flat.values.size(); ++f) {
    const double w0 = flat.values[f];
    const double tol = std::max(10.0 * flat.max_deviation[f],
                                flat.flat_tol * std::max(1.0, std::abs(w0)));
    for (Eigen::Index k = 0; k < sd.omegas.size(); ++k)
      if (std::abs(sd.omegas[k] - w0) <= tol) sel.push_back(static_cast<int>(k));
  }
  std::sort(sel.begin(), sel.end());
  sel.erase(std::unique(sel.begin(), sel.end()), sel.end());
  return sel;
}

}  // namespace

std::pair<BlochField, BlochField> split_components(const BlochField& field,
                                                   const SpectralSweep& sweep,
                                                   const FlatBandReport& flat) {
  check_same_grid(field, sweep, "split_components");
  BlochField discrete = zero_field(field.grid, field.B);
  BlochField continuous = field;
  parallel_for(field.values.size(), default_worker_count(), [&](std::size_t p) {
    const SpectralData& sd = sweep.spectra[p];
    const std::vector<int> sel = flat_band_selection(sd, flat);
    VectorXcd dpart = VectorXcd::Zero(field.dim());
    for (int k : sel) {
      const Complex c = sd.vectors.col(k).dot(field.values[p]);
      dpart += c * sd.vectors.col(k);
    }
    discrete.values[p] = dpart;
    continuous.values[p] = field.values[p] - dpart;
  });
  return {std::move(discrete), std::move(continuous)};
}

double weighted_norm(const CellField& cell, const WeightedNormSpec& spec) {
  double acc = 0.0;
  for (std::size_t i = 0; i < cell.cells.size(); ++i) {
    const Vec3i n = cell.site(i);
    const double w =
        std::pow(1.0 + n.cast<double>().norm(), 2.0 * spec.alpha);
    acc += w * cell.cells[i].squaredNorm();
  }
  return std::sqrt(acc);
}

double smooth_window(const Vec3& theta, const Vec3& center, double width) {
  const Vec3 d = wrap_to_centered(theta - center);
  const double r2 = d.squaredNorm() / (width * width);
  if (r2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - r2));
}

BlochField band_initial_data(const SpectralSweep& sweep,
                             const BandSurface& surface,
                             const BandWindow& window) {
  if (sweep.spectra.empty())
    throw GaugeMismatch("band_initial_data: empty sweep");
  if (sweep.grid->L() != surface.grid->L())
    throw GaugeMismatch("band_initial_data: sweep/surface grid mismatch");
  BlochField out = zero_field(sweep.grid, (sweep.spectra.front().vectors.rows() - 6) / 2);
  for (std::size_t p = 0; p < sweep.spectra.size(); ++p) {
    const double chi =
        smooth_window(sweep.grid->point(p), window.center, window.width);
    if (chi == 0.0) continue;
    const int k = surface.perm[p][window.band];
    out.values[p] = (window.amplitude * chi) * sweep.spectra[p].vectors.col(k);
  }
  return out;
}

namespace {

int branch_index(const SpectralData& sd, AutoBranch branch) {
  return branch == AutoBranch::QpLongitudinal ? longitudinal_qp_index(sd)
                                              : lowest_psi_index(sd);
}

}  // namespace

BlochField pointwise_band_initial_data(const SpectralSweep& sweep,
                                       const BandWindow& window) {
  if (sweep.spectra.empty())
    throw GaugeMismatch("pointwise_band_initial_data: empty sweep");
  BlochField out = zero_field(sweep.grid, (sweep.spectra.front().vectors.rows() - 6) / 2);
  for (std::size_t p = 0; p < sweep.spectra.size(); ++p) {
    const double chi =
        smooth_window(sweep.grid->point(p), window.center, window.width);
    if (chi == 0.0) continue;
    const int k = branch_index(sweep.spectra[p], window.branch);
    if (k < 0)
      throw Error("pointwise_band_initial_data: branch absent in window");
    out.values[p] = (window.amplitude * chi) * sweep.spectra[p].vectors.col(k);
  }
  return out;
}

DecayTable decay_curve(const BlochField& initial, const SpectralSweep& sweep,
                       const FlatBandReport& flat,
                       const std::vector<double>& times, double alpha, int R,
                       double t_max) {
  DecayTable table;
  table.t_max = t_max;
  table.alpha = alpha;
  table.R = R;
  const WeightedNormSpec wspec{alpha};
  for (double t : times) {
    const BlochField zt = evolve(initial, sweep, t, EvolveGauge::Z);
    auto [dpart, cpart] = split_components(zt, sweep, flat);
    DecayRow row;
    row.t = t;
    row.discrete_norm = std::sqrt(dpart.x0_grid_norm_sq());
    row.continuous_x0 = std::sqrt(cpart.x0_grid_norm_sq());
    row.continuous_weighted = weighted_norm(bloch_inverse(cpart, R), wspec);
    row.beyond_horizon = t > t_max;
    table.rows.push_back(row);
  }
  return table;
}

DecayTable run_decay_pipeline(const IonDensity& d, int N, int L,
                              const BandWindow& window,
                              const std::vector<double>& times, double alpha,
                              int R, const DecayPipelineOptions& opts) {
  auto grid = std::make_shared<const ThetaGrid>(L);
  if (4 * R > L) throw AliasingGuard("run_decay_pipeline: R > L/4");
  const unsigned workers =
      opts.workers == 0 ? default_worker_count() : opts.workers;

  SweepOptions sopts;
  sopts.assembly = opts.assembly;
  sopts.workers = workers;
  const BandSurface surface = sweep_bands(d, grid, N, sopts);
  const FlatBandReport flat = detect_flat_bands(surface, opts.flat_tol);

  const bool auto_band = window.band < 0;
  int band = window.band;
  if (auto_band) {
    // pointwise branch mode; report the matched surface index at the grid
    // point nearest the window center for reference
    std::size_t pc = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < grid->size(); ++p) {
      const double dist =
          wrap_to_centered(grid->point(p) - window.center).norm();
      if (dist < best) {
        best = dist;
        pc = p;
      }
    }
    const FiberSolve fs = solve_fiber(d, grid->point(pc), N, opts.assembly);
    const int kbest = branch_index(fs.spectral, window.branch);
    if (kbest < 0)
      throw Error("run_decay_pipeline: selected branch absent at the window");
    for (int b = 0; b < surface.D; ++b)
      if (surface.perm[pc][b] == kbest) {
        band = b;
        break;
      }
  }

  // group-speed horizon: in auto mode the finite differences run on the
  // pointwise branch values (continuous across label drift); an explicit
  // band index uses its matched surface
  double vmax = 0.0;
  if (auto_band) {
    const VectorXd& track = window.branch == AutoBranch::QpLongitudinal
                                ? surface.qp_longitudinal
                                : surface.psi_lowest;
    const double h = two_pi / L;
    for (std::size_t p = 0; p < grid->size(); ++p) {
      Vec3 g;
      bool ok = true;
      for (int ax = 0; ax < 3; ++ax) {
        const double wp = track[grid->neighbor_index(p, ax, +1)];
        const double wm = track[grid->neighbor_index(p, ax, -1)];
        if (!std::isfinite(wp) || !std::isfinite(wm)) ok = false;
        g[ax] = (wp - wm) / (2.0 * h);
      }
      if (ok) vmax = std::max(vmax, g.norm());
    }
  } else {
    BandDerivatives derivs = band_derivatives(surface, band, 1e-4, 1e-4,
                                              /*skip_contaminated=*/true);
    vmax = derivs.max_grad_norm;
  }
  const double t_max = vmax > 0.0
                           ? opts.c_horizon * L / vmax
                           : std::numeric_limits<double>::infinity();
  std::vector<double> abs_times = times;
  if (opts.times_in_horizon_units) {
    if (!std::isfinite(t_max))
      throw Error("run_decay_pipeline: horizon-relative times on a flat band");
    for (double& t : abs_times) t *= t_max;
  }

  // streaming pass over window-support points only
  struct PointData {
    std::size_t p = 0;
    double omega = 0.0;
    bool is_flat = false;
    VectorXcd z0;
  };
  std::vector<std::size_t> support;
  for (std::size_t p = 0; p < grid->size(); ++p)
    if (smooth_window(grid->point(p), window.center, window.width) > 0.0)
      support.push_back(p);
  std::vector<PointData> pts(support.size());
  parallel_for(support.size(), workers, [&](std::size_t i) {
    const std::size_t p = support[i];
    const FiberSolve fs = solve_fiber(d, grid->point(p), N, opts.assembly);
    // auto mode picks the branch pointwise: immune to label drift through
    // near-degenerate regions outside the window
    const int k = auto_band ? branch_index(fs.spectral, window.branch)
                            : surface.perm[p][band];
    if (k < 0) throw Error("run_decay_pipeline: branch lost in window");
    PointData pd;
    pd.p = p;
    pd.omega = fs.spectral.omegas[k];
    const double chi =
        smooth_window(grid->point(p), window.center, window.width);
    pd.z0 = (window.amplitude * chi) * fs.spectral.vectors.col(k);
    const std::vector<int> sel = flat_band_selection(fs.spectral, flat);
    pd.is_flat = std::binary_search(sel.begin(), sel.end(), k);
    pts[i] = std::move(pd);
  });

  DecayTable table;
  table.t_max = t_max;
  table.max_group_speed = vmax;
  table.band = band;
  table.alpha = alpha;
  table.R = R;
  const double L3 = static_cast<double>(grid->size());
  const WeightedNormSpec wspec{alpha};

  double disc2 = 0.0, cont2 = 0.0;
  for (const PointData& pd : pts)
    (pd.is_flat ? disc2 : cont2) += pd.z0.squaredNorm();

  for (double t : abs_times) {
    CellField cf = zero_cell_field(R, (surface.D - 6) / 2);
    parallel_for(cf.cells.size(), workers, [&](std::size_t i) {
      const Vec3i n = cf.site(i);
      VectorXcd acc = VectorXcd::Zero(surface.D);
      for (const PointData& pd : pts) {
        if (pd.is_flat) continue;
        const Vec3& th = grid->point(pd.p);
        const double phase =
            -(n[0] * th[0] + n[1] * th[1] + n[2] * th[2]) - pd.omega * t;
        acc += std::polar(1.0, phase) * pd.z0;
      }
      cf.cells[i] = acc / L3;
    });
    DecayRow row;
    row.t = t;
    row.discrete_norm = std::sqrt(disc2 / L3);
    row.continuous_x0 = std::sqrt(cont2 / L3);
    row.continuous_weighted = weighted_norm(cf, wspec);
    row.beyond_horizon = t > t_max;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace blochspec
