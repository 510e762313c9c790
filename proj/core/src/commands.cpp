#include "blochspec/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "blochspec/dynamics.hpp"
#include "blochspec/report.hpp"
#include "blochspec/resolvent.hpp"

namespace blochspec {

namespace {

using nlohmann::json;

void ensure_dir(const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
}

AssemblyOptions assembly_options(const RunConfig& c) {
  AssemblyOptions a;
  a.radius = c.radius;
  a.jellium = c.jellium;
  a.zero_coupling = c.zero_coupling;
  a.delta_min = c.tol.delta_min;
  a.last_shell_tol = c.tol.last_shell;
  a.jellium_tol = c.tol.jellium_tol;
  return a;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path);
  f << j.dump(2) << "\n";
}

}  // namespace

int cmd_check(const RunConfig& config, const std::string& out_dir) {
  ensure_dir(out_dir);
  const IonDensity d = config.make_density();

  const JelliumCheck jc =
      check_jellium(d, config.jellium_radius, config.tol.jellium_tol);
  const ThetaGrid grid(config.L);
  const WienerReport wr = check_wiener(d, grid, config.radius,
                                       config.tol.wiener_tol,
                                       config.tol.delta_min);

  {
    CsvWriter csv(out_dir + "/wiener.csv", metadata_block(config),
                  {"theta1", "theta2", "theta3", "min_eig"});
    for (std::size_t i = 0; i < wr.grid.size(); ++i)
      csv.row({wr.grid[i][0], wr.grid[i][1], wr.grid[i][2], wr.min_eig[i]});
    csv.close();
  }

  double min_eig = std::numeric_limits<double>::infinity();
  for (double v : wr.min_eig) min_eig = std::min(min_eig, v);

  json j;
  j["jellium"] = {{"passed", jc.passed},
                  {"worst_m", {jc.worst_m[0], jc.worst_m[1], jc.worst_m[2]}},
                  {"worst_abs", jc.worst_abs},
                  {"radius", config.jellium_radius},
                  {"tol", config.tol.jellium_tol}};
  j["wiener"] = {{"passed", wr.passed},
                 {"min_eig", wr.min_eig.empty() ? 0.0 : min_eig},
                 {"grid_L", config.L},
                 {"radius", wr.truncation_radius},
                 {"tol", config.tol.wiener_tol},
                 {"empty_grid_warning", wr.empty_grid_warning}};
  std::ostringstream hash;
  hash << std::hex << config.hash64();
  j["config_hash"] = hash.str();
  write_json(out_dir + "/check.json", j);

  std::cout << "condition        status   detail\n";
  std::cout << "jellium          " << (jc.passed ? "pass " : "FAIL ")
            << "   worst |sigma_hat(2pi m)| = " << format_g17(jc.worst_abs)
            << " at m = (" << jc.worst_m[0] << "," << jc.worst_m[1] << ","
            << jc.worst_m[2] << ")\n";
  std::cout << "wiener           " << (wr.passed ? "pass " : "FAIL ")
            << "   min lambda_min(Sigma) = " << format_g17(min_eig)
            << " over " << wr.grid.size() << " grid points\n";
  return (jc.passed && wr.passed) ? 0 : 1;
}

int cmd_bands(const RunConfig& config, const std::string& out_dir) {
  ensure_dir(out_dir);
  const IonDensity d = config.make_density();
  auto grid = std::make_shared<const ThetaGrid>(config.L);

  SweepOptions sopts;
  sopts.assembly = assembly_options(config);
  sopts.workers = config.workers;
  const BandSurface surface = sweep_bands(d, grid, config.N, sopts);
  const FlatBandReport flat = detect_flat_bands(surface, config.tol.flat_tol);

  {
    CsvWriter csv(out_dir + "/bands.csv", metadata_block(config),
                  {"theta1", "theta2", "theta3", "band_index", "omega",
                   "match_quality"});
    for (std::size_t p = 0; p < grid->size(); ++p) {
      const Vec3& th = grid->point(p);
      for (int b = 0; b < surface.D; ++b)
        csv.row_cells({format_g17(th[0]), format_g17(th[1]),
                       format_g17(th[2]), std::to_string(b),
                       format_g17(surface.bands(p, b)),
                       format_g17(surface.match_quality(p, b))});
    }
    csv.close();
  }

  // growth-law fit at the first grid point over the trust window
  const int D = surface.D;
  const int k_hi = std::min(150, D / 2);
  const int k_lo = std::min(20, std::max(1, k_hi - 10));
  SpectralData sd;
  sd.omegas = surface.sorted_omegas.row(0).transpose();
  GrowthFit fit;
  bool fit_ok = false;
  try {
    fit = growth_fit(sd, k_lo, k_hi);
    fit_ok = true;
  } catch (const RangeTooSmall&) {
  }

  json j;
  j["flat_bands"] = json::array();
  for (std::size_t f = 0; f < flat.values.size(); ++f)
    j["flat_bands"].push_back({{"band_index", flat.band_indices[f]},
                               {"omega_star", flat.values[f]},
                               {"max_deviation", flat.max_deviation[f]}});
  j["flat_tol"] = flat.flat_tol;

  // stationary-point statistics for the lowest non-flat band
  int lowest_nonflat = -1;
  for (int b = 0; b < surface.D && lowest_nonflat < 0; ++b) {
    bool is_flat = false;
    for (int fb : flat.band_indices) is_flat = is_flat || fb == b;
    if (!is_flat) lowest_nonflat = b;
  }
  if (lowest_nonflat >= 0) {
    const BandDerivatives der =
        band_derivatives(surface, lowest_nonflat, config.tol.grad_tol,
                         config.tol.hess_tol, /*skip_contaminated=*/true);
    j["derivatives"] = {{"band_index", lowest_nonflat},
                        {"degenerate_fraction", der.degenerate_fraction},
                        {"max_grad_norm", der.max_grad_norm},
                        {"contaminated_stencils", der.contaminated_count},
                        {"grad_tol", config.tol.grad_tol},
                        {"hess_tol", config.tol.hess_tol}};
  }
  if (fit_ok) {
    j["growth_fit"] = {{"theta",
                        {grid->point(0)[0], grid->point(0)[1],
                         grid->point(0)[2]}},
                       {"k_lo", k_lo},
                       {"k_hi", k_hi},
                       {"slope", fit.slope},
                       {"log_prefactor", fit.log_prefactor},
                       {"eps_empirical", fit.eps_empirical},
                       {"flat_flag", fit.flat_flag}};
  }
  std::ostringstream hash;
  hash << std::hex << config.hash64();
  j["config_hash"] = hash.str();
  write_json(out_dir + "/bands_summary.json", j);
  return 0;
}

int cmd_evolve(const RunConfig& config, const std::string& out_dir) {
  ensure_dir(out_dir);
  const IonDensity d = config.make_density();

  CsvWriter csv(out_dir + "/decay.csv", metadata_block(config),
                {"t", "discrete_norm", "continuous_weighted_norm",
                 "continuous_x0_norm", "horizon_flag"});
  if (!config.dynamics.times.empty()) {
    BandWindow window;
    window.band = config.dynamics.band;
    window.branch = config.dynamics.branch == "psi_lowest"
                        ? AutoBranch::PsiLowest
                        : AutoBranch::QpLongitudinal;
    window.center = config.dynamics.window_center;
    window.width = config.dynamics.window_width;
    window.amplitude = config.dynamics.amplitude;
    DecayPipelineOptions opts;
    opts.assembly = assembly_options(config);
    opts.flat_tol = config.tol.flat_tol;
    opts.workers = config.workers;
    const DecayTable table =
        run_decay_pipeline(d, config.N, config.L, window,
                           config.dynamics.times, config.dynamics.alpha,
                           config.dynamics.R, opts);
    for (const DecayRow& r : table.rows)
      csv.row({r.t, r.discrete_norm, r.continuous_weighted, r.continuous_x0,
               r.beyond_horizon ? 1.0 : 0.0});
  }
  csv.close();
  return 0;
}

int cmd_resolvent(const RunConfig& config, const std::string& out_dir) {
  ensure_dir(out_dir);
  const IonDensity d = config.make_density();
  auto grid = std::make_shared<const ThetaGrid>(config.L);

  SweepOptions sopts;
  sopts.assembly = assembly_options(config);
  sopts.workers = config.workers;
  const BandSurface surface = sweep_bands(d, grid, config.N, sopts);
  const FlatBandReport flat = detect_flat_bands(surface, config.tol.flat_tol);
  const SpectralSweep sweep = compute_sweep(d, grid, config.N, sopts.assembly,
                                            false, config.workers);

  BandWindow window;
  window.band = config.resolvent.band;
  window.branch = config.resolvent.branch == "psi_lowest"
                      ? AutoBranch::PsiLowest
                      : AutoBranch::QpLongitudinal;
  window.center = config.resolvent.window_center;
  window.width = config.resolvent.window_width;
  window.amplitude = config.resolvent.amplitude;

  ResolventProbe probe;
  {
    const BlochField raw = window.band < 0
                               ? pointwise_band_initial_data(sweep, window)
                               : band_initial_data(sweep, surface, window);
    // keep the probe orthogonal to the flat-band (point-spectrum) columns
    auto [dpart, cpart] = split_components(raw, sweep, flat);
    probe.Z = std::move(cpart);
  }
  probe.epsilons = config.resolvent.epsilons;
  probe.omega_lo = config.resolvent.omega_lo;
  probe.omega_hi = config.resolvent.omega_hi;
  if (!(probe.omega_lo < probe.omega_hi)) {
    // auto window: band range over the probe support, padded by 4 eps_max
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t p = 0; p < grid->size(); ++p) {
      if (probe.Z.values[p].isZero(0)) continue;
      double w;
      if (window.band >= 0) {
        w = surface.bands(p, window.band);
      } else {
        const int k = window.branch == AutoBranch::PsiLowest
                          ? lowest_psi_index(sweep.spectra[p])
                          : longitudinal_qp_index(sweep.spectra[p]);
        w = sweep.spectra[p].omegas[k];
      }
      lo = std::min(lo, w);
      hi = std::max(hi, w);
    }
    const double pad =
        4.0 * *std::max_element(probe.epsilons.begin(), probe.epsilons.end());
    probe.omega_lo = lo - pad;
    probe.omega_hi = hi + pad;
  }

  const LapTable table = lap_scan(probe, sweep, config.resolvent.alpha,
                                  config.resolvent.R,
                                  config.resolvent.omega_samples);
  auto meta = metadata_block(config);
  meta.push_back("level_spacing=" + format_g17(table.level_spacing));
  meta.push_back("band=" + std::to_string(window.band));
  CsvWriter csv(out_dir + "/lap.csv", meta,
                {"omega", "epsilon", "density", "weighted_norm",
                 "trusted_flag"});
  for (const LapRow& r : table.rows)
    csv.row({r.omega, r.eps, r.density, r.weighted_norm,
             r.trusted ? 1.0 : 0.0});
  csv.close();
  return 0;
}

}  // namespace blochspec
