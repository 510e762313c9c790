// Flat key-value run configuration with dotted sections.  All defaults are
// materialized on load so emitted metadata never depends on implicit
// built-ins; the canonical string (sorted keys, 17 significant digits)
// feeds the config hash recorded in every output file.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "blochspec/ion_density.hpp"
#include "blochspec/types.hpp"

namespace blochspec {

struct DensityConfig {
  std::string kind = "sinc_gauss";  // sinc_gauss | gaussian | tabulated
  double e = 0.125;
  double Z = 1.0;
  double M_ion = 1.0;
  double gauss_width = 1.0;  // sinc_gauss: a in exp(-(a xi)^2); gaussian: width
  double scale = 1.0;
  double amplitude = 1.0;    // gaussian prefactor
  double decay_rate = 1.0;
  std::string table_file;    // tabulated only
};

struct ToleranceConfig {
  double delta_min = 1e-6;
  double flat_tol = 1e-6;
  double grad_tol = 1e-4;
  double hess_tol = 1e-4;
  double tol_psd = 1e-8;
  double jellium_tol = 1e-12;
  double wiener_tol = 0.0;
  double last_shell = 1e-10;
};

struct DynamicsConfig {
  int band = -1;  // -1: pointwise auto branch (see `branch`)
  std::string branch = "qp_longitudinal";  // or psi_lowest
  Vec3 window_center = Vec3(0.7853981633974483, 0.7853981633974483,
                            0.7853981633974483);  // (pi/4)^3
  double window_width = 1.4279966607226333;       // pi/2.2
  double amplitude = 1.0;
  std::vector<double> times = {0.0, 1.0, 10.0};
  double alpha = -2.0;
  int R = 4;
};

struct ResolventConfig {
  int band = -1;
  std::string branch = "qp_longitudinal";
  Vec3 window_center = Vec3(0.7853981633974483, 0.7853981633974483,
                            0.7853981633974483);
  double window_width = 1.4279966607226333;
  double amplitude = 1.0;
  double omega_lo = 0.0;
  double omega_hi = 1.0;
  std::vector<double> epsilons = {0.2, 0.1, 0.05};
  double alpha = -4.0;
  int R = 2;
  int omega_samples = 200;
};

struct RunConfig {
  DensityConfig density;
  bool zero_coupling = false;
  bool jellium = true;
  int N = 3;
  int L = 8;
  int radius = 8;
  int jellium_radius = 5;
  ToleranceConfig tol;
  DynamicsConfig dynamics;
  ResolventConfig resolvent;
  unsigned workers = 0;  // 0 = all cores
  std::uint64_t seed = 1;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_string(const std::string& text);

  void validate() const;  // throws ConfigError
  IonDensity make_density() const;

  // sorted key=value lines, floats at 17 significant digits
  std::string canonical_string() const;
  std::uint64_t hash64() const;  // FNV-1a over the canonical string
};

std::string format_g17(double v);

}  // namespace blochspec
