#include "blochspec/resolvent.hpp"

#include <algorithm>
#include <cmath>

#include "blochspec/parallel.hpp"

namespace blochspec {

BlochField apply_resolvent(const BlochField& field, const SpectralSweep& sweep,
                           double omega, double eps) {
  if (eps == 0.0) throw Error("apply_resolvent: eps must be nonzero");
  if (!field.grid || field.values.size() != sweep.spectra.size())
    throw GaugeMismatch("apply_resolvent: field/sweep grid mismatch");
  BlochField out = field;
  parallel_for(field.values.size(), default_worker_count(), [&](std::size_t p) {
    const SpectralData& sd = sweep.spectra[p];
    VectorXcd c = sd.vectors.adjoint() * field.values[p];
    for (Eigen::Index k = 0; k < c.size(); ++k)
      c[k] /= Complex(sd.omegas[k] - omega, -eps);
    out.values[p] = sd.vectors * c;
  });
  return out;
}

double resolvent_pairing_im(const BlochField& Z, const SpectralSweep& sweep,
                            double omega, double eps) {
  double acc = 0.0;
  for (std::size_t p = 0; p < Z.values.size(); ++p) {
    const SpectralData& sd = sweep.spectra[p];
    const VectorXcd c = sd.vectors.adjoint() * Z.values[p];
    for (Eigen::Index k = 0; k < c.size(); ++k) {
      // Im of |c_k|^2 / (omega_k - omega - i eps)
      const double dr = sd.omegas[k] - omega;
      acc += std::norm(c[k]) * eps / (dr * dr + eps * eps);
    }
  }
  return acc / static_cast<double>(Z.grid->size());
}

double spectral_density(const BlochField& Z, const SpectralSweep& sweep,
                        double omega, double eps) {
  if (!(eps > 0.0)) throw Error("spectral_density: eps must be positive");
  return resolvent_pairing_im(Z, sweep, omega, eps);
}

double grid_level_spacing(const SpectralSweep& sweep, double omega_lo,
                          double omega_hi) {
  std::vector<double> vals;
  for (const SpectralData& sd : sweep.spectra)
    for (Eigen::Index k = 0; k < sd.omegas.size(); ++k)
      if (sd.omegas[k] >= omega_lo && sd.omegas[k] <= omega_hi)
        vals.push_back(sd.omegas[k]);
  if (vals.size() < 2) return omega_hi - omega_lo;
  std::sort(vals.begin(), vals.end());
  std::vector<double> gaps;
  gaps.reserve(vals.size() - 1);
  for (std::size_t i = 1; i < vals.size(); ++i)
    gaps.push_back(vals[i] - vals[i - 1]);
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  return gaps[gaps.size() / 2];
}

LapTable lap_scan(const ResolventProbe& probe, const SpectralSweep& sweep,
                  double alpha, int R, int omega_samples) {
  if (probe.epsilons.empty()) throw Error("lap_scan: empty epsilon list");
  for (std::size_t i = 0; i < probe.epsilons.size(); ++i) {
    if (!(probe.epsilons[i] > 0.0))
      throw Error("lap_scan: epsilons must be positive");
    if (i > 0 && probe.epsilons[i] >= probe.epsilons[i - 1])
      throw Error("lap_scan: epsilons must be strictly descending");
  }
  if (omega_samples < 1) throw Error("lap_scan: omega_samples must be >= 1");

  LapTable table;
  table.alpha = alpha;
  table.R = R;
  table.level_spacing =
      grid_level_spacing(sweep, probe.omega_lo, probe.omega_hi);
  const WeightedNormSpec wspec{alpha};

  for (int s = 0; s < omega_samples; ++s) {
    const double omega =
        omega_samples == 1
            ? 0.5 * (probe.omega_lo + probe.omega_hi)
            : probe.omega_lo + (probe.omega_hi - probe.omega_lo) * s /
                                   (omega_samples - 1);
    for (double eps : probe.epsilons) {
      LapRow row;
      row.omega = omega;
      row.eps = eps;
      row.density = spectral_density(probe.Z, sweep, omega, eps);
      const BlochField rz = apply_resolvent(probe.Z, sweep, omega, eps);
      row.weighted_norm = weighted_norm(bloch_inverse(rz, R), wspec);
      row.trusted = eps >= 2.0 * table.level_spacing;
      table.rows.push_back(row);
    }
  }
  return table;
}

}  // namespace blochspec
