#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "levyfit/charfn.hpp"
#include "levyfit/grid.hpp"
#include "levyfit/measure.hpp"

namespace levyfit {

struct PilotConfig {
  // Threshold constant: frequencies with |phi_n(u)| < kappa / sqrt(n) are dropped.
  double kappa = 1.0;
  FrequencyGrid grid{};
  double support_lo = -10.0;
  double support_hi = 10.0;
  std::size_t bins = 16;

  void validate() const;
};

// Sample mean of the increments, X_n / n.
double pilot_mean(const SampleSet& samples);

// Spectral estimate of F nu_sigma(u) from one empirical CF triple:
//   ((phi'/phi)^2 - phi''/phi) * 1{|phi| >= kappa / sqrt(n)}.
std::complex<double> pilot_fnu(const CfTriple& empirical, double n, double kappa);
std::complex<double> pilot_fnu(const SampleSet& samples, const PilotConfig& cfg, double u);

struct PilotEstimate {
  double b = 0.0;
  GridMeasure nu = GridMeasure::zero();
  // True when the normal equations were singular and a ridge term was added.
  bool ridge_used = false;
  // Pilot F nu_sigma on cfg.grid, 0 where the threshold indicator is off.
  std::vector<std::complex<double>> fnu;
  std::vector<bool> active;
};

// Weighted least-squares fit of a GridMeasure with zero atom to a spectrum
// given on cfg.grid: minimizes sum_u w(u)^2 |F nu(u) - target(u)|^2 over the
// active nodes, then clips negative bins to 0.
PilotEstimate project_spectrum(std::span<const std::complex<double>> target,
                               const std::vector<bool>& active, const PilotConfig& cfg);

// Pilot mean plus projected spectral estimate (atom mass 0).
PilotEstimate project_pilot(const SampleSet& samples, const PilotConfig& cfg);

// {"b", "nu", "ridge_used"}; the spectrum is written separately as CSV.
nlohmann::ordered_json to_json(const PilotEstimate& pilot);

}  // namespace levyfit
