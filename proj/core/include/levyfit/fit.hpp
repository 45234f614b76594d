#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "levyfit/charfn.hpp"
#include "levyfit/grid.hpp"
#include "levyfit/measure.hpp"

namespace levyfit {

// One accepted optimizer iterate.
struct IterateView {
  std::size_t sweep;
  // 0 for the exact objective, otherwise the power-mean exponent in use.
  double smoothing_power;
  double b;
  double atom_mass;
  std::span<const double> bins;
  double objective;
};

struct FitConfig {
  FrequencyGrid grid{};
  // Slack delta_n = delta_n_const / sqrt(n) in the near-minimizer contract.
  double delta_n_const = 1.0;
  // Upper bound on optimizer sweeps.
  std::size_t max_iters = 4000;
  // Stop once every search step is below this (in parameter units).
  double step_tol = 1e-7;
  // Stop once a sweep improves the objective by less than this, relative.
  double objective_tol = 1e-10;
  // Warm-up stages on power-mean smoothed objectives, in this order.
  std::vector<double> smoothing_powers{8.0, 32.0, 128.0};
  // Relative stall tolerance of the smoothed warm-up stages.
  double warmup_tol = 1e-5;
  // Extra restarts (steps reset) of the exact stage while they still improve.
  std::size_t restarts = 3;
  // Called on the start point and on each accepted iterate.
  std::function<void(const IterateView&)> observer;

  void validate() const;
};

struct FitResult {
  double b_hat = 0.0;
  GridMeasure nu_hat = GridMeasure::zero();
  double objective = 0.0;
  double pilot_objective = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
  double slack = 0.0;
};

// d2 distance between the model CF of (b, nu) and the empirical CF on the grid,
// evaluated directly (no tabulation).
double objective(double b, const GridMeasure& nu, const SampleSet& samples,
                 const FrequencyGrid& grid);

// Tabulated d2 objective for a fixed measure layout. Both CFs are conjugate
// symmetric, so only the nodes u >= 0 of the grid are evaluated; the maxima
// are the same as over the full symmetric grid.
class FitObjective {
 public:
  FitObjective(const SampleSet& samples, const FrequencyGrid& grid, double support_lo,
               double support_hi, std::size_t bins);
  // Compare against a given target triple on grid.nonnegative_half() instead of
  // the empirical CF (used to fit exact characteristic functions).
  FitObjective(std::vector<CfTriple> target, const FrequencyGrid& grid, double support_lo,
               double support_hi, std::size_t bins, double sample_size);

  double operator()(double b, const GridMeasure& nu) const;

  // d2 distance for precomputed exponent values (Psi, Psi', Psi'') per node.
  double from_exponents(std::span<const CfTriple> psi) const;

  const KernelTable& table() const noexcept { return table_; }
  const FrequencyGrid& half_grid() const noexcept { return half_; }
  std::span<const CfTriple> target() const noexcept { return target_; }
  double sample_size() const noexcept { return n_; }
  double support_lo() const noexcept { return lo_; }
  double support_hi() const noexcept { return hi_; }

 private:
  FrequencyGrid half_;
  KernelTable table_;
  std::vector<CfTriple> target_;
  double n_;
  double lo_;
  double hi_;
};

// Projected pattern search from `start` over (b, atom mass, bin values) with the
// atom and bins kept nonnegative. The returned point is the best iterate seen,
// so its objective never exceeds the start objective.
FitResult minimize(const FitObjective& objective, double b_start, const GridMeasure& start,
                   const FitConfig& cfg);
FitResult minimize(const SampleSet& samples, double b_start, const GridMeasure& start,
                   const FitConfig& cfg);

// int_a^inf x^{-2} nu(dx) for each threshold a > 0, i.e. nu([a, inf)).
double jump_tail_functional(const GridMeasure& nu, double a);
std::vector<double> functional_report(const FitResult& result,
                                      std::span<const double> thresholds);

// {"b_hat", "nu_hat", "objective", "pilot_objective", "iterations",
//  "evaluations", "converged", "slack"}
nlohmann::ordered_json to_json(const FitResult& result);

// Fraction of increments strictly larger than a.
double hf_baseline(const SampleSet& samples, double a);

}  // namespace levyfit
