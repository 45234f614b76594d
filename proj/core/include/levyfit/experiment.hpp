#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "levyfit/fit.hpp"
#include "levyfit/grid.hpp"
#include "levyfit/measure.hpp"
#include "levyfit/sim.hpp"

namespace levyfit {

struct ExperimentPlan {
  ModelSpec model = ModelSpec::defaults(ModelKind::brownian_gamma, 20080601);
  std::vector<std::size_t> n_values{1000};
  std::size_t replications = 20;
  std::vector<double> s_values{1.0};
  // Empty: nothing is written.
  std::filesystem::path output_dir;
  std::size_t parallelism = 1;

  // Estimator layout and grids.
  FrequencyGrid fit_grid{};
  double support_lo = -10.0;
  double support_hi = 10.0;
  std::size_t bins = 16;
  double kappa = 1.0;
  std::size_t max_iters = 4000;
  // Grid for l_s losses; the truth is discretized with truth_refinement * bins bins.
  FrequencyGrid loss_grid{500.0, 0.05};
  std::size_t truth_refinement = 16;

  void validate() const;
};

// Plan of the worked example: brownian_gamma defaults, n = 1000, 20 replications,
// 16 bins on [-10, 10].
ExperimentPlan example_plan(std::uint64_t seed = 20080601);

// Plan of the rate study for one model: n in {500, 2000, 8000}, 20
// replications, s = 1. Compound Poisson uses 20 bins on [-5, 5], the other
// models 16 bins on [-10, 10].
ExperimentPlan rate_plan(ModelKind kind, std::uint64_t seed = 20080601);

// Everything computed for one simulated sample.
struct ReplicationRecord {
  std::size_t n = 0;
  std::uint64_t replication = 0;
  double b_pilot = 0.0;
  double b_hat = 0.0;
  double sigma_hat = 0.0;  // sqrt of the fitted atom mass
  double tail_hat = 0.0;   // fitted nu([1, inf))
  double hf_estimate = 0.0;
  double pilot_objective = 0.0;
  double objective = 0.0;
  double truth_objective = 0.0;  // d2 of the exact model CF to the empirical CF
  std::size_t iterations = 0;
  bool converged = false;
  bool ridge_used = false;
  std::vector<double> losses;  // l_s(nu_hat, truth) per plan.s_values
  GridMeasure pilot_nu = GridMeasure::zero();
  GridMeasure nu_hat = GridMeasure::zero();
};

// Pilot + fit on replication `replication` of size n, with losses against
// `truth` (nullptr: no losses).
ReplicationRecord run_replication(const ExperimentPlan& plan, std::size_t n,
                                  std::uint64_t replication, const GridMeasure* truth);

struct ExampleReport {
  ExperimentPlan plan;
  std::vector<ReplicationRecord> replications;
  double true_b = 0.0;
  double true_sigma = 0.0;
  double true_tail = 0.0;
  double median_abs_b_error = 0.0;
  double median_abs_sigma_error = 0.0;
  double median_tail = 0.0;
  double mean_hf = 0.0;
  double fraction_closer_than_truth = 0.0;

  nlohmann::ordered_json to_json() const;
};

// Worked example: per replication pilot/fit summaries plus medians. Writes
// report.json, replications.csv, histogram.csv, cf_curves.csv and density.csv
// to plan.output_dir when set.
ExampleReport run_example(const ExperimentPlan& plan);

struct T41Row {
  std::size_t n = 0;
  int k = 0;
  double mean_norm = 0.0;
  double sd_norm = 0.0;
};

struct T41Table {
  ModelSpec model;
  std::vector<T41Row> rows;
  // Per k: mean at the largest n divided by mean at the smallest n.
  std::vector<double> ratios;
  // True when some ratio exceeds the boundedness threshold.
  bool flagged = false;
  double threshold = 1.5;

  nlohmann::ordered_json to_json() const;
};

// Monte Carlo mean of the weighted sup norm of the k-th derivative of the
// normalized CF process, per n, with the exact model CF as centre.
T41Table run_t41_check(const ModelSpec& model, std::span<const int> ks,
                       std::span<const std::size_t> n_values, std::size_t replications,
                       const FrequencyGrid& grid, std::size_t parallelism = 1,
                       const std::filesystem::path& output_dir = {});

enum class DecayCase { gaussian, exponential, polynomial };
std::string_view to_string(DecayCase c);
DecayCase decay_case(const ModelSpec& model);

// Order beta of |phi(u)| ~ (1+|u|)^{-beta}, by least squares of -log|phi| on
// log(1+u) over log-spaced u in [10, 1000]; clipped at 0.
double measure_cf_decay_order(const ModelSpec& model);

struct RateRow {
  std::size_t n = 0;
  double s = 0.0;
  double median_loss = 0.0;
};

struct RateSlope {
  double s = 0.0;
  std::optional<double> slope;
  // -s/(2 beta) v -1/2, polynomial decay only.
  std::optional<double> target;
};

struct RateTable {
  ModelSpec model;
  DecayCase decay = DecayCase::gaussian;
  std::optional<double> beta;
  std::vector<RateRow> rows;
  std::vector<RateSlope> slopes;
  std::vector<ReplicationRecord> replications;

  nlohmann::ordered_json to_json() const;
};

// Median l_s(nu_hat, truth) per (n, s) and least-squares log-log slopes.
RateTable run_rate_study(const ExperimentPlan& plan);

// Least-squares slope of log(y) on log(x); nullopt for fewer than two points.
std::optional<double> log_log_slope(std::span<const double> x, std::span<const double> y);

double median(std::vector<double> values);

nlohmann::ordered_json to_json(const ExperimentPlan& plan);

}  // namespace levyfit
