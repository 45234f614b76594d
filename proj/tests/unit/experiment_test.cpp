#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "levyfit/experiment.hpp"

namespace levyfit {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentPlan small_plan(const fs::path& dir) {
  ExperimentPlan plan = example_plan(5);
  plan.n_values = {200};
  plan.replications = 1;
  plan.fit_grid = FrequencyGrid(5.0, 0.1);
  plan.max_iters = 40;
  plan.loss_grid = FrequencyGrid(20.0, 0.1);
  plan.truth_refinement = 2;
  plan.output_dir = dir;
  return plan;
}

TEST(Median, OddEvenEmpty) {
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_THROW(median({}), std::invalid_argument);
}

TEST(LogLogSlope, PowerLawAndDegenerate) {
  const double x[] = {1.0, 10.0, 100.0};
  const double y[] = {2.0, 2.0 / std::sqrt(10.0), 0.2};
  EXPECT_NEAR(*log_log_slope(x, y), -0.5, 1e-12);
  EXPECT_FALSE(log_log_slope(std::span(x, 1), std::span(y, 1)).has_value());
  const double bad[] = {1.0, 0.0, 2.0};
  EXPECT_FALSE(log_log_slope(x, bad).has_value());
}

TEST(ExperimentPlan, Validation) {
  ExperimentPlan plan;
  EXPECT_NO_THROW(plan.validate());
  plan.n_values = {1000, 500};
  EXPECT_THROW(plan.validate(), std::invalid_argument);
  plan = ExperimentPlan{};
  plan.replications = 0;
  EXPECT_THROW(plan.validate(), std::invalid_argument);
  plan = ExperimentPlan{};
  plan.s_values = {-1.0};
  EXPECT_THROW(plan.validate(), std::invalid_argument);
  plan = ExperimentPlan{};
  plan.parallelism = 0;
  EXPECT_THROW(plan.validate(), std::invalid_argument);
}

TEST(DecayCase, PerModel) {
  EXPECT_EQ(decay_case(ModelSpec::defaults(ModelKind::brownian_gamma)), DecayCase::gaussian);
  EXPECT_EQ(decay_case(ModelSpec::defaults(ModelKind::pure_gaussian)), DecayCase::gaussian);
  EXPECT_EQ(decay_case(ModelSpec::defaults(ModelKind::normal_inverse_gaussian)),
            DecayCase::exponential);
  EXPECT_EQ(decay_case(ModelSpec::defaults(ModelKind::compound_poisson_gaussian_jumps)),
            DecayCase::polynomial);
  EXPECT_EQ(decay_case(ModelSpec::defaults(ModelKind::bilateral_gamma)), DecayCase::polynomial);
  EXPECT_EQ(to_string(DecayCase::exponential), "exponential");
}

TEST(DecayOrder, KnownOrders) {
  // |phi| = (1 + u^2)^{-beta/2}: order beta. Regressing on log(1+u) rather than
  // log u over [10, 1000] inflates the slope by about 2%.
  EXPECT_NEAR(measure_cf_decay_order(ModelSpec{BilateralGammaParams{1.0, 1.5}, 0}), 1.5 * 1.016,
              0.01);
  // Bounded away from zero.
  EXPECT_NEAR(measure_cf_decay_order(ModelSpec::defaults(ModelKind::compound_poisson_gaussian_jumps)),
              0.0, 1e-6);
}

TEST(RunReplication, RecordsAreConsistent) {
  const ExperimentPlan plan = small_plan({});
  const GridMeasure truth = GridMeasure::zero();
  const ReplicationRecord r = run_replication(plan, 200, 0, &truth);
  EXPECT_EQ(r.n, 200u);
  EXPECT_LE(r.objective, r.pilot_objective);
  EXPECT_DOUBLE_EQ(r.sigma_hat, std::sqrt(r.nu_hat.atom_mass()));
  EXPECT_EQ(r.losses.size(), 1u);
  EXPECT_TRUE(run_replication(plan, 200, 0, nullptr).losses.empty());
}

TEST(RunExample, SingleReplicationIsDeterministic) {
  const fs::path base = fs::temp_directory_path() / "levyfit_example_test";
  fs::remove_all(base);
  const ExampleReport a = run_example(small_plan(base / "a"));
  const ExampleReport b = run_example(small_plan(base / "b"));
  for (const char* name : {"replications.csv", "histogram.csv", "cf_curves.csv", "density.csv"}) {
    const std::string first = slurp(base / "a" / name);
    EXPECT_FALSE(first.empty()) << name;
    EXPECT_EQ(first, slurp(base / "b" / name)) << name;
  }
  EXPECT_EQ(a.replications.front().nu_hat, b.replications.front().nu_hat);
  EXPECT_DOUBLE_EQ(a.true_b, 1.0);
  EXPECT_DOUBLE_EQ(a.true_sigma, 1.0);
  EXPECT_NEAR(a.true_tail, 0.21938393439552, 1e-8);
  const auto report = nlohmann::json::parse(slurp(base / "a" / "report.json"));
  EXPECT_EQ(report.at("replications").size(), 1u);
  fs::remove_all(base);
}

TEST(RunExample, ParallelMatchesSerial) {
  ExperimentPlan plan = small_plan({});
  plan.replications = 4;
  const ExampleReport serial = run_example(plan);
  plan.parallelism = 3;
  const ExampleReport parallel = run_example(plan);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(serial.replications[i].objective, parallel.replications[i].objective);
    EXPECT_EQ(serial.replications[i].nu_hat, parallel.replications[i].nu_hat);
  }
}

TEST(RunExample, ReportsUnwritableOutputPath) {
  const fs::path file = fs::temp_directory_path() / "levyfit_not_a_dir";
  std::ofstream(file) << "x";
  ExperimentPlan plan = small_plan(file / "sub");
  try {
    run_example(plan);
    FAIL() << "expected an IO error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("levyfit_not_a_dir"), std::string::npos);
  }
  fs::remove(file);
}

TEST(RunT41Check, DeterministicIncrementsGiveZeroNorms) {
  const ModelSpec constant{PureGaussianParams{0.7, 0.0}, 1};
  const int ks[] = {0, 1, 2};
  const std::size_t ns[] = {10, 100};
  const T41Table t = run_t41_check(constant, ks, ns, 3, FrequencyGrid(5.0, 0.1));
  ASSERT_EQ(t.rows.size(), 6u);
  for (const auto& row : t.rows) EXPECT_NEAR(row.mean_norm, 0.0, 1e-12);
  EXPECT_FALSE(t.flagged);
}

TEST(RunT41Check, PureGaussianBounded) {
  const int ks[] = {0};
  const std::size_t ns[] = {100, 1000, 10000};
  const T41Table t = run_t41_check(ModelSpec::defaults(ModelKind::pure_gaussian, 3), ks, ns, 100,
                                   FrequencyGrid());
  ASSERT_EQ(t.ratios.size(), 1u);
  EXPECT_LE(t.ratios[0], 1.5);
  EXPECT_FALSE(t.flagged);
  const auto j = t.to_json();
  EXPECT_EQ(j.at("rows").size(), 3u);
}

TEST(RunT41Check, RejectsBadOrder) {
  const int ks[] = {3};
  const std::size_t ns[] = {10};
  EXPECT_THROW(run_t41_check(ModelSpec::defaults(ModelKind::pure_gaussian), ks, ns, 1,
                             FrequencyGrid()),
               std::invalid_argument);
}

TEST(RunRateStudy, SingleSizeHasNoSlope) {
  ExperimentPlan plan = small_plan({});
  plan.model = ModelSpec::defaults(ModelKind::compound_poisson_gaussian_jumps, 2);
  plan.support_lo = -5.0;
  plan.support_hi = 5.0;
  plan.bins = 10;
  plan.replications = 2;
  plan.s_values = {0.0, 1.0};
  const RateTable t = run_rate_study(plan);
  ASSERT_EQ(t.rows.size(), 2u);
  ASSERT_EQ(t.slopes.size(), 2u);
  EXPECT_FALSE(t.slopes[0].slope.has_value());
  EXPECT_EQ(t.decay, DecayCase::polynomial);
  ASSERT_TRUE(t.slopes[1].target.has_value());
  EXPECT_DOUBLE_EQ(*t.slopes[1].target, -0.5);
}

TEST(RatePlan, Layouts) {
  const ExperimentPlan cp = rate_plan(ModelKind::compound_poisson_gaussian_jumps);
  EXPECT_EQ(cp.bins, 20u);
  EXPECT_EQ(cp.n_values, (std::vector<std::size_t>{500, 2000, 8000}));
  EXPECT_EQ(rate_plan(ModelKind::brownian_gamma).support_hi, 10.0);
}

}  // namespace
}  // namespace levyfit
