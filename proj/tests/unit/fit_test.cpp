#include <gtest/gtest.h>

#include <cmath>

#include "levyfit/experiment.hpp"
#include "levyfit/fit.hpp"
#include "levyfit/pilot.hpp"
#include "levyfit/sim.hpp"
#include "oracles.hpp"

namespace levyfit {
namespace {

const ModelSpec kGammaExample = ModelSpec::defaults(ModelKind::brownian_gamma, 20080601);

std::vector<CfTriple> exact_target(const CharExponentModel& m, const FrequencyGrid& grid) {
  const FrequencyGrid half = grid.nonnegative_half();
  std::vector<CfTriple> out;
  for (double u : half.nodes()) out.push_back(model_cf(m, u));
  return out;
}

TEST(FitConfig, Validation) {
  FitConfig cfg;
  cfg.max_iters = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = FitConfig{};
  cfg.step_tol = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = FitConfig{};
  cfg.delta_n_const = -1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(FitObjective, AgreesWithDirectObjective) {
  const SampleSet s = sample_increments(kGammaExample, 500, 1);
  const FrequencyGrid grid(10.0, 0.1);
  const GridMeasure nu(0.7, -10.0, 10.0, std::vector<double>(16, 0.05));
  const FitObjective obj(s, grid, -10.0, 10.0, 16);
  EXPECT_NEAR(obj(0.9, nu), objective(0.9, nu, s, grid), 1e-10);
  EXPECT_THROW(obj(0.9, GridMeasure::zero(-10, 10, 8)), std::invalid_argument);
}

TEST(FitObjective, ExactTargetAtItsOwnParametersIsZero) {
  const FrequencyGrid grid(10.0, 0.1);
  const CharExponentModel m{0.4, GridMeasure(0.5, -5.0, 5.0, {0.0, 0.1, 0.3, 0.2, 0.1, 0.0})};
  const FitObjective obj(exact_target(m, grid), grid, -5.0, 5.0, 6, 1000.0);
  EXPECT_NEAR(obj(m.b, m.nu_sigma), 0.0, 1e-12);
  EXPECT_THROW(FitObjective({}, grid, -5.0, 5.0, 6, 1000.0), std::invalid_argument);
}

TEST(FitObjective, TruthObjectiveIsOrderRootN) {
  // Weighted sup distance of the exact CF to the empirical CF, 50 samples per
  // size. The CF process norm is O(1) per derivative order, so the median
  // halves when n grows fourfold.
  const FrequencyGrid grid;
  auto median_at = [&](std::size_t n) {
    std::vector<double> values;
    for (std::uint64_t r = 0; r < 50; ++r) {
      const SampleSet s = sample_increments(kGammaExample, n, r);
      values.push_back(d2_distance([](double u) { return exact_cf(kGammaExample, u); },
                                   [&s](double u) { return empirical_cf_triple(s, u); }, grid));
    }
    return median(values);
  };
  const double at1000 = median_at(1000);
  const double at4000 = median_at(4000);
  EXPECT_GT(at1000 / at4000, 1.5);
  EXPECT_LT(at1000 / at4000, 2.7);
  // Monte Carlo baseline: sqrt(n) * median at n = 1000.
  EXPECT_NEAR(std::sqrt(1000.0) * at1000, 11.13, 0.5);
}

TEST(Objective, LipschitzInDrift) {
  const SampleSet s = sample_increments(kGammaExample, 400, 2);
  const FrequencyGrid grid(8.0, 0.05);
  const GridMeasure nu(1.0, -10.0, 10.0, std::vector<double>(16, 0.06));
  const double b = 0.95;
  const double eps = 1e-4;
  // d/db of (phi, phi', phi'') = (iu phi, i phi + iu phi', 2i phi' + iu phi'').
  const cplx i{0.0, 1.0};
  double bound = 0.0;
  for (int k = 0; k < 3; ++k) {
    double sup = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n) {
      const double u = grid.nodes()[n];
      const CfTriple f = model_cf(CharExponentModel{b, nu}, u);
      const cplx d = k == 0 ? i * u * f.d0 : (k == 1 ? i * f.d0 + i * u * f.d1 : 2.0 * i * f.d1 + i * u * f.d2);
      sup = std::max(sup, grid.weights()[n] * std::abs(d));
    }
    bound += sup;
  }
  const double change = std::abs(objective(b + eps, nu, s, grid) - objective(b, nu, s, grid));
  EXPECT_LE(change, eps * bound * (1.0 + 1e-3));
}

TEST(Minimize, StartAtExactTruthIsKept) {
  const FrequencyGrid grid(10.0, 0.1);
  const CharExponentModel m{0.4, GridMeasure(0.5, -5.0, 5.0, {0.0, 0.1, 0.3, 0.2, 0.1, 0.0})};
  const FitObjective obj(exact_target(m, grid), grid, -5.0, 5.0, 6, 1000.0);
  FitConfig cfg;
  cfg.grid = grid;
  cfg.max_iters = 200;
  const FitResult r = minimize(obj, m.b, m.nu_sigma, cfg);
  EXPECT_LE(r.objective, r.pilot_objective);
  EXPECT_NEAR(r.b_hat, m.b, 1e-9);
  for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(r.nu_hat.bins()[j], m.nu_sigma.bins()[j], 1e-9);
  EXPECT_NEAR(r.nu_hat.atom_mass(), 0.5, 1e-9);
}

TEST(Minimize, RecoversExactTargetFromPerturbedStart) {
  const FrequencyGrid grid(10.0, 0.1);
  const CharExponentModel m{0.4, GridMeasure(0.5, -5.0, 5.0, {0.0, 0.1, 0.3, 0.2, 0.1, 0.0})};
  const FitObjective obj(exact_target(m, grid), grid, -5.0, 5.0, 6, 1e6);
  FitConfig cfg;
  cfg.grid = grid;
  const GridMeasure start(0.2, -5.0, 5.0, {0.05, 0.05, 0.4, 0.4, 0.05, 0.05});
  const FitResult r = minimize(obj, 0.0, start, cfg);
  EXPECT_LT(r.objective, 1e-3 * r.pilot_objective);
  EXPECT_NEAR(r.b_hat, 0.4, 1e-3);
  EXPECT_NEAR(r.nu_hat.atom_mass(), 0.5, 0.05);
  EXPECT_DOUBLE_EQ(r.slack, 1.0 / 1000.0);
}

TEST(Minimize, SampleOverloadMatchesTabulated) {
  const SampleSet s = sample_increments(kGammaExample, 300, 3);
  FitConfig cfg;
  cfg.grid = FrequencyGrid(6.0, 0.1);
  cfg.max_iters = 60;
  const PilotEstimate p = project_pilot(s, PilotConfig{1.0, cfg.grid, -10.0, 10.0, 16});
  const FitResult a = minimize(s, p.b, p.nu, cfg);
  const FitResult b = minimize(FitObjective(s, cfg.grid, -10.0, 10.0, 16), p.b, p.nu, cfg);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.nu_hat, b.nu_hat);
  EXPECT_THROW(minimize(s, NAN, p.nu, cfg), std::invalid_argument);
}

TEST(JumpTailFunctional, GammaTruthIsE1) {
  const TruthModel t = truth_model(kGammaExample, -10.0, 10.0, 2000);
  EXPECT_NEAR(jump_tail_functional(t.model.nu_sigma, 1.0), testing::exponential_integral_e1(1.0),
              1e-4);
  EXPECT_NEAR(testing::exponential_integral_e1(1.0), 0.21938393439552, 1e-12);
  EXPECT_EQ(jump_tail_functional(t.model.nu_sigma, 10.0), 0.0);
  EXPECT_EQ(jump_tail_functional(t.model.nu_sigma, 25.0), 0.0);
  EXPECT_THROW(jump_tail_functional(t.model.nu_sigma, 0.0), std::invalid_argument);
}

TEST(FunctionalReport, OnePerThreshold) {
  FitResult r;
  r.nu_hat = GridMeasure(0.0, -4.0, 4.0, {0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0});
  const double a[] = {1.0, 2.0};
  const auto v = functional_report(r, a);
  ASSERT_EQ(v.size(), 2u);
  // int_a^4 x^{-2} dx = 1/a - 1/4.
  EXPECT_NEAR(v[0], 0.75, 1e-12);
  EXPECT_NEAR(v[1], 0.25, 1e-12);
}

TEST(HfBaseline, Examples) {
  EXPECT_EQ(hf_baseline(SampleSet({0.1, 0.5, 1.0}), 1.0), 0.0);
  EXPECT_DOUBLE_EQ(hf_baseline(SampleSet({0.1, 1.5, 2.0, -3.0}), 1.0), 0.5);
}

TEST(HfBaseline, GammaExampleMatchesConvolutionOracle) {
  const double oracle = testing::gaussian_plus_exponential_tail(1.0);
  // Closed form: P(Z > 1) + e^{-1/2} P(Z < 0).
  EXPECT_NEAR(oracle, 0.5 * std::erfc(1.0 / std::sqrt(2.0)) + 0.5 * std::exp(-0.5), 1e-10);
  const double n = 100000;
  const double p = hf_baseline(sample_increments(kGammaExample, static_cast<std::size_t>(n)), 1.0);
  EXPECT_NEAR(p, oracle, 4.0 * std::sqrt(oracle * (1 - oracle) / n));
}

TEST(FitResultJson, Fields) {
  FitResult r;
  r.b_hat = 0.9;
  r.objective = 0.2;
  r.iterations = 12;
  r.converged = true;
  const auto j = to_json(r);
  EXPECT_EQ(j.at("iterations").get<int>(), 12);
  EXPECT_TRUE(j.at("converged").get<bool>());
  EXPECT_EQ(grid_measure_from_json(j.at("nu_hat")), r.nu_hat);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"b_hat", "nu_hat", "objective", "pilot_objective",
                                            "iterations", "evaluations", "converged", "slack"}));
}

}  // namespace
}  // namespace levyfit
