#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "levyfit/measure.hpp"
#include "levyfit/sim.hpp"
#include "oracles.hpp"

namespace levyfit {
namespace {

using testing::fourier_transform_by_quadrature;

GridMeasure example_measure() { return GridMeasure(0.5, -2.0, 3.0, {0.1, 0.0, 0.3, 0.2, 0.05}); }

// Discretized x e^{-x} on (0, 40] plus a unit atom.
GridMeasure gamma_part_with_atom() {
  const ModelSpec spec = ModelSpec::defaults(ModelKind::brownian_gamma);
  return truth_model(spec, -1.0, 40.0, 4100).model.nu_sigma;
}

TEST(GridMeasure, Validation) {
  EXPECT_THROW(GridMeasure(-1.0, -1.0, 1.0, {}), std::invalid_argument);
  EXPECT_THROW(GridMeasure(0.0, 0.5, 1.0, {1.0}), std::invalid_argument);
  EXPECT_THROW(GridMeasure(0.0, -1.0, 1.0, {1.0, -0.1}), std::invalid_argument);
  EXPECT_THROW(GridMeasure(NAN, -1.0, 1.0, {}), std::invalid_argument);
  EXPECT_THROW(GridMeasure(0.0, -1.0, 1.0, {INFINITY}), std::invalid_argument);
}

TEST(GridMeasure, MassesAndLayout) {
  const GridMeasure m = example_measure();
  EXPECT_DOUBLE_EQ(m.bin_width(), 1.0);
  EXPECT_NEAR(m.continuous_mass(), 0.65, 1e-15);
  EXPECT_NEAR(m.total_mass(), 1.15, 1e-15);
  EXPECT_EQ(m.bin_edges(2), std::make_pair(0.0, 1.0));
  EXPECT_DOUBLE_EQ(m.bin_center(0), -1.5);
  EXPECT_DOUBLE_EQ(m.density_at(0.5), 0.3);
  EXPECT_DOUBLE_EQ(m.density_at(5.0), 0.0);
  EXPECT_TRUE(m.same_layout(m.with_atom(2.0)));
  EXPECT_FALSE(m.same_layout(GridMeasure::zero()));
}

TEST(Combine, LinearInBothArguments) {
  const GridMeasure a = example_measure();
  const GridMeasure b = a.with_bins({1.0, 1.0, 1.0, 1.0, 1.0}).with_atom(0.0);
  const GridMeasure c = combine(2.0, a, 0.5, b);
  EXPECT_DOUBLE_EQ(c.atom_mass(), 1.0);
  EXPECT_DOUBLE_EQ(c.bins()[1], 0.5);
  EXPECT_THROW(combine(1.0, a, 1.0, GridMeasure::zero()), std::invalid_argument);
}

TEST(FourierTransform, PointMassIsConstant) {
  const GridMeasure atom = GridMeasure::point_mass(1.0);
  const auto v = fourier_transform(atom, 3.7);
  EXPECT_DOUBLE_EQ(v.real(), 1.0);
  EXPECT_DOUBLE_EQ(v.imag(), 0.0);
}

TEST(FourierTransform, ZeroFrequencyIsTotalMass) {
  const GridMeasure m = example_measure();
  EXPECT_NEAR(std::abs(fourier_transform(m, 0.0) - m.total_mass()), 0.0, 1e-15);
}

TEST(FourierTransform, MatchesQuadrature) {
  const GridMeasure m = example_measure();
  for (double u : {0.001, 0.3, 2.5, 17.0, -9.1}) {
    EXPECT_NEAR(std::abs(fourier_transform(m, u) - fourier_transform_by_quadrature(m, u)), 0.0,
                1e-11)
        << "u = " << u;
  }
}

TEST(FourierTransform, GammaPartWithAtom) {
  // 1 + (1 - iu)^{-2} at u = 1.
  const std::complex<double> expected = 1.0 + 1.0 / std::pow(std::complex<double>(1.0, -1.0), 2);
  EXPECT_NEAR(std::abs(fourier_transform(gamma_part_with_atom(), 1.0) - expected), 0.0, 1e-6);
}

TEST(Integrate, Examples) {
  const GridMeasure m = example_measure();
  EXPECT_NEAR(integrate(m, [](double) { return 1.0; }, 1.0), m.total_mass(), 1e-14);
  EXPECT_DOUBLE_EQ(integrate(GridMeasure::point_mass(1.0), [](double x) { return x * x; }, 0.0),
                   0.0);
  // int x over the bins: sum value_j * (hi^2 - lo^2)/2.
  const double first = 0.1 * (1.0 - 4.0) / 2 + 0.3 * 0.5 + 0.2 * 1.5 + 0.05 * 2.5;
  EXPECT_NEAR(integrate(m, [](double x) { return x; }, 0.0), first, 1e-14);
}

TEST(Integrate, JumpTailOfGammaPart) {
  IntegrationRule rule;
  rule.breakpoints = {1.0};
  const double tail = integrate(
      gamma_part_with_atom(), [](double x) { return x >= 1.0 ? 1.0 / (x * x) : 0.0; }, 0.0, rule);
  EXPECT_NEAR(tail, testing::exponential_integral_e1(1.0), 1e-5);
}

TEST(Integrate, RejectsNonFiniteIntegrand) {
  EXPECT_THROW(integrate(example_measure(), [](double x) { return 1.0 / (x - x); }, 0.0),
               std::domain_error);
}

TEST(TotalVariation, AcrossLayouts) {
  const GridMeasure a(1.0, -1.0, 1.0, {1.0, 1.0});
  const GridMeasure b(0.5, -2.0, 2.0, {0.0, 1.0, 0.0, 0.0});
  // atoms 0.5, [-1,0]: 0, [0,1]: 1, [-2,-1] and [1,2]: 0.
  EXPECT_NEAR(total_variation_distance(a, b), 1.5, 1e-15);
  EXPECT_DOUBLE_EQ(total_variation_distance(a, a), 0.0);
}

TEST(LossLs, Examples) {
  const LossConfig flat{0.0, FrequencyGrid(20.0, 0.05)};
  const GridMeasure a = example_measure();
  EXPECT_DOUBLE_EQ(loss_ls(a, a, flat), 0.0);
  EXPECT_NEAR(loss_ls(GridMeasure::point_mass(1.0), GridMeasure::point_mass(0.4), flat), 0.6,
              1e-15);
  EXPECT_THROW(loss_ls(a, a, LossConfig{-1.0, FrequencyGrid()}), std::invalid_argument);
}

TEST(LossLs, AtomAgainstNarrowUniform) {
  // Unit mass uniform on [0.99, 1.01]: bin 100 of 101 on [-1.01, 1.01].
  std::vector<double> bins(101, 0.0);
  bins[100] = 50.0;
  const GridMeasure narrow(0.0, -1.01, 1.01, bins);
  const GridMeasure atom = GridMeasure::point_mass(1.0, -1.01, 1.01, 101);
  ASSERT_NEAR(narrow.total_mass(), 1.0, 1e-12);

  // Brute force over u in [-200, 200], step 1e-3.
  double oracle = 0.0;
  for (long i = -200000; i <= 200000; ++i) {
    const double u = 1e-3 * static_cast<double>(i);
    const double sinc = u == 0.0 ? 1.0 : std::sin(0.01 * u) / (0.01 * u);
    const double diff = std::abs(1.0 - std::polar(1.0, u) * sinc);
    oracle = std::max(oracle, diff / (1.0 + std::abs(u)));
  }
  const LossConfig cfg{1.0, FrequencyGrid(200.0, 0.01)};
  EXPECT_NEAR(loss_ls(atom, narrow, cfg), oracle, 1e-5);
}

TEST(LossLs, FlatLossBoundedByTotalVariation) {
  const GridMeasure a = example_measure();
  const GridMeasure b(0.2, -1.0, 4.0, {0.3, 0.3, 0.0, 0.1});
  EXPECT_LE(loss_ls(a, b, LossConfig{0.0, FrequencyGrid(30.0, 0.1)}),
            total_variation_distance(a, b) + 1e-14);
}

TEST(GridMeasureJson, MatchesGoldenFile) {
  std::ifstream in(std::string(LEVYFIT_TEST_DATA_DIR) + "/grid_measure.json");
  ASSERT_TRUE(in);
  const auto golden = nlohmann::ordered_json::parse(in);
  EXPECT_EQ(to_json(example_measure()), golden);
  EXPECT_EQ(grid_measure_from_json(golden), example_measure());
}

TEST(GridMeasureJson, RejectsMalformed) {
  EXPECT_THROW(grid_measure_from_json(nlohmann::json::parse(R"({"atom_mass":1,"support":[1],"bins":[]})")),
               std::invalid_argument);
  EXPECT_THROW(grid_measure_from_json(nlohmann::json::parse(R"({"support":[-1,1],"bins":[]})")),
               nlohmann::json::exception);
}

}  // namespace
}  // namespace levyfit
