#include <gtest/gtest.h>

#include <cmath>

#include "levyfit/experiment.hpp"
#include "levyfit/pilot.hpp"
#include "levyfit/sim.hpp"

namespace levyfit {
namespace {

const ModelSpec kGammaExample = ModelSpec::defaults(ModelKind::brownian_gamma, 20080601);

TEST(PilotMean, Examples) {
  EXPECT_DOUBLE_EQ(pilot_mean(SampleSet({1.0, 2.0, 3.0})), 2.0);
  EXPECT_DOUBLE_EQ(pilot_mean(SampleSet(std::vector<double>(7, -0.25))), -0.25);
}

TEST(PilotConfig, Validation) {
  PilotConfig pc;
  pc.kappa = 0.0;
  EXPECT_THROW(pc.validate(), std::invalid_argument);
  pc = PilotConfig{};
  pc.support_lo = 1.0;
  EXPECT_THROW(pc.validate(), std::invalid_argument);
  pc = PilotConfig{};
  pc.bins = 0;
  EXPECT_THROW(pc.validate(), std::invalid_argument);
}

TEST(PilotFnu, ZeroBelowThreshold) {
  const CfTriple small{cplx(0.01, 0.0), cplx(0.0, 0.1), cplx(-0.2, 0.0)};
  EXPECT_EQ(pilot_fnu(small, 100.0, 1.0), cplx(0.0, 0.0));
  EXPECT_NE(pilot_fnu(small, 100000.0, 1.0), cplx(0.0, 0.0));
}

TEST(PilotFnu, ExactTripleGivesMinusPsiSecond) {
  const CharExponentModel m{0.3, GridMeasure(0.5, -2.0, 2.0, {0.1, 0.4, 0.2, 0.0})};
  for (double u : {0.0, 0.8, 2.5}) {
    const cplx got = pilot_fnu(model_cf(m, u), 1e12, 1.0);
    EXPECT_NEAR(std::abs(got + psi_derivatives(m, u).d2), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(got - fourier_transform(m.nu_sigma, u)), 0.0, 1e-12);
  }
}

TEST(PilotFnu, AtZeroIsSampleVariance) {
  const SampleSet s({0.3, -1.2, 2.0, 0.7, 5.1});
  const double mean = s.mean();
  double m2 = 0.0;
  for (double z : s.increments()) m2 += (z - mean) * (z - mean);
  m2 /= static_cast<double>(s.size());
  const cplx got = pilot_fnu(s, PilotConfig{}, 0.0);
  EXPECT_NEAR(got.real(), m2, 1e-13);
  EXPECT_NEAR(got.imag(), 0.0, 1e-13);
}

TEST(PilotFnu, GammaExampleErrorWithinDeviationBound) {
  // Deviation scale n^{-1/2} / |phi(1)| * (1 + |Psi'(1)|^2), Psi'(1) = -1.5 + 0.5i.
  // The constant in front is not explicit, so the median error measured in units
  // of this scale must be the same O(1) number at both sizes.
  const cplx target = 1.0 + 1.0 / (cplx(1.0, -1.0) * cplx(1.0, -1.0));
  const double phi1 = std::exp(-0.5) / std::sqrt(2.0);
  auto scaled_median = [&](double n) {
    const double scale = 1.0 / std::sqrt(n) / phi1 * (1.0 + 2.5);
    std::vector<double> errors;
    for (std::uint64_t r = 0; r < 100; ++r) {
      const SampleSet s = sample_increments(kGammaExample, static_cast<std::size_t>(n), r);
      errors.push_back(std::abs(pilot_fnu(s, PilotConfig{}, 1.0) - target));
    }
    return median(errors) / scale;
  };
  const double small = scaled_median(2500);
  const double large = scaled_median(10000);
  EXPECT_GT(large / small, 1.0 / 1.5);
  EXPECT_LT(large / small, 1.5);
  // Monte Carlo baseline for the constant.
  EXPECT_NEAR(large, 1.71, 0.15);
}

TEST(ProjectSpectrum, RecoversOwnBins) {
  PilotConfig pc;
  pc.support_lo = -4.0;
  pc.support_hi = 4.0;
  pc.bins = 8;
  const GridMeasure nu(0.0, -4.0, 4.0, {0.0, 0.05, 0.1, 0.4, 0.3, 0.2, 0.1, 0.02});
  std::vector<cplx> spectrum;
  for (double u : pc.grid.nodes()) spectrum.push_back(fourier_transform(nu, u));
  const PilotEstimate est = project_spectrum(spectrum, std::vector<bool>(spectrum.size(), true), pc);
  EXPECT_EQ(est.nu.atom_mass(), 0.0);
  for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(est.nu.bins()[j], nu.bins()[j], 1e-6);
}

TEST(ProjectSpectrum, ClipsNegativeBins) {
  PilotConfig pc;
  pc.support_lo = -2.0;
  pc.support_hi = 2.0;
  pc.bins = 4;
  // Spectrum of a signed measure with a negative bin.
  const auto width = 1.0;
  std::vector<cplx> spectrum;
  for (double u : pc.grid.nodes()) {
    const double c = u == 0.0 ? 1.0 : std::sin(u * width / 2) / (u * width / 2);
    spectrum.push_back(c * (std::polar(1.0, -1.5 * u) * 1.0 - std::polar(1.0, 0.5 * u) * 0.5));
  }
  const PilotEstimate est = project_spectrum(spectrum, std::vector<bool>(spectrum.size(), true), pc);
  EXPECT_NEAR(est.nu.bins()[0], 1.0, 1e-6);
  EXPECT_EQ(est.nu.bins()[2], 0.0);
}

TEST(ProjectPilot, PureGaussianPushesMassNextToZero) {
  PilotConfig pc;
  const SampleSet s = sample_increments(ModelSpec::defaults(ModelKind::pure_gaussian, 4), 100000);
  EXPECT_NEAR(pilot_fnu(s, pc, 0.5).real(), 1.0, 0.05);
  EXPECT_NEAR(pilot_fnu(s, pc, 1.5).real(), 1.0, 0.1);
  const PilotEstimate est = project_pilot(s, pc);
  EXPECT_EQ(est.nu.atom_mass(), 0.0);
  const auto bins = est.nu.bins();
  const double central = bins[7] + bins[8];
  for (std::size_t j = 0; j + 1 < bins.size(); ++j) {
    if (j == 7) continue;
    EXPECT_LT(bins[j] + bins[j + 1], central);
  }
}

TEST(ProjectPilot, GammaExampleLargeAroundZero) {
  // In most samples the two bins next to zero carry more than any other adjacent pair.
  PilotConfig pc;
  int large = 0;
  for (std::uint64_t r = 0; r < 25; ++r) {
    const PilotEstimate est = project_pilot(sample_increments(kGammaExample, 1000, r), pc);
    const auto bins = est.nu.bins();
    const double central = bins[7] + bins[8];
    bool biggest = true;
    for (std::size_t j = 0; j + 1 < bins.size(); ++j) {
      if (j != 7 && bins[j] + bins[j + 1] >= central) biggest = false;
    }
    large += biggest ? 1 : 0;
  }
  EXPECT_GE(large, 13);
}

TEST(PilotEstimateJson, Fields) {
  const PilotEstimate est = project_pilot(sample_increments(kGammaExample, 200), PilotConfig{});
  const auto j = to_json(est);
  EXPECT_DOUBLE_EQ(j.at("b").get<double>(), est.b);
  EXPECT_EQ(grid_measure_from_json(j.at("nu")), est.nu);
  EXPECT_EQ(j.at("ridge_used").get<bool>(), est.ridge_used);
  EXPECT_EQ(est.fnu.size(), PilotConfig{}.grid.size());
}

}  // namespace
}  // namespace levyfit
