#include "levyfit/pilot.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace levyfit {

namespace {

// int_a^b e^{iux} dx, same closed form as fourier_transform uses per bin.
std::complex<double> box_transform(double a, double b, double u) {
  const double h = b - a;
  const double t = 0.5 * u * h;
  const double sinc = std::abs(t) < 1e-4 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
  return std::polar(h * sinc, 0.5 * u * (a + b));
}

}  // namespace

void PilotConfig::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw std::invalid_argument("PilotConfig: kappa must be positive");
  }
  if (bins == 0) throw std::invalid_argument("PilotConfig: need at least one bin");
  (void)GridMeasure::zero(support_lo, support_hi, bins);
}

double pilot_mean(const SampleSet& samples) { return samples.mean(); }

std::complex<double> pilot_fnu(const CfTriple& empirical, double n, double kappa) {
  if (std::abs(empirical.d0) < kappa / std::sqrt(n)) return {0.0, 0.0};
  const std::complex<double> ratio1 = empirical.d1 / empirical.d0;
  return ratio1 * ratio1 - empirical.d2 / empirical.d0;
}

std::complex<double> pilot_fnu(const SampleSet& samples, const PilotConfig& cfg, double u) {
  cfg.validate();
  return pilot_fnu(empirical_cf_triple(samples, u), static_cast<double>(samples.size()),
                   cfg.kappa);
}

PilotEstimate project_spectrum(std::span<const std::complex<double>> target,
                               const std::vector<bool>& active, const PilotConfig& cfg) {
  cfg.validate();
  const FrequencyGrid& grid = cfg.grid;
  if (target.size() != grid.size() || active.size() != grid.size()) {
    throw std::invalid_argument("project_spectrum: spectrum does not match the grid");
  }
  const GridMeasure layout = GridMeasure::zero(cfg.support_lo, cfg.support_hi, cfg.bins);
  const auto nb = static_cast<Eigen::Index>(cfg.bins);

  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(nb, nb);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nb);
  std::vector<std::complex<double>> basis(cfg.bins);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!active[i]) continue;
    const double u = grid.nodes()[i];
    const double w2 = grid.weights()[i] * grid.weights()[i];
    for (std::size_t j = 0; j < cfg.bins; ++j) {
      const auto [a, b] = layout.bin_edges(j);
      basis[j] = box_transform(a, b, u);
    }
    for (Eigen::Index j = 0; j < nb; ++j) {
      const auto bj = std::conj(basis[static_cast<std::size_t>(j)]);
      rhs(j) += w2 * std::real(bj * target[i]);
      for (Eigen::Index k = j; k < nb; ++k) {
        normal(j, k) += w2 * std::real(bj * basis[static_cast<std::size_t>(k)]);
      }
    }
  }
  normal.triangularView<Eigen::StrictlyLower>() = normal.transpose();

  PilotEstimate est;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  const double max_diag = normal.diagonal().maxCoeff();
  if (ldlt.info() != Eigen::Success || !(max_diag > 0.0) || ldlt.rcond() < 1e-13) {
    est.ridge_used = true;
    const double ridge = 1e-8 * (max_diag > 0.0 ? max_diag : 1.0);
    normal.diagonal().array() += ridge;
    ldlt.compute(normal);
  }
  const Eigen::VectorXd solution = ldlt.solve(rhs);

  std::vector<double> values(cfg.bins);
  for (std::size_t j = 0; j < cfg.bins; ++j) {
    const double v = solution(static_cast<Eigen::Index>(j));
    values[j] = std::isfinite(v) ? std::max(v, 0.0) : 0.0;
  }
  est.nu = GridMeasure(0.0, cfg.support_lo, cfg.support_hi, std::move(values));
  est.fnu.assign(target.begin(), target.end());
  est.active = active;
  return est;
}

PilotEstimate project_pilot(const SampleSet& samples, const PilotConfig& cfg) {
  cfg.validate();
  const double n = static_cast<double>(samples.size());
  std::vector<std::complex<double>> spectrum(cfg.grid.size());
  std::vector<bool> active(cfg.grid.size());
  for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
    const CfTriple t = empirical_cf_triple(samples, cfg.grid.nodes()[i]);
    active[i] = std::abs(t.d0) >= cfg.kappa / std::sqrt(n);
    spectrum[i] = pilot_fnu(t, n, cfg.kappa);
  }
  PilotEstimate est = project_spectrum(spectrum, active, cfg);
  est.b = pilot_mean(samples);
  return est;
}

nlohmann::ordered_json to_json(const PilotEstimate& pilot) {
  nlohmann::ordered_json j;
  j["b"] = pilot.b;
  j["nu"] = to_json(pilot.nu);
  j["ridge_used"] = pilot.ridge_used;
  return j;
}

}  // namespace levyfit
