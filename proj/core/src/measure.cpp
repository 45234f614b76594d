#include "levyfit/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "levyfit/quadrature.hpp"

namespace levyfit {

namespace {

void require_finite_nonnegative(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) {
    throw std::invalid_argument(std::string("GridMeasure: ") + what +
                                " must be finite and nonnegative");
  }
}

// int_a^b e^{iux} dx written as e^{iuc} * h * sinc(uh/2), which is stable
// for small u.
std::complex<double> box_transform(double a, double b, double u) {
  const double h = b - a;
  const double c = 0.5 * (a + b);
  const double t = 0.5 * u * h;
  const double sinc = std::abs(t) < 1e-4 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
  return std::polar(h * sinc, u * c);
}

}  // namespace

GridMeasure::GridMeasure(double atom_mass, double support_lo, double support_hi,
                         std::vector<double> bin_values)
    : atom_mass_(atom_mass), lo_(support_lo), hi_(support_hi), bins_(std::move(bin_values)) {
  require_finite_nonnegative(atom_mass_, "atom_mass");
  if (!std::isfinite(lo_) || !std::isfinite(hi_) || !(lo_ < 0.0) || !(hi_ > 0.0)) {
    throw std::invalid_argument("GridMeasure: support must satisfy lo < 0 < hi");
  }
  for (double v : bins_) require_finite_nonnegative(v, "bin values");
}

GridMeasure GridMeasure::zero(double support_lo, double support_hi, std::size_t bins) {
  return GridMeasure(0.0, support_lo, support_hi, std::vector<double>(bins, 0.0));
}

GridMeasure GridMeasure::point_mass(double mass, double support_lo, double support_hi,
                                    std::size_t bins) {
  return GridMeasure(mass, support_lo, support_hi, std::vector<double>(bins, 0.0));
}

double GridMeasure::bin_width() const noexcept {
  return bins_.empty() ? 0.0 : (hi_ - lo_) / static_cast<double>(bins_.size());
}

std::pair<double, double> GridMeasure::bin_edges(std::size_t j) const noexcept {
  const double w = bin_width();
  const double a = lo_ + w * static_cast<double>(j);
  const double b = j + 1 == bins_.size() ? hi_ : lo_ + w * static_cast<double>(j + 1);
  return {a, b};
}

double GridMeasure::bin_center(std::size_t j) const noexcept {
  const auto [a, b] = bin_edges(j);
  return 0.5 * (a + b);
}

double GridMeasure::continuous_mass() const noexcept {
  return std::accumulate(bins_.begin(), bins_.end(), 0.0) * bin_width();
}

double GridMeasure::total_mass() const noexcept { return atom_mass_ + continuous_mass(); }

double GridMeasure::density_at(double x) const noexcept {
  if (bins_.empty() || x < lo_ || x > hi_) return 0.0;
  auto j = static_cast<std::size_t>((x - lo_) / bin_width());
  return bins_[std::min(j, bins_.size() - 1)];
}

bool GridMeasure::same_layout(const GridMeasure& other) const noexcept {
  return lo_ == other.lo_ && hi_ == other.hi_ && bins_.size() == other.bins_.size();
}

GridMeasure GridMeasure::with_atom(double atom_mass) const {
  return GridMeasure(atom_mass, lo_, hi_, bins_);
}

GridMeasure GridMeasure::with_bins(std::vector<double> bin_values) const {
  if (bin_values.size() != bins_.size()) {
    throw std::invalid_argument("GridMeasure::with_bins: bin count mismatch");
  }
  return GridMeasure(atom_mass_, lo_, hi_, std::move(bin_values));
}

GridMeasure combine(double alpha, const GridMeasure& a, double beta, const GridMeasure& b) {
  if (!a.same_layout(b)) throw std::invalid_argument("combine: layouts differ");
  std::vector<double> bins(a.bin_count());
  for (std::size_t j = 0; j < bins.size(); ++j) {
    bins[j] = alpha * a.bins()[j] + beta * b.bins()[j];
  }
  return GridMeasure(alpha * a.atom_mass() + beta * b.atom_mass(), a.support_lo(),
                     a.support_hi(), std::move(bins));
}

std::complex<double> fourier_transform(const GridMeasure& m, double u) {
  std::complex<double> acc = m.atom_mass();
  for (std::size_t j = 0; j < m.bin_count(); ++j) {
    const double v = m.bins()[j];
    if (v == 0.0) continue;
    const auto [a, b] = m.bin_edges(j);
    acc += v * box_transform(a, b, u);
  }
  return acc;
}

double integrate(const GridMeasure& m, const std::function<double(double)>& f,
                 double zero_value, const IntegrationRule& rule) {
  const std::size_t panels = std::max<std::size_t>(rule.panels_per_bin, 1);
  auto checked = [&f](double x) {
    const double y = f(x);
    if (!std::isfinite(y)) {
      throw std::domain_error("integrate: integrand is not finite at x = " +
                              std::to_string(x));
    }
    return y;
  };
  double total = m.atom_mass() * zero_value;
  for (std::size_t j = 0; j < m.bin_count(); ++j) {
    const double v = m.bins()[j];
    if (v == 0.0) continue;
    const auto [a, b] = m.bin_edges(j);
    std::vector<double> cuts{a};
    for (double p : rule.breakpoints) {
      if (p > a && p < b) cuts.push_back(p);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double bin_integral = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      bin_integral += quad::gauss_legendre8(checked, cuts[k], cuts[k + 1], panels);
    }
    total += v * bin_integral;
  }
  return total;
}

double total_variation_distance(const GridMeasure& a, const GridMeasure& b) {
  std::vector<double> cuts;
  for (const GridMeasure* m : {&a, &b}) {
    for (std::size_t j = 0; j < m->bin_count(); ++j) {
      const auto [lo, hi] = m->bin_edges(j);
      cuts.push_back(lo);
      cuts.push_back(hi);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double tv = std::abs(a.atom_mass() - b.atom_mass());
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
    tv += std::abs(a.density_at(mid) - b.density_at(mid)) * (cuts[k + 1] - cuts[k]);
  }
  return tv;
}

double loss_ls_grid(const GridMeasure& a, const GridMeasure& b, const LossConfig& cfg) {
  if (!(cfg.s >= 0.0)) throw std::invalid_argument("loss_ls: s must be nonnegative");
  double sup = 0.0;
  for (double u : cfg.grid.nodes()) {
    const double diff = std::abs(fourier_transform(a, u) - fourier_transform(b, u));
    sup = std::max(sup, std::pow(1.0 + std::abs(u), -cfg.s) * diff);
  }
  return sup;
}

double loss_ls(const GridMeasure& a, const GridMeasure& b, const LossConfig& cfg) {
  double value = loss_ls_grid(a, b, cfg);
  if (cfg.s > 0.0) {
    const double tail =
        std::pow(1.0 + cfg.grid.u_max(), -cfg.s) * total_variation_distance(a, b);
    value = std::max(value, tail);
  }
  return value;
}

nlohmann::ordered_json to_json(const GridMeasure& m) {
  nlohmann::ordered_json j;
  j["atom_mass"] = m.atom_mass();
  j["support"] = {m.support_lo(), m.support_hi()};
  j["bins"] = std::vector<double>(m.bins().begin(), m.bins().end());
  return j;
}

GridMeasure grid_measure_from_json(const nlohmann::json& j) {
  const auto& support = j.at("support");
  if (!support.is_array() || support.size() != 2) {
    throw std::invalid_argument("GridMeasure JSON: support must be [lo, hi]");
  }
  return GridMeasure(j.at("atom_mass").get<double>(), support[0].get<double>(),
                     support[1].get<double>(), j.at("bins").get<std::vector<double>>());
}

}  // namespace levyfit
