#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "levyfit/grid.hpp"

namespace levyfit {

// Finite nonnegative Borel measure on [lo, hi]: a point mass at zero plus a
// piecewise-constant density on equal-width bins. This is the
// representation used for nu_sigma = sigma^2 delta_0 + x^2 nu(dx).
class GridMeasure {
 public:
  GridMeasure(double atom_mass, double support_lo, double support_hi,
              std::vector<double> bin_values);

  static GridMeasure zero(double support_lo = -10.0, double support_hi = 10.0,
                          std::size_t bins = 16);
  static GridMeasure point_mass(double mass, double support_lo = -10.0,
                                double support_hi = 10.0, std::size_t bins = 0);

  double atom_mass() const noexcept { return atom_mass_; }
  double support_lo() const noexcept { return lo_; }
  double support_hi() const noexcept { return hi_; }
  std::span<const double> bins() const noexcept { return bins_; }
  std::size_t bin_count() const noexcept { return bins_.size(); }
  double bin_width() const noexcept;
  std::pair<double, double> bin_edges(std::size_t j) const noexcept;
  double bin_center(std::size_t j) const noexcept;

  // Atom plus integral of the density.
  double total_mass() const noexcept;
  // Mass of the absolutely continuous part only.
  double continuous_mass() const noexcept;
  // Density at x (0 outside the support); the atom is not included.
  double density_at(double x) const noexcept;

  bool same_layout(const GridMeasure& other) const noexcept;

  GridMeasure with_atom(double atom_mass) const;
  GridMeasure with_bins(std::vector<double> bin_values) const;

  friend bool operator==(const GridMeasure&, const GridMeasure&) = default;

 private:
  double atom_mass_;
  double lo_;
  double hi_;
  std::vector<double> bins_;
};

// alpha*a + beta*b for measures on the same layout (alpha, beta >= 0).
GridMeasure combine(double alpha, const GridMeasure& a, double beta,
                    const GridMeasure& b);

// F m(u) = int e^{iux} m(dx), exact per bin.
std::complex<double> fourier_transform(const GridMeasure& m, double u);

struct IntegrationRule {
  // Gauss-Legendre panels per bin (8 nodes each).
  std::size_t panels_per_bin = 1;
  // Extra split points, e.g. discontinuities of the integrand.
  std::vector<double> breakpoints;
};

// atom_mass * zero_value + sum_j value_j * int_{bin_j} f(x) dx.
// Throws std::domain_error if f returns a non-finite value.
double integrate(const GridMeasure& m, const std::function<double(double)>& f,
                 double zero_value, const IntegrationRule& rule = {});

// |a - b| total variation, exact for piecewise-constant densities on any
// pair of layouts.
double total_variation_distance(const GridMeasure& a, const GridMeasure& b);

struct LossConfig {
  double s = 1.0;
  FrequencyGrid grid;
};

// Dual-smoothness loss sup_u (1+|u|)^{-s} |F(a-b)(u)| on the grid. For s > 0
// the value is raised to at least (1+U_max)^{-s} |a-b|_TV, which bounds the
// weighted transform beyond the grid.
double loss_ls(const GridMeasure& a, const GridMeasure& b, const LossConfig& cfg);

// Grid part of loss_ls only, without the tail bound.
double loss_ls_grid(const GridMeasure& a, const GridMeasure& b, const LossConfig& cfg);

// {"atom_mass": ..., "support": [lo, hi], "bins": [...]}
nlohmann::ordered_json to_json(const GridMeasure& m);
GridMeasure grid_measure_from_json(const nlohmann::json& j);

}  // namespace levyfit
