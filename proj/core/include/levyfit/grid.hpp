#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace levyfit {

// w(u) = (log(e + |u|))^(-1/2 - delta). Equals 1 at u = 0 and decays
// logarithmically.
double log_weight(double u, double delta);

// Frequencies at which characteristic functions are compared, each paired
// with its log weight.
class FrequencyGrid {
 public:
  // Symmetric equispaced grid {-K*step, ..., 0, ..., K*step}, K = floor(u_max/step).
  explicit FrequencyGrid(double u_max = 20.0, double step = 0.05,
                         double delta = 0.25);

  // Arbitrary node set; must contain 0. Used for half-grids and tests.
  static FrequencyGrid from_nodes(std::vector<double> nodes, double delta = 0.25);

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  double u_max() const noexcept { return u_max_; }
  double step() const noexcept { return step_; }
  double delta() const noexcept { return delta_; }

  // Nodes u >= 0 only. Conjugate-symmetric functions attain the same
  // weighted maximum over this half as over the whole symmetric grid.
  FrequencyGrid nonnegative_half() const;

 private:
  struct Empty {};
  explicit FrequencyGrid(Empty) {}
  void fill_weights();

  double u_max_ = 0.0;
  double step_ = 0.0;
  double delta_ = 0.25;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

}  // namespace levyfit
