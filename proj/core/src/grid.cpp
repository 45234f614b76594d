#include "levyfit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace levyfit {

double log_weight(double u, double delta) {
  return std::pow(std::log(std::numbers::e + std::abs(u)), -0.5 - delta);
}

FrequencyGrid::FrequencyGrid(double u_max, double step, double delta)
    : u_max_(u_max), step_(step), delta_(delta) {
  if (!(u_max > 0.0) || !(step > 0.0) || !std::isfinite(u_max) || !std::isfinite(step)) {
    throw std::invalid_argument("FrequencyGrid: u_max and step must be positive and finite");
  }
  if (!(delta > 0.0)) {
    throw std::invalid_argument("FrequencyGrid: delta must be positive");
  }
  const auto half = static_cast<long>(std::floor(u_max / step + 1e-9));
  nodes_.reserve(static_cast<std::size_t>(2 * half + 1));
  for (long k = -half; k <= half; ++k) {
    nodes_.push_back(static_cast<double>(k) * step);
  }
  fill_weights();
}

FrequencyGrid FrequencyGrid::from_nodes(std::vector<double> nodes, double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("FrequencyGrid: delta must be positive");
  }
  if (std::find(nodes.begin(), nodes.end(), 0.0) == nodes.end()) {
    throw std::invalid_argument("FrequencyGrid: node set must contain 0");
  }
  FrequencyGrid grid{Empty{}};
  for (double u : nodes) {
    if (!std::isfinite(u)) throw std::invalid_argument("FrequencyGrid: non-finite node");
    grid.u_max_ = std::max(grid.u_max_, std::abs(u));
  }
  std::sort(nodes.begin(), nodes.end());
  grid.step_ = nodes.size() > 1 ? (nodes.back() - nodes.front()) /
                                      static_cast<double>(nodes.size() - 1)
                                : 0.0;
  grid.delta_ = delta;
  grid.nodes_ = std::move(nodes);
  grid.fill_weights();
  return grid;
}

FrequencyGrid FrequencyGrid::nonnegative_half() const {
  std::vector<double> half;
  std::copy_if(nodes_.begin(), nodes_.end(), std::back_inserter(half),
               [](double u) { return u >= 0.0; });
  FrequencyGrid grid = from_nodes(std::move(half), delta_);
  grid.step_ = step_;
  return grid;
}

void FrequencyGrid::fill_weights() {
  weights_.resize(nodes_.size());
  std::transform(nodes_.begin(), nodes_.end(), weights_.begin(),
                 [this](double u) { return log_weight(u, delta_); });
}

}  // namespace levyfit
