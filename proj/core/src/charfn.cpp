#include "levyfit/charfn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <string>

#include "levyfit/quadrature.hpp"

namespace levyfit {

namespace {

constexpr cplx kI{0.0, 1.0};
// Below this |ux| the kernels are summed as power series.
constexpr double kSeriesCutover = 0.5;
// Target phase advance (radians) of e^{iux} across one quadrature panel.
constexpr double kPanelPhase = 2.0;

// phi1(z) = (e^z - 1)/z and phi2(z) = (e^z - 1 - z)/z^2 for z = i*theta.
struct PhiFunctions {
  cplx phi1;
  cplx phi2;
};

PhiFunctions phi_functions(double theta, double c, double sn) {
  const cplx z{0.0, theta};
  if (std::abs(theta) < kSeriesCutover) {
    // phi1 = sum z^m/(m+1)!, phi2 = sum z^m/(m+2)!
    cplx p1{0.0, 0.0};
    cplx p2{0.0, 0.0};
    cplx zm{1.0, 0.0};
    double f1 = 1.0;  // (m+1)!
    double f2 = 2.0;  // (m+2)!
    for (int m = 0; m < 18; ++m) {
      p1 += zm / f1;
      p2 += zm / f2;
      zm *= z;
      f1 *= static_cast<double>(m + 2);
      f2 *= static_cast<double>(m + 3);
    }
    return {p1, p2};
  }
  // e^{i theta} - 1 without cancellation in the real part.
  const cplx em1{c - 1.0 > -0.5 ? -sn * sn / (1.0 + c) : c - 1.0, sn};
  return {em1 / z, (em1 - z) / (z * z)};
}

CfTriple bin_kernel_integral(double u, double a, double b) {
  const auto panels = static_cast<std::size_t>(
      std::max(1.0, std::ceil(std::abs(u) * (b - a) / kPanelPhase)));
  std::array<cplx, 3> acc{};
  const double width = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = a + width * (static_cast<double>(p) + 0.5);
    const double half = 0.5 * width;
    std::array<cplx, 3> panel{};
    for (std::size_t q = 0; q < quad::kGl8Nodes.size(); ++q) {
      const CfTriple k = exponent_kernels(u, mid + half * quad::kGl8Nodes[q]);
      const double w = quad::kGl8Weights[q];
      panel[0] += w * k.d0;
      panel[1] += w * k.d1;
      panel[2] += w * k.d2;
    }
    for (int m = 0; m < 3; ++m) acc[m] += half * panel[m];
  }
  return {acc[0], acc[1], acc[2]};
}

void check_order(int k) {
  if (k < 0 || k > 2) throw std::invalid_argument("derivative order must be 0, 1 or 2");
}

}  // namespace

SampleSet::SampleSet(std::vector<double> increments, std::uint64_t seed)
    : increments_(std::move(increments)), seed_(seed) {
  if (increments_.empty()) throw std::invalid_argument("SampleSet: need at least one increment");
  for (double z : increments_) {
    if (!std::isfinite(z)) throw std::invalid_argument("SampleSet: non-finite increment");
  }
}

double SampleSet::mean() const noexcept {
  double sum = 0.0;
  for (double z : increments_) sum += z;
  return sum / static_cast<double>(increments_.size());
}

CfTriple exponent_kernels(double u, double x) {
  const double theta = u * x;
  const double c = std::cos(theta);
  const double sn = std::sin(theta);
  const PhiFunctions phi = phi_functions(theta, c, sn);
  return {-u * u * phi.phi2, -u * phi.phi1, -cplx(c, sn)};
}

CfTriple psi_derivatives(const CharExponentModel& model, double u) {
  const GridMeasure& m = model.nu_sigma;
  const double atom = m.atom_mass();
  CfTriple psi{kI * u * model.b - 0.5 * atom * u * u, kI * model.b - atom * u, -atom};
  for (std::size_t j = 0; j < m.bin_count(); ++j) {
    const double v = m.bins()[j];
    if (v == 0.0) continue;
    const auto [a, b] = m.bin_edges(j);
    const CfTriple k = bin_kernel_integral(u, a, b);
    psi.d0 += v * k.d0;
    psi.d1 += v * k.d1;
    psi.d2 += v * k.d2;
  }
  return psi;
}

CfTriple cf_from_exponent(const CfTriple& psi) {
  const cplx phi = std::exp(psi.d0);
  return {phi, psi.d1 * phi, (psi.d2 + psi.d1 * psi.d1) * phi};
}

CfTriple model_cf(const CharExponentModel& model, double u) {
  return cf_from_exponent(psi_derivatives(model, u));
}

cplx empirical_cf(const SampleSet& samples, double u, int k) {
  check_order(k);
  return empirical_cf_triple(samples, u)[k];
}

CfTriple empirical_cf_triple(const SampleSet& samples, double u) {
  double c0 = 0.0, s0 = 0.0, c1 = 0.0, s1 = 0.0, c2 = 0.0, s2 = 0.0;
  for (double z : samples.increments()) {
    const double c = std::cos(u * z);
    const double s = std::sin(u * z);
    c0 += c;
    s0 += s;
    c1 += z * c;
    s1 += z * s;
    c2 += z * z * c;
    s2 += z * z * s;
  }
  const double inv = 1.0 / static_cast<double>(samples.size());
  // (iZ) e^{iuZ} = -Z sin + i Z cos;  (iZ)^2 e^{iuZ} = -Z^2 (cos + i sin)
  return {cplx{c0, s0} * inv, cplx{-s1, c1} * inv, cplx{-c2, -s2} * inv};
}

std::vector<CfTriple> empirical_cf_table(const SampleSet& samples,
                                         std::span<const double> nodes) {
  std::vector<CfTriple> out;
  out.reserve(nodes.size());
  for (double u : nodes) out.push_back(empirical_cf_triple(samples, u));
  return out;
}

double d2_distance(std::span<const CfTriple> f, std::span<const CfTriple> g,
                   const FrequencyGrid& grid) {
  if (f.size() != grid.size() || g.size() != grid.size()) {
    throw std::invalid_argument("d2_distance: table sizes do not match the grid");
  }
  std::array<double, 3> sup{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      const double diff = std::abs(f[i][k] - g[i][k]);
      if (!std::isfinite(diff)) {
        throw NonFiniteError("d2_distance: non-finite characteristic function at u = " +
                                 std::to_string(grid.nodes()[i]),
                             grid.nodes()[i]);
      }
      sup[k] = std::max(sup[k], grid.weights()[i] * diff);
    }
  }
  return sup[0] + sup[1] + sup[2];
}

double d2_distance(const CfFunction& f, const CfFunction& g, const FrequencyGrid& grid) {
  std::vector<CfTriple> fv, gv;
  fv.reserve(grid.size());
  gv.reserve(grid.size());
  for (double u : grid.nodes()) {
    fv.push_back(f(u));
    gv.push_back(g(u));
  }
  return d2_distance(fv, gv, grid);
}

double cf_process_norm(const SampleSet& samples, const CfFunction& truth_cf, int k,
                       const FrequencyGrid& grid) {
  check_order(k);
  const double root_n = std::sqrt(static_cast<double>(samples.size()));
  double sup = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double u = grid.nodes()[i];
    const cplx diff = empirical_cf(samples, u, k) - truth_cf(u)[k];
    sup = std::max(sup, grid.weights()[i] * root_n * std::abs(diff));
  }
  return sup;
}

double cf_process_norm(const SampleSet& samples, const CharExponentModel& truth, int k,
                       const FrequencyGrid& grid) {
  return cf_process_norm(
      samples, [&truth](double u) { return model_cf(truth, u); }, k, grid);
}

KernelTable::KernelTable(std::span<const double> nodes, double support_lo,
                         double support_hi, std::size_t bins)
    : nodes_(nodes.begin(), nodes.end()), bins_(bins) {
  // Validates the layout.
  const GridMeasure layout = GridMeasure::zero(support_lo, support_hi, bins);
  table_.resize(nodes_.size() * bins_);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::size_t j = 0; j < bins_; ++j) {
      const auto [a, b] = layout.bin_edges(j);
      table_[i * bins_ + j] = bin_kernel_integral(nodes_[i], a, b);
    }
  }
}

CfTriple KernelTable::drift_direction(std::size_t i) const noexcept {
  return {kI * nodes_[i], kI, 0.0};
}

CfTriple KernelTable::atom_direction(std::size_t i) const noexcept {
  const double u = nodes_[i];
  return {-0.5 * u * u, -u, -1.0};
}

CfTriple KernelTable::exponent(std::size_t i, double b, double atom,
                               std::span<const double> bin_values) const {
  if (bin_values.size() != bins_) {
    throw std::invalid_argument("KernelTable::exponent: bin count mismatch");
  }
  const CfTriple drift = drift_direction(i);
  const CfTriple at = atom_direction(i);
  CfTriple psi{b * drift.d0 + atom * at.d0, b * drift.d1 + atom * at.d1, atom * at.d2};
  for (std::size_t j = 0; j < bins_; ++j) {
    const CfTriple& k = kernel(i, j);
    psi.d0 += bin_values[j] * k.d0;
    psi.d1 += bin_values[j] * k.d1;
    psi.d2 += bin_values[j] * k.d2;
  }
  return psi;
}

void write_cf_csv(std::ostream& out, const FrequencyGrid& grid, const CfFunction& f,
                  std::span<const int> ks) {
  static constexpr std::array<int, 3> kAll{0, 1, 2};
  if (ks.empty()) ks = kAll;
  out << "u,re,im,k\n";
  out.precision(17);
  for (double u : grid.nodes()) {
    const CfTriple t = f(u);
    for (int k : ks) {
      check_order(k);
      out << u << ',' << t[k].real() << ',' << t[k].imag() << ',' << k << '\n';
    }
  }
}

}  // namespace levyfit
