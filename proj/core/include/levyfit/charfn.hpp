#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "levyfit/grid.hpp"
#include "levyfit/measure.hpp"

namespace levyfit {

using cplx = std::complex<double>;

// A function and its first two derivatives at one frequency.
struct CfTriple {
  cplx d0;
  cplx d1;
  cplx d2;

  const cplx& operator[](int k) const { return k == 0 ? d0 : (k == 1 ? d1 : d2); }
};

// Unit-time law described by its mean b and nu_sigma = sigma^2 delta_0 + x^2 nu(dx):
//   Psi(u) = iub + int (e^{iux} - 1 - iux) / x^2 nu_sigma(dx).
struct CharExponentModel {
  double b = 0.0;
  GridMeasure nu_sigma = GridMeasure::zero();
};

// Observed increments X_t - X_{t-1}.
class SampleSet {
 public:
  explicit SampleSet(std::vector<double> increments, std::uint64_t seed = 0);

  std::span<const double> increments() const noexcept { return increments_; }
  std::size_t size() const noexcept { return increments_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }
  double mean() const noexcept;

 private:
  std::vector<double> increments_;
  std::uint64_t seed_;
};

class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(const std::string& what, double u)
      : std::runtime_error(what), u_(u) {}
  double frequency() const noexcept { return u_; }

 private:
  double u_;
};

// Integration kernels of Psi, Psi' and Psi'' against nu_sigma(dx):
//   k0 = (e^{iux} - 1 - iux)/x^2, k1 = i(e^{iux} - 1)/x, k2 = -e^{iux},
// with the continuous extensions k0(u,0) = -u^2/2, k1(u,0) = -u, k2(u,0) = -1.
CfTriple exponent_kernels(double u, double x);

// (Psi, Psi', Psi'') at u.
CfTriple psi_derivatives(const CharExponentModel& model, double u);

// (phi, phi', phi'') from (Psi, Psi', Psi'') via phi = exp(Psi).
CfTriple cf_from_exponent(const CfTriple& psi);

// (phi, phi', phi'') at u.
CfTriple model_cf(const CharExponentModel& model, double u);

// k-th derivative of the empirical characteristic function,
// n^{-1} sum (i Z_t)^k e^{iuZ_t}, k in {0, 1, 2}.
cplx empirical_cf(const SampleSet& samples, double u, int k);
CfTriple empirical_cf_triple(const SampleSet& samples, double u);
std::vector<CfTriple> empirical_cf_table(const SampleSet& samples,
                                         std::span<const double> nodes);

using CfFunction = std::function<CfTriple(double)>;

// sum_{k=0}^{2} max_{u in grid} w(u) |f^(k)(u) - g^(k)(u)|.
// Throws NonFiniteError naming the first frequency with a non-finite value.
double d2_distance(const CfFunction& f, const CfFunction& g, const FrequencyGrid& grid);
double d2_distance(std::span<const CfTriple> f, std::span<const CfTriple> g,
                   const FrequencyGrid& grid);

// max_{u in grid} w(u) |sqrt(n) (phi_n^(k)(u) - phi^(k)(u))|: the weighted
// sup norm of the k-th derivative of the normalized CF process.
double cf_process_norm(const SampleSet& samples, const CharExponentModel& truth, int k,
                       const FrequencyGrid& grid);
double cf_process_norm(const SampleSet& samples, const CfFunction& truth_cf, int k,
                       const FrequencyGrid& grid);

// Per-bin integrals of the exponent kernels, tabulated on fixed nodes. Psi and
// its derivatives are linear in (b, atom, bin values), so a model on this layout
// is evaluated at every node with one dot product per node.
class KernelTable {
 public:
  KernelTable(std::span<const double> nodes, double support_lo, double support_hi,
              std::size_t bins);

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t bin_count() const noexcept { return bins_; }
  std::span<const double> nodes() const noexcept { return nodes_; }

  // (int_{bin j} k0, int k1, int k2) at node i.
  const CfTriple& kernel(std::size_t i, std::size_t j) const noexcept {
    return table_[i * bins_ + j];
  }

  // Contribution of a unit change in b or in the atom mass at node i.
  CfTriple drift_direction(std::size_t i) const noexcept;
  CfTriple atom_direction(std::size_t i) const noexcept;

  // (Psi, Psi', Psi'') at node i for a model with this layout.
  CfTriple exponent(std::size_t i, double b, double atom,
                    std::span<const double> bin_values) const;

 private:
  std::vector<double> nodes_;
  std::size_t bins_;
  std::vector<CfTriple> table_;
};

// CSV rows "u,re,im,k" for each grid node and each derivative order in ks.
void write_cf_csv(std::ostream& out, const FrequencyGrid& grid, const CfFunction& f,
                  std::span<const int> ks = std::span<const int>{});

}  // namespace levyfit
