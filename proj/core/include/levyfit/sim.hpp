#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "levyfit/charfn.hpp"

namespace levyfit {

enum class ModelKind {
  brownian_gamma,
  compound_poisson_gaussian_jumps,
  bilateral_gamma,
  pure_gaussian,
  normal_inverse_gaussian,
};

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

// Mean b, Brownian part sigma, Gamma subordinator with Levy density
// shape * x^{-1} e^{-rate x} on x > 0. Defaults: N(0,1) * Exp(1) shifted to mean 1.
struct BrownianGammaParams {
  double b = 1.0;
  double sigma = 1.0;
  double shape = 1.0;
  double rate = 1.0;
};

// Mean b, Brownian part sigma, Poisson(intensity) many N(jump_mean, jump_variance)
// jumps per unit time. |phi| stays bounded below, i.e. polynomial decay of order 0.
struct CompoundPoissonParams {
  double b = 0.5;
  double sigma = 0.0;
  double intensity = 1.0;
  double jump_mean = 0.5;
  double jump_variance = 0.25;
};

// X - Y with X, Y independent Gamma(shape beta/2, rate gamma);
// phi(u) = (1 + u^2/gamma^2)^{-beta/2}.
struct BilateralGammaParams {
  double gamma = 1.0;
  double beta = 1.0;
};

struct PureGaussianParams {
  double b = 0.0;
  double sigma = 1.0;
};

// Normal inverse Gaussian NIG(alpha, skew, delta, location); |phi| decays like
// e^{-delta |u|}.
struct NigParams {
  double alpha = 1.0;
  double skew = 0.0;
  double delta = 1.0;
  double location = 0.0;
};

using ModelParams = std::variant<BrownianGammaParams, CompoundPoissonParams,
                                 BilateralGammaParams, PureGaussianParams, NigParams>;

struct ModelSpec {
  ModelParams params = BrownianGammaParams{};
  std::uint64_t seed = 0;

  ModelKind kind() const noexcept;
  // Throws std::invalid_argument on non-positive rates/scales or negative sigma.
  void validate() const;

  static ModelSpec defaults(ModelKind kind, std::uint64_t seed = 0);
};

// n i.i.d. unit-time increments. The random stream is (spec.seed, replication),
// so replication r of a study is reproducible on its own.
SampleSet sample_increments(const ModelSpec& spec, std::size_t n,
                            std::uint64_t replication = 0);

// (Psi, Psi', Psi'') in closed form.
CfTriple exact_exponent(const ModelSpec& spec, double u);
CfTriple exact_cf(const ModelSpec& spec, double u);

double model_mean(const ModelSpec& spec);
// Var(X_1) = nu_sigma(R).
double model_variance(const ModelSpec& spec);
// Levy density nu(x) at x != 0 (0 for models without jumps).
double levy_density(const ModelSpec& spec, double x);

struct TruthModel {
  CharExponentModel model;
  // int x^2 nu(dx) outside the support.
  double truncated_mass = 0.0;
  // nu_sigma(R) of the untruncated model.
  double exact_total_mass = 0.0;

  bool truncation_warning() const noexcept {
    return truncated_mass > 1e-4 * exact_total_mass;
  }
};

// nu_sigma on [lo, hi] with `bins` equal bins. Bin values are cell averages of
// x^2 nu(x) with a second-order correction (avg - second difference / 12), so
// that integrals against smooth kernels are accurate to O(h^4) away from kinks;
// negative corrected values are moved into the neighbouring bin.
TruthModel truth_model(const ModelSpec& spec, double support_lo, double support_hi,
                       std::size_t bins);

nlohmann::ordered_json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);

}  // namespace levyfit
