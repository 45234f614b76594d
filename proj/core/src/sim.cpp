#include "levyfit/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "levyfit/quadrature.hpp"
#include "levyfit/rng.hpp"

namespace levyfit {

namespace {

constexpr cplx kI{0.0, 1.0};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw std::invalid_argument(std::string("ModelSpec: ") + name + " must be positive");
  }
}

void require_nonnegative(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    throw std::invalid_argument(std::string("ModelSpec: ") + name + " must be nonnegative");
  }
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("ModelSpec: ") + name + " must be finite");
  }
}

double nig_gamma(const NigParams& p) {
  return std::sqrt(p.alpha * p.alpha - p.skew * p.skew);
}

// Inverse Gaussian IG(mean, shape) by Michael, Schucany and Haas.
double sample_inverse_gaussian(double mean, double shape, CounterRng& rng,
                               std::normal_distribution<double>& normal) {
  const double z = normal(rng);
  const double y = z * z;
  const double x = mean + mean * mean * y / (2.0 * shape) -
                   mean / (2.0 * shape) * std::sqrt(4.0 * mean * shape * y + mean * mean * y * y);
  return rng.uniform() <= mean / (mean + x) ? x : mean * mean / x;
}

// Jump part of nu_sigma(R): int x^2 nu(dx).
double jump_second_moment(const ModelSpec& spec) {
  return std::visit(
      Overloaded{
          [](const BrownianGammaParams& p) { return p.shape / (p.rate * p.rate); },
          [](const CompoundPoissonParams& p) {
            return p.intensity * (p.jump_mean * p.jump_mean + p.jump_variance);
          },
          [](const BilateralGammaParams& p) { return p.beta / (p.gamma * p.gamma); },
          [](const PureGaussianParams&) { return 0.0; },
          [](const NigParams& p) {
            const double g = nig_gamma(p);
            return p.delta * p.alpha * p.alpha / (g * g * g);
          },
      },
      spec.params);
}

double gaussian_variance(const ModelSpec& spec) {
  return std::visit(
      Overloaded{
          [](const BrownianGammaParams& p) { return p.sigma * p.sigma; },
          [](const CompoundPoissonParams& p) { return p.sigma * p.sigma; },
          [](const BilateralGammaParams&) { return 0.0; },
          [](const PureGaussianParams& p) { return p.sigma * p.sigma; },
          [](const NigParams&) { return 0.0; },
      },
      spec.params);
}

// x^2 nu(x), bounded near 0 for every model here.
double weighted_density(const ModelSpec& spec, double x) {
  return x * x * levy_density(spec, x);
}

double bin_average(const ModelSpec& spec, double a, double b) {
  auto f = [&spec](double x) { return weighted_density(spec, x); };
  double total = 0.0;
  if (a < 0.0 && b > 0.0) {
    total = quad::gauss_legendre8(f, a, 0.0, 4) + quad::gauss_legendre8(f, 0.0, b, 4);
  } else {
    total = quad::gauss_legendre8(f, a, b, 4);
  }
  return total / (b - a);
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::brownian_gamma: return "brownian_gamma";
    case ModelKind::compound_poisson_gaussian_jumps: return "compound_poisson_gaussian_jumps";
    case ModelKind::bilateral_gamma: return "bilateral_gamma";
    case ModelKind::pure_gaussian: return "pure_gaussian";
    case ModelKind::normal_inverse_gaussian: return "normal_inverse_gaussian";
  }
  return "unknown";
}

ModelKind model_kind_from_string(std::string_view name) {
  for (ModelKind k : {ModelKind::brownian_gamma, ModelKind::compound_poisson_gaussian_jumps,
                      ModelKind::bilateral_gamma, ModelKind::pure_gaussian,
                      ModelKind::normal_inverse_gaussian}) {
    if (to_string(k) == name) return k;
  }
  if (name == "compound_poisson") return ModelKind::compound_poisson_gaussian_jumps;
  if (name == "nig") return ModelKind::normal_inverse_gaussian;
  throw std::invalid_argument("unknown model kind: " + std::string(name));
}

ModelKind ModelSpec::kind() const noexcept {
  return static_cast<ModelKind>(params.index());
}

void ModelSpec::validate() const {
  std::visit(Overloaded{
                 [](const BrownianGammaParams& p) {
                   require_finite(p.b, "b");
                   require_nonnegative(p.sigma, "sigma");
                   require_positive(p.shape, "shape");
                   require_positive(p.rate, "rate");
                 },
                 [](const CompoundPoissonParams& p) {
                   require_finite(p.b, "b");
                   require_nonnegative(p.sigma, "sigma");
                   require_positive(p.intensity, "intensity");
                   require_finite(p.jump_mean, "jump_mean");
                   require_positive(p.jump_variance, "jump_variance");
                 },
                 [](const BilateralGammaParams& p) {
                   require_positive(p.gamma, "gamma");
                   require_positive(p.beta, "beta");
                 },
                 [](const PureGaussianParams& p) {
                   require_finite(p.b, "b");
                   require_nonnegative(p.sigma, "sigma");
                 },
                 [](const NigParams& p) {
                   require_positive(p.alpha, "alpha");
                   require_positive(p.delta, "delta");
                   require_finite(p.location, "location");
                   if (!(std::abs(p.skew) < p.alpha)) {
                     throw std::invalid_argument("ModelSpec: NIG requires |skew| < alpha");
                   }
                 },
             },
             params);
}

ModelSpec ModelSpec::defaults(ModelKind kind, std::uint64_t seed) {
  ModelSpec spec;
  spec.seed = seed;
  switch (kind) {
    case ModelKind::brownian_gamma: spec.params = BrownianGammaParams{}; break;
    case ModelKind::compound_poisson_gaussian_jumps: spec.params = CompoundPoissonParams{}; break;
    case ModelKind::bilateral_gamma: spec.params = BilateralGammaParams{}; break;
    case ModelKind::pure_gaussian: spec.params = PureGaussianParams{}; break;
    case ModelKind::normal_inverse_gaussian: spec.params = NigParams{}; break;
  }
  return spec;
}

SampleSet sample_increments(const ModelSpec& spec, std::size_t n, std::uint64_t replication) {
  if (n == 0) throw std::invalid_argument("sample_increments: n must be at least 1");
  spec.validate();
  CounterRng rng(spec.seed, replication);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(n);

  std::visit(
      Overloaded{
          [&](const BrownianGammaParams& p) {
            std::gamma_distribution<double> gamma(p.shape, 1.0 / p.rate);
            const double drift = p.b - p.shape / p.rate;
            for (double& x : out) {
              const double z = normal(rng);
              x = drift + p.sigma * z + gamma(rng);
            }
          },
          [&](const CompoundPoissonParams& p) {
            std::poisson_distribution<int> count(p.intensity);
            const double drift = p.b - p.intensity * p.jump_mean;
            const double jump_sd = std::sqrt(p.jump_variance);
            for (double& x : out) {
              double v = drift + p.sigma * normal(rng);
              const int jumps = count(rng);
              for (int k = 0; k < jumps; ++k) v += p.jump_mean + jump_sd * normal(rng);
              x = v;
            }
          },
          [&](const BilateralGammaParams& p) {
            std::gamma_distribution<double> gamma(0.5 * p.beta, 1.0 / p.gamma);
            for (double& x : out) {
              const double plus = gamma(rng);
              x = plus - gamma(rng);
            }
          },
          [&](const PureGaussianParams& p) {
            for (double& x : out) x = p.b + p.sigma * normal(rng);
          },
          [&](const NigParams& p) {
            const double g = nig_gamma(p);
            const double mean = p.delta / g;
            const double shape = p.delta * p.delta;
            for (double& x : out) {
              const double v = sample_inverse_gaussian(mean, shape, rng, normal);
              x = p.location + p.skew * v + std::sqrt(v) * normal(rng);
            }
          },
      },
      spec.params);
  return SampleSet(std::move(out), spec.seed);
}

CfTriple exact_exponent(const ModelSpec& spec, double u) {
  return std::visit(
      Overloaded{
          [u](const BrownianGammaParams& p) -> CfTriple {
            // Gamma part: -a log(1 - iu/r)
            const cplx r_iu = p.rate - kI * u;
            const double drift = p.b - p.shape / p.rate;
            const double s2 = p.sigma * p.sigma;
            return {kI * u * drift - 0.5 * s2 * u * u - p.shape * std::log(r_iu / p.rate),
                    kI * drift - s2 * u + kI * p.shape / r_iu,
                    -s2 - p.shape / (r_iu * r_iu)};
          },
          [u](const CompoundPoissonParams& p) -> CfTriple {
            const double v = p.jump_variance;
            const cplx phi_j = std::exp(kI * u * p.jump_mean - 0.5 * v * u * u);
            const cplx slope = kI * p.jump_mean - v * u;
            const double drift = p.b - p.intensity * p.jump_mean;
            const double s2 = p.sigma * p.sigma;
            return {kI * u * drift - 0.5 * s2 * u * u + p.intensity * (phi_j - 1.0),
                    kI * drift - s2 * u + p.intensity * slope * phi_j,
                    -s2 + p.intensity * (slope * slope - v) * phi_j};
          },
          [u](const BilateralGammaParams& p) -> CfTriple {
            const double g2 = p.gamma * p.gamma;
            const double q = g2 + u * u;
            return {-0.5 * p.beta * std::log1p(u * u / g2), -p.beta * u / q,
                    -p.beta * (g2 - u * u) / (q * q)};
          },
          [u](const PureGaussianParams& p) -> CfTriple {
            const double s2 = p.sigma * p.sigma;
            return {kI * u * p.b - 0.5 * s2 * u * u, kI * p.b - s2 * u, -s2};
          },
          [u](const NigParams& p) -> CfTriple {
            const cplx w = p.skew + kI * u;
            const cplx root = std::sqrt(p.alpha * p.alpha - w * w);
            return {kI * u * p.location + p.delta * (nig_gamma(p) - root),
                    kI * p.location + p.delta * kI * w / root,
                    -p.delta * p.alpha * p.alpha / (root * root * root)};
          },
      },
      spec.params);
}

CfTriple exact_cf(const ModelSpec& spec, double u) {
  return cf_from_exponent(exact_exponent(spec, u));
}

double model_mean(const ModelSpec& spec) {
  return std::visit(Overloaded{
                        [](const BrownianGammaParams& p) { return p.b; },
                        [](const CompoundPoissonParams& p) { return p.b; },
                        [](const BilateralGammaParams&) { return 0.0; },
                        [](const PureGaussianParams& p) { return p.b; },
                        [](const NigParams& p) {
                          return p.location + p.delta * p.skew / nig_gamma(p);
                        },
                    },
                    spec.params);
}

double model_variance(const ModelSpec& spec) {
  return gaussian_variance(spec) + jump_second_moment(spec);
}

double levy_density(const ModelSpec& spec, double x) {
  if (x == 0.0) return 0.0;
  return std::visit(
      Overloaded{
          [x](const BrownianGammaParams& p) {
            return x > 0.0 ? p.shape * std::exp(-p.rate * x) / x : 0.0;
          },
          [x](const CompoundPoissonParams& p) {
            const double d = x - p.jump_mean;
            return p.intensity * std::exp(-0.5 * d * d / p.jump_variance) /
                   std::sqrt(2.0 * std::numbers::pi * p.jump_variance);
          },
          [x](const BilateralGammaParams& p) {
            return 0.5 * p.beta * std::exp(-p.gamma * std::abs(x)) / std::abs(x);
          },
          [](const PureGaussianParams&) { return 0.0; },
          [x](const NigParams& p) {
            const double ax = p.alpha * std::abs(x);
            if (ax > 700.0) return 0.0;
            return p.delta * p.alpha / (std::numbers::pi * std::abs(x)) *
                   std::exp(p.skew * x) * std::cyl_bessel_k(1.0, ax);
          },
      },
      spec.params);
}

TruthModel truth_model(const ModelSpec& spec, double support_lo, double support_hi,
                       std::size_t bins) {
  spec.validate();
  // Validates the layout.
  const GridMeasure layout = GridMeasure::zero(support_lo, support_hi, bins);
  const double width = layout.bin_width();

  // Averages on the bins plus one ghost bin on each side.
  std::vector<double> avg(bins + 2, 0.0);
  const bool has_jumps = jump_second_moment(spec) > 0.0;
  if (has_jumps) {
    for (std::size_t j = 0; j < bins + 2; ++j) {
      const double a = support_lo + width * (static_cast<double>(j) - 1.0);
      avg[j] = bin_average(spec, a, a + width);
    }
  }

  std::vector<double> values(bins, 0.0);
  double captured = 0.0;
  for (std::size_t j = 0; j < bins; ++j) {
    const double centre = avg[j + 1];
    captured += centre * width;
    values[j] = centre - (avg[j + 2] - 2.0 * centre + avg[j]) / 12.0;
  }
  // Move negative corrections into the larger neighbour; this keeps the mass.
  for (int pass = 0; pass < 8; ++pass) {
    bool any = false;
    for (std::size_t j = 0; j < bins; ++j) {
      if (values[j] >= 0.0) continue;
      any = true;
      const bool has_left = j > 0;
      const bool has_right = j + 1 < bins;
      std::size_t target = j;
      if (has_left && has_right) {
        target = values[j + 1] >= values[j - 1] ? j + 1 : j - 1;
      } else if (has_right) {
        target = j + 1;
      } else if (has_left) {
        target = j - 1;
      }
      if (target != j) values[target] += values[j];
      values[j] = 0.0;
    }
    if (!any) break;
  }
  for (double& v : values) v = std::max(v, 0.0);

  TruthModel truth;
  truth.model.b = model_mean(spec);
  truth.model.nu_sigma =
      GridMeasure(gaussian_variance(spec), support_lo, support_hi, std::move(values));
  truth.exact_total_mass = model_variance(spec);
  truth.truncated_mass = std::max(0.0, jump_second_moment(spec) - captured);
  return truth;
}

nlohmann::ordered_json to_json(const ModelSpec& spec) {
  nlohmann::ordered_json j;
  j["kind"] = std::string(to_string(spec.kind()));
  j["seed"] = spec.seed;
  nlohmann::ordered_json p;
  std::visit(Overloaded{
                 [&p](const BrownianGammaParams& q) {
                   p["b"] = q.b;
                   p["sigma"] = q.sigma;
                   p["shape"] = q.shape;
                   p["rate"] = q.rate;
                 },
                 [&p](const CompoundPoissonParams& q) {
                   p["b"] = q.b;
                   p["sigma"] = q.sigma;
                   p["intensity"] = q.intensity;
                   p["jump_mean"] = q.jump_mean;
                   p["jump_variance"] = q.jump_variance;
                 },
                 [&p](const BilateralGammaParams& q) {
                   p["gamma"] = q.gamma;
                   p["beta"] = q.beta;
                 },
                 [&p](const PureGaussianParams& q) {
                   p["b"] = q.b;
                   p["sigma"] = q.sigma;
                 },
                 [&p](const NigParams& q) {
                   p["alpha"] = q.alpha;
                   p["skew"] = q.skew;
                   p["delta"] = q.delta;
                   p["location"] = q.location;
                 },
             },
             spec.params);
  j["params"] = std::move(p);
  return j;
}

ModelSpec model_spec_from_json(const nlohmann::json& j) {
  ModelSpec spec = ModelSpec::defaults(model_kind_from_string(j.at("kind").get<std::string>()),
                                       j.value("seed", std::uint64_t{0}));
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  auto read = [&params](const char* key, double& field) {
    if (params.contains(key)) field = params.at(key).get<double>();
  };
  std::visit(Overloaded{
                 [&](BrownianGammaParams& q) {
                   read("b", q.b);
                   read("sigma", q.sigma);
                   read("shape", q.shape);
                   read("rate", q.rate);
                 },
                 [&](CompoundPoissonParams& q) {
                   read("b", q.b);
                   read("sigma", q.sigma);
                   read("intensity", q.intensity);
                   read("jump_mean", q.jump_mean);
                   read("jump_variance", q.jump_variance);
                 },
                 [&](BilateralGammaParams& q) {
                   read("gamma", q.gamma);
                   read("beta", q.beta);
                 },
                 [&](PureGaussianParams& q) {
                   read("b", q.b);
                   read("sigma", q.sigma);
                 },
                 [&](NigParams& q) {
                   read("alpha", q.alpha);
                   read("skew", q.skew);
                   read("delta", q.delta);
                   read("location", q.location);
                 },
             },
             spec.params);
  spec.validate();
  return spec;
}

}  // namespace levyfit
