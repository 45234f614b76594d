#include "levyfit/fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "levyfit/rng.hpp"

namespace levyfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A search direction in parameter space: index 0 is b, 1 the atom mass,
// 2 + j bin j.
struct Direction {
  std::array<std::size_t, 2> index{};
  std::array<double, 2> coef{};
  std::size_t size = 1;
  double step = 0.0;
  double initial_step = 0.0;
  double max_step = 0.0;
};

class PatternSearch {
 public:
  PatternSearch(const FitObjective& objective, double b_start, const GridMeasure& start,
                const FitConfig& cfg)
      : obj_(objective), cfg_(cfg), table_(objective.table()) {
    const std::size_t bins = table_.bin_count();
    params_.resize(2 + bins);
    params_[0] = b_start;
    params_[1] = start.atom_mass();
    std::copy(start.bins().begin(), start.bins().end(), params_.begin() + 2);
    width_ = (objective.support_hi() - objective.support_lo()) / static_cast<double>(bins);

    const std::size_t nodes = table_.node_count();
    param_dirs_.assign(params_.size(), std::vector<CfTriple>(nodes));
    for (std::size_t i = 0; i < nodes; ++i) {
      param_dirs_[0][i] = table_.drift_direction(i);
      param_dirs_[1][i] = table_.atom_direction(i);
      for (std::size_t j = 0; j < bins; ++j) param_dirs_[2 + j][i] = table_.kernel(i, j);
    }
    psi_.resize(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
      psi_[i] = table_.exponent(i, params_[0], params_[1],
                                std::span<const double>(params_).subspan(2));
    }
    scratch_.resize(nodes);
    build_directions(start);
  }

  FitResult run() {
    FitResult result;
    set_power(0.0);
    value_ = evaluate(psi_, kInf);
    if (!std::isfinite(value_)) {
      throw NonFiniteError("minimize: objective is not finite at the start point", 0.0);
    }
    result.pilot_objective = value_;
    best_value_ = value_;
    best_params_ = params_;
    notify(0);

    CounterRng rng(0x5eed0f1e7ULL);
    std::size_t sweeps = 0;
    for (double power : cfg_.smoothing_powers) {
      run_stage(power, rng, sweeps);
      keep_if_better();
    }
    bool converged = false;
    for (std::size_t round = 0; round <= cfg_.restarts; ++round) {
      const double before = best_value_;
      converged = run_stage(0.0, rng, sweeps);
      keep_if_better();
      if (round > 0 && before - best_value_ <= cfg_.objective_tol * best_value_) break;
      if (sweeps >= cfg_.max_iters) break;
    }

    result.b_hat = best_params_[0];
    result.nu_hat = GridMeasure(best_params_[1], obj_.support_lo(), obj_.support_hi(),
                                std::vector<double>(best_params_.begin() + 2, best_params_.end()));
    result.objective = best_value_;
    result.iterations = sweeps;
    result.evaluations = evaluations_;
    result.converged = converged;
    result.slack = cfg_.delta_n_const / std::sqrt(obj_.sample_size());
    return result;
  }

 private:
  void build_directions(const GridMeasure& start) {
    const std::size_t bins = table_.bin_count();
    const double scale = std::max(start.total_mass(), 0.05);
    const double bin_step = 0.2 * scale / (obj_.support_hi() - obj_.support_lo());
    auto single = [](std::size_t p, double step) {
      Direction d;
      d.index = {p, p};
      d.coef = {1.0, 0.0};
      d.size = 1;
      d.step = step;
      d.initial_step = step;
      d.max_step = 20.0 * step;
      return d;
    };
    auto pair = [](std::size_t p, double cp, std::size_t q, double cq, double step) {
      Direction d;
      d.index = {p, q};
      d.coef = {cp, cq};
      d.size = 2;
      d.step = step;
      d.initial_step = step;
      d.max_step = 20.0 * step;
      return d;
    };
    dirs_.push_back(single(0, 0.05));
    dirs_.push_back(single(1, 0.1 * scale));
    for (std::size_t j = 0; j < bins; ++j) dirs_.push_back(single(2 + j, bin_step));
    // Mass-preserving moves: atom <-> bin, and between neighbouring bins.
    for (std::size_t j = 0; j < bins; ++j) {
      dirs_.push_back(pair(1, width_, 2 + j, -1.0, bin_step));
    }
    for (std::size_t j = 0; j + 1 < bins; ++j) {
      dirs_.push_back(pair(2 + j, 1.0, 3 + j, -1.0, bin_step));
    }
  }

  // Pattern search on the objective with the given smoothing power until the
  // steps collapse or progress stalls. Returns true on convergence.
  bool run_stage(double power, CounterRng& rng, std::size_t& sweeps) {
    set_power(power);
    const double tol = power > 0.0 ? std::max(cfg_.warmup_tol, cfg_.objective_tol)
                                   : cfg_.objective_tol;
    value_ = evaluate(psi_, kInf);
    refresh_hot(psi_);
    for (Direction& d : dirs_) d.step = d.initial_step;
    std::vector<double> history;
    while (sweeps < cfg_.max_iters) {
      ++sweeps;
      const double sweep_start = value_;
      for (Direction& d : dirs_) try_direction(d, sweeps);
      random_pairs(rng, sweeps);
      history.push_back(sweep_start - value_);

      const bool steps_small = std::all_of(dirs_.begin(), dirs_.end(), [this](const Direction& d) {
        return d.step < cfg_.step_tol;
      });
      constexpr std::size_t kWindow = 25;
      bool stalled = false;
      if (history.size() >= kWindow) {
        const double recent = std::accumulate(history.end() - kWindow, history.end(), 0.0);
        stalled = recent <= tol * std::max(value_, 1e-300);
      }
      if (steps_small || stalled) return true;
    }
    return false;
  }

  void keep_if_better() {
    const double saved = power_;
    set_power(0.0);
    const double exact = evaluate(psi_, kInf);
    set_power(saved);
    if (exact < best_value_) {
      best_value_ = exact;
      best_params_ = params_;
    } else {
      // Continue from the best point found so far.
      params_ = best_params_;
      for (std::size_t i = 0; i < psi_.size(); ++i) {
        psi_[i] = table_.exponent(i, params_[0], params_[1],
                                  std::span<const double>(params_).subspan(2));
      }
    }
  }

  // d2 distance for exponent values; gives up (returns +inf) once the
  // partial maxima already exceed `abort_above`. With power_ > 0 the maxima
  // are replaced by power means (mean of |.|^p)^{1/p}, which are smooth and
  // approach the maxima from below as p grows.
  double evaluate(std::span<const CfTriple> psi, double abort_above) {
    ++evaluations_;
    const auto target = obj_.target();
    const auto weights = obj_.half_grid().weights();
    if (power_ > 0.0) {
      std::array<double, 3> acc{0.0, 0.0, 0.0};
      std::array<double, 3> scale{0.0, 0.0, 0.0};
      std::vector<std::array<double, 3>>& diffs = diff_scratch_;
      diffs.resize(psi.size());
      for (std::size_t i = 0; i < psi.size(); ++i) {
        const CfTriple phi = cf_from_exponent(psi[i]);
        for (int k = 0; k < 3; ++k) {
          const double diff = weights[i] * std::abs(phi[k] - target[i][k]);
          if (!std::isfinite(diff)) return kInf;
          diffs[i][k] = diff;
          scale[k] = std::max(scale[k], diff);
        }
      }
      for (const auto& d : diffs) {
        for (int k = 0; k < 3; ++k) {
          if (scale[k] > 0.0) acc[k] += power_of(d[k] / scale[k]);
        }
      }
      double total = 0.0;
      const double inv_n = 1.0 / static_cast<double>(psi.size());
      for (int k = 0; k < 3; ++k) total += scale[k] * std::pow(acc[k] * inv_n, 1.0 / power_);
      return total;
    }
    std::array<double, 3> sup{0.0, 0.0, 0.0};
    std::array<std::size_t, 3>& arg = last_arg_;
    auto visit = [&](std::size_t i) -> bool {
      const CfTriple phi = cf_from_exponent(psi[i]);
      const double w = weights[i];
      for (int k = 0; k < 3; ++k) {
        const double diff = w * std::abs(phi[k] - target[i][k]);
        if (!(diff <= sup[k])) {
          if (!std::isfinite(diff)) return false;
          sup[k] = diff;
          arg[k] = i;
        }
      }
      return sup[0] + sup[1] + sup[2] <= abort_above;
    };
    for (std::size_t i : hot_) {
      if (!visit(i)) return kInf;
    }
    for (std::size_t i = 0; i < psi.size(); ++i) {
      if (!visit(i)) return kInf;
    }
    return sup[0] + sup[1] + sup[2];
  }

  // x^power_, by repeated squaring when power_ is a power of two.
  double power_of(double x) const {
    if (squarings_ < 0) return std::pow(x, power_);
    for (int i = 0; i < squarings_; ++i) x *= x;
    return x;
  }

  void set_power(double power) {
    power_ = power;
    squarings_ = -1;
    if (power > 0.0) {
      int e = 0;
      if (std::frexp(power, &e) == 0.5 && e >= 2) squarings_ = e - 1;
    }
  }

  void refresh_hot(std::span<const CfTriple> psi) {
    const auto target = obj_.target();
    const auto weights = obj_.half_grid().weights();
    std::array<double, 3> best{-1.0, -1.0, -1.0};
    std::array<std::size_t, 3> arg{0, 0, 0};
    for (std::size_t i = 0; i < psi.size(); ++i) {
      const CfTriple phi = cf_from_exponent(psi[i]);
      for (int k = 0; k < 3; ++k) {
        const double diff = weights[i] * std::abs(phi[k] - target[i][k]);
        if (diff > best[k]) {
          best[k] = diff;
          arg[k] = i;
        }
      }
    }
    hot_.assign(arg.begin(), arg.end());
  }

  double total_mass_of(std::span<const double> p) const {
    return p[1] + width_ * std::accumulate(p.begin() + 2, p.end(), 0.0);
  }

  // Tries params + t * direction (projected); accepts on improvement.
  bool try_move(const Direction& d, double t, std::size_t sweep) {
    std::array<double, 2> delta{0.0, 0.0};
    bool moved = false;
    for (std::size_t m = 0; m < d.size; ++m) {
      const std::size_t p = d.index[m];
      double next = params_[p] + t * d.coef[m];
      if (p >= 1) next = std::max(next, 0.0);
      delta[m] = next - params_[p];
      moved = moved || delta[m] != 0.0;
    }
    if (!moved) return false;
    for (std::size_t i = 0; i < psi_.size(); ++i) {
      CfTriple s = psi_[i];
      for (std::size_t m = 0; m < d.size; ++m) {
        const CfTriple& dir = param_dirs_[d.index[m]][i];
        s.d0 += delta[m] * dir.d0;
        s.d1 += delta[m] * dir.d1;
        s.d2 += delta[m] * dir.d2;
      }
      scratch_[i] = s;
    }
    const double candidate = evaluate(scratch_, value_);
    bool accept = candidate < value_;
    if (!accept && candidate == value_) {
      // Equal objective: prefer the smaller total mass.
      double mass_change = 0.0;
      for (std::size_t m = 0; m < d.size; ++m) {
        const std::size_t p = d.index[m];
        if (p == 1) mass_change += delta[m];
        if (p >= 2) mass_change += width_ * delta[m];
      }
      accept = mass_change < 0.0;
    }
    if (!accept) return false;
    for (std::size_t m = 0; m < d.size; ++m) params_[d.index[m]] += delta[m];
    for (std::size_t m = 0; m < d.size; ++m) {
      if (d.index[m] >= 1) params_[d.index[m]] = std::max(params_[d.index[m]], 0.0);
    }
    psi_.swap(scratch_);
    value_ = candidate;
    // An accepted exact evaluation ran over every node, so its argmax nodes
    // are the new hot set.
    if (power_ == 0.0) hot_.assign(last_arg_.begin(), last_arg_.end());
    notify(sweep);
    return true;
  }

  void try_direction(Direction& d, std::size_t sweep) {
    if (try_move(d, d.step, sweep) || try_move(d, -d.step, sweep)) {
      d.step = std::min(1.6 * d.step, d.max_step);
    } else {
      d.step *= 0.5;
    }
  }

  // A few random two-parameter directions per sweep, for ridges of the
  // max-type objective that no coordinate or transfer move can follow.
  void random_pairs(CounterRng& rng, std::size_t sweep) {
    constexpr int kTrials = 6;
    const std::size_t dim = params_.size();
    for (int t = 0; t < kTrials; ++t) {
      const std::size_t p = rng() % dim;
      std::size_t q = rng() % dim;
      if (q == p) q = (q + 1) % dim;
      const double cp = rng.uniform() < 0.5 ? -1.0 : 1.0;
      const double cq = 2.0 * rng.uniform() - 1.0;
      const double step = std::sqrt(single_step(p) * single_step(q));
      Direction d;
      d.index = {p, q};
      d.coef = {cp, cq};
      d.size = 2;
      d.step = step;
      if (!try_move(d, step, sweep)) try_move(d, -step, sweep);
    }
  }

  double single_step(std::size_t p) const { return dirs_[p].step; }

  void notify(std::size_t sweep) const {
    if (!cfg_.observer) return;
    cfg_.observer(IterateView{sweep, power_, params_[0], params_[1],
                              std::span<const double>(params_).subspan(2), value_});
  }

  const FitObjective& obj_;
  const FitConfig& cfg_;
  const KernelTable& table_;
  std::vector<double> params_;
  std::vector<std::vector<CfTriple>> param_dirs_;
  std::vector<CfTriple> psi_;
  std::vector<CfTriple> scratch_;
  std::vector<Direction> dirs_;
  std::vector<std::size_t> hot_;
  double width_ = 0.0;
  double value_ = kInf;
  double best_value_ = kInf;
  std::vector<double> best_params_;
  double power_ = 0.0;
  int squarings_ = -1;
  std::array<std::size_t, 3> last_arg_{0, 0, 0};
  std::vector<std::array<double, 3>> diff_scratch_;
  std::size_t evaluations_ = 0;
};

}  // namespace

void FitConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("FitConfig: max_iters must be at least 1");
  if (!(step_tol > 0.0) || !(objective_tol > 0.0) || !(warmup_tol > 0.0)) {
    throw std::invalid_argument("FitConfig: tolerances must be positive");
  }
  if (!(delta_n_const > 0.0)) {
    throw std::invalid_argument("FitConfig: delta_n_const must be positive");
  }
}

double objective(double b, const GridMeasure& nu, const SampleSet& samples,
                 const FrequencyGrid& grid) {
  const CharExponentModel model{b, nu};
  return d2_distance([&model](double u) { return model_cf(model, u); },
                     [&samples](double u) { return empirical_cf_triple(samples, u); }, grid);
}

FitObjective::FitObjective(const SampleSet& samples, const FrequencyGrid& grid,
                           double support_lo, double support_hi, std::size_t bins)
    : half_(grid.nonnegative_half()),
      table_(half_.nodes(), support_lo, support_hi, bins),
      target_(empirical_cf_table(samples, half_.nodes())),
      n_(static_cast<double>(samples.size())),
      lo_(support_lo),
      hi_(support_hi) {}

FitObjective::FitObjective(std::vector<CfTriple> target, const FrequencyGrid& grid,
                           double support_lo, double support_hi, std::size_t bins,
                           double sample_size)
    : half_(grid.nonnegative_half()),
      table_(half_.nodes(), support_lo, support_hi, bins),
      target_(std::move(target)),
      n_(sample_size),
      lo_(support_lo),
      hi_(support_hi) {
  if (target_.size() != half_.size()) {
    throw std::invalid_argument("FitObjective: target must be given on the nonnegative half grid");
  }
}

double FitObjective::from_exponents(std::span<const CfTriple> psi) const {
  std::vector<CfTriple> phi(psi.size());
  std::transform(psi.begin(), psi.end(), phi.begin(), cf_from_exponent);
  return d2_distance(phi, target_, half_);
}

double FitObjective::operator()(double b, const GridMeasure& nu) const {
  if (nu.support_lo() != lo_ || nu.support_hi() != hi_ ||
      nu.bin_count() != table_.bin_count()) {
    throw std::invalid_argument("FitObjective: measure layout does not match the table");
  }
  std::vector<CfTriple> psi(half_.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    psi[i] = table_.exponent(i, b, nu.atom_mass(), nu.bins());
  }
  return from_exponents(psi);
}

FitResult minimize(const FitObjective& objective, double b_start, const GridMeasure& start,
                   const FitConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(b_start)) throw std::invalid_argument("minimize: b_start must be finite");
  if (start.support_lo() != objective.support_lo() ||
      start.support_hi() != objective.support_hi() ||
      start.bin_count() != objective.table().bin_count()) {
    throw std::invalid_argument("minimize: start measure layout does not match the objective");
  }
  PatternSearch search(objective, b_start, start, cfg);
  return search.run();
}

FitResult minimize(const SampleSet& samples, double b_start, const GridMeasure& start,
                   const FitConfig& cfg) {
  const FitObjective obj(samples, cfg.grid, start.support_lo(), start.support_hi(),
                         start.bin_count());
  return minimize(obj, b_start, start, cfg);
}

double jump_tail_functional(const GridMeasure& nu, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("jump_tail_functional: threshold must be positive");
  double total = 0.0;
  for (std::size_t j = 0; j < nu.bin_count(); ++j) {
    const auto [lo, hi] = nu.bin_edges(j);
    if (hi <= a) continue;
    // Piecewise-constant density: int_lo^hi x^{-2} dx = 1/lo - 1/hi.
    total += nu.bins()[j] * (1.0 / std::max(lo, a) - 1.0 / hi);
  }
  return total;
}

std::vector<double> functional_report(const FitResult& result,
                                      std::span<const double> thresholds) {
  std::vector<double> out;
  out.reserve(thresholds.size());
  for (double a : thresholds) out.push_back(jump_tail_functional(result.nu_hat, a));
  return out;
}

nlohmann::ordered_json to_json(const FitResult& result) {
  nlohmann::ordered_json j;
  j["b_hat"] = result.b_hat;
  j["nu_hat"] = to_json(result.nu_hat);
  j["objective"] = result.objective;
  j["pilot_objective"] = result.pilot_objective;
  j["iterations"] = result.iterations;
  j["evaluations"] = result.evaluations;
  j["converged"] = result.converged;
  j["slack"] = result.slack;
  return j;
}

double hf_baseline(const SampleSet& samples, double a) {
  const auto inc = samples.increments();
  const auto count = std::count_if(inc.begin(), inc.end(), [a](double z) { return z > a; });
  return static_cast<double>(count) / static_cast<double>(inc.size());
}

}  // namespace levyfit
