#include "levyfit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <type_traits>

#include "levyfit/charfn.hpp"
#include "levyfit/pilot.hpp"
#include "levyfit/quadrature.hpp"

namespace levyfit {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Runs body(i) for i in [0, count) on up to `threads` threads. Results must be
// stored by index; the first exception (lowest index) is rethrown.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " + dir.string() + ": " +
                             ec.message());
  }
  const auto path = dir / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void close_output(std::ofstream& out, const std::filesystem::path& dir, const std::string& name) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + (dir / name).string());
}

void write_json(const std::filesystem::path& dir, const std::string& name,
                const nlohmann::ordered_json& j) {
  auto out = open_output(dir, name);
  out << j.dump(2) << '\n';
  close_output(out, dir, name);
}

double gaussian_sigma(const ModelSpec& spec) {
  return std::visit(
      [](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, BrownianGammaParams> ||
                      std::is_same_v<P, CompoundPoissonParams> ||
                      std::is_same_v<P, PureGaussianParams>) {
          return p.sigma;
        } else {
          return 0.0;
        }
      },
      spec.params);
}

// nu([a, inf)) of the model, by quadrature of the Levy density.
double model_tail(const ModelSpec& spec, double a) {
  const double upper = a + 80.0 * std::max(1.0, std::sqrt(model_variance(spec)));
  return quad::gauss_legendre8([&spec](double x) { return levy_density(spec, x); }, a, upper,
                               800);
}

GridMeasure truth_for(const ExperimentPlan& plan) {
  return truth_model(plan.model, plan.support_lo, plan.support_hi,
                     plan.bins * plan.truth_refinement)
      .model.nu_sigma;
}

nlohmann::ordered_json grid_json(const FrequencyGrid& g) {
  nlohmann::ordered_json j;
  j["u_max"] = g.u_max();
  j["step"] = g.step();
  j["delta"] = g.delta();
  return j;
}

nlohmann::ordered_json record_json(const ReplicationRecord& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["replication"] = r.replication;
  j["b_pilot"] = r.b_pilot;
  j["b_hat"] = r.b_hat;
  j["sigma_hat"] = r.sigma_hat;
  j["tail_hat"] = r.tail_hat;
  j["hf_estimate"] = r.hf_estimate;
  j["pilot_objective"] = r.pilot_objective;
  j["objective"] = r.objective;
  j["truth_objective"] = r.truth_objective;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["ridge_used"] = r.ridge_used;
  j["losses"] = r.losses;
  j["pilot_nu"] = to_json(r.pilot_nu);
  j["nu_hat"] = to_json(r.nu_hat);
  return j;
}

void write_records_csv(std::ostream& out, const ExperimentPlan& plan,
                       std::span<const ReplicationRecord> records) {
  out << "n,replication,b_pilot,b_hat,sigma_hat,tail_hat,hf_estimate,pilot_objective,"
         "objective,truth_objective,iterations,converged,ridge_used";
  for (double s : plan.s_values) out << ",loss_s" << num(s);
  out << '\n';
  for (const auto& r : records) {
    out << r.n << ',' << r.replication << ',' << num(r.b_pilot) << ',' << num(r.b_hat) << ','
        << num(r.sigma_hat) << ',' << num(r.tail_hat) << ',' << num(r.hf_estimate) << ','
        << num(r.pilot_objective) << ',' << num(r.objective) << ',' << num(r.truth_objective)
        << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << (r.ridge_used ? 1 : 0);
    for (double l : r.losses) out << ',' << num(l);
    out << '\n';
  }
}

void write_histogram(std::ostream& out, const SampleSet& samples, std::size_t cells) {
  const auto inc = samples.increments();
  const auto [mn, mx] = std::minmax_element(inc.begin(), inc.end());
  double lo = *mn;
  double hi = *mx;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double h = (hi - lo) / static_cast<double>(cells);
  std::vector<std::size_t> counts(cells, 0);
  for (double z : inc) {
    auto c = static_cast<std::size_t>((z - lo) / h);
    counts[std::min(c, cells - 1)] += 1;
  }
  out << "lo,hi,count,density\n";
  const double total = static_cast<double>(inc.size());
  for (std::size_t c = 0; c < cells; ++c) {
    const double a = lo + h * static_cast<double>(c);
    out << num(a) << ',' << num(a + h) << ',' << counts[c] << ','
        << num(static_cast<double>(counts[c]) / (total * h)) << '\n';
  }
}

}  // namespace

void ExperimentPlan::validate() const {
  model.validate();
  if (n_values.empty()) throw std::invalid_argument("ExperimentPlan: n_values is empty");
  if (n_values.front() < 1) throw std::invalid_argument("ExperimentPlan: n must be positive");
  for (std::size_t i = 1; i < n_values.size(); ++i) {
    if (n_values[i] <= n_values[i - 1]) {
      throw std::invalid_argument("ExperimentPlan: n_values must be strictly increasing");
    }
  }
  if (replications < 1) throw std::invalid_argument("ExperimentPlan: replications must be >= 1");
  for (double s : s_values) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("ExperimentPlan: s values must be finite and nonnegative");
    }
  }
  if (parallelism < 1) throw std::invalid_argument("ExperimentPlan: parallelism must be >= 1");
  if (!(support_lo < 0.0 && 0.0 < support_hi)) {
    throw std::invalid_argument("ExperimentPlan: support must contain 0 in its interior");
  }
  if (bins < 1) throw std::invalid_argument("ExperimentPlan: bins must be >= 1");
  if (!(kappa > 0.0)) throw std::invalid_argument("ExperimentPlan: kappa must be positive");
  if (max_iters < 1) throw std::invalid_argument("ExperimentPlan: max_iters must be >= 1");
  if (truth_refinement < 1) {
    throw std::invalid_argument("ExperimentPlan: truth_refinement must be >= 1");
  }
}

ExperimentPlan example_plan(std::uint64_t seed) {
  ExperimentPlan plan;
  plan.model = ModelSpec::defaults(ModelKind::brownian_gamma, seed);
  return plan;
}

ExperimentPlan rate_plan(ModelKind kind, std::uint64_t seed) {
  ExperimentPlan plan;
  plan.model = ModelSpec::defaults(kind, seed);
  plan.n_values = {500, 2000, 8000};
  plan.replications = 20;
  plan.s_values = {1.0};
  if (kind == ModelKind::compound_poisson_gaussian_jumps) {
    plan.support_lo = -5.0;
    plan.support_hi = 5.0;
    plan.bins = 20;
  }
  return plan;
}

ReplicationRecord run_replication(const ExperimentPlan& plan, std::size_t n,
                                  std::uint64_t replication, const GridMeasure* truth) {
  const SampleSet samples = sample_increments(plan.model, n, replication);

  PilotConfig pc;
  pc.kappa = plan.kappa;
  pc.grid = plan.fit_grid;
  pc.support_lo = plan.support_lo;
  pc.support_hi = plan.support_hi;
  pc.bins = plan.bins;
  const PilotEstimate pilot = project_pilot(samples, pc);

  const FitObjective obj(samples, plan.fit_grid, plan.support_lo, plan.support_hi, plan.bins);
  FitConfig fc;
  fc.grid = plan.fit_grid;
  fc.max_iters = plan.max_iters;
  const FitResult fit = minimize(obj, pilot.b, pilot.nu, fc);

  std::vector<CfTriple> exact;
  exact.reserve(obj.half_grid().size());
  for (double u : obj.half_grid().nodes()) exact.push_back(exact_cf(plan.model, u));

  ReplicationRecord r;
  r.n = n;
  r.replication = replication;
  r.b_pilot = pilot.b;
  r.b_hat = fit.b_hat;
  r.sigma_hat = std::sqrt(fit.nu_hat.atom_mass());
  r.tail_hat = jump_tail_functional(fit.nu_hat, 1.0);
  r.hf_estimate = hf_baseline(samples, 1.0);
  r.pilot_objective = fit.pilot_objective;
  r.objective = fit.objective;
  r.truth_objective = d2_distance(exact, obj.target(), obj.half_grid());
  r.iterations = fit.iterations;
  r.converged = fit.converged;
  r.ridge_used = pilot.ridge_used;
  if (truth != nullptr) {
    for (double s : plan.s_values) {
      r.losses.push_back(loss_ls(fit.nu_hat, *truth, LossConfig{s, plan.loss_grid}));
    }
  }
  r.pilot_nu = pilot.nu;
  r.nu_hat = fit.nu_hat;
  return r;
}

nlohmann::ordered_json ExampleReport::to_json() const {
  nlohmann::ordered_json j;
  j["plan"] = levyfit::to_json(plan);
  j["truth"] = {{"b", true_b}, {"sigma", true_sigma}, {"tail", true_tail}};
  j["summary"] = {{"median_abs_b_error", median_abs_b_error},
                  {"median_abs_sigma_error", median_abs_sigma_error},
                  {"median_tail", median_tail},
                  {"mean_hf", mean_hf},
                  {"fraction_closer_than_truth", fraction_closer_than_truth}};
  nlohmann::ordered_json reps = nlohmann::ordered_json::array();
  for (const auto& r : replications) reps.push_back(record_json(r));
  j["replications"] = std::move(reps);
  return j;
}

ExampleReport run_example(const ExperimentPlan& plan) {
  plan.validate();
  const std::size_t n = plan.n_values.front();
  const GridMeasure truth = truth_for(plan);

  ExampleReport report;
  report.plan = plan;
  report.replications.resize(plan.replications);
  parallel_for(plan.replications, plan.parallelism, [&](std::size_t i) {
    report.replications[i] = run_replication(plan, n, i, &truth);
  });

  report.true_b = model_mean(plan.model);
  report.true_sigma = gaussian_sigma(plan.model);
  report.true_tail = model_tail(plan.model, 1.0);

  std::vector<double> b_err, s_err, tails;
  double hf = 0.0;
  std::size_t closer = 0;
  for (const auto& r : report.replications) {
    b_err.push_back(std::abs(r.b_hat - report.true_b));
    s_err.push_back(std::abs(r.sigma_hat - report.true_sigma));
    tails.push_back(r.tail_hat);
    hf += r.hf_estimate;
    if (r.objective <= r.truth_objective) ++closer;
  }
  const double reps = static_cast<double>(report.replications.size());
  report.median_abs_b_error = median(b_err);
  report.median_abs_sigma_error = median(s_err);
  report.median_tail = median(tails);
  report.mean_hf = hf / reps;
  report.fraction_closer_than_truth = static_cast<double>(closer) / reps;

  if (!plan.output_dir.empty()) {
    const auto& dir = plan.output_dir;
    write_json(dir, "report.json", report.to_json());
    {
      auto out = open_output(dir, "replications.csv");
      write_records_csv(out, plan, report.replications);
      close_output(out, dir, "replications.csv");
    }
    // Curves for the first replication.
    const SampleSet samples = sample_increments(plan.model, n, 0);
    const ReplicationRecord& first = report.replications.front();
    {
      auto out = open_output(dir, "histogram.csv");
      write_histogram(out, samples, 40);
      close_output(out, dir, "histogram.csv");
    }
    {
      auto out = open_output(dir, "cf_curves.csv");
      const CharExponentModel pilot_model{first.b_pilot, first.pilot_nu};
      const CharExponentModel fit_model{first.b_hat, first.nu_hat};
      out << "series,u,re,im,k\n";
      auto emit = [&](const char* name, const CfTriple& t, double u) {
        for (int k = 0; k < 3; ++k) {
          out << name << ',' << num(u) << ',' << num(t[k].real()) << ',' << num(t[k].imag())
              << ',' << k << '\n';
        }
      };
      for (double u : plan.fit_grid.nodes()) {
        emit("empirical", empirical_cf_triple(samples, u), u);
        emit("pilot", model_cf(pilot_model, u), u);
        emit("fit", model_cf(fit_model, u), u);
        emit("truth", exact_cf(plan.model, u), u);
      }
      close_output(out, dir, "cf_curves.csv");
    }
    {
      auto out = open_output(dir, "density.csv");
      out << "x,truth,pilot,fit\n";
      constexpr std::size_t kPoints = 400;
      const double h = (plan.support_hi - plan.support_lo) / kPoints;
      for (std::size_t i = 0; i < kPoints; ++i) {
        const double x = plan.support_lo + (static_cast<double>(i) + 0.5) * h;
        out << num(x) << ',' << num(x * x * levy_density(plan.model, x)) << ','
            << num(first.pilot_nu.density_at(x)) << ',' << num(first.nu_hat.density_at(x))
            << '\n';
      }
      close_output(out, dir, "density.csv");
    }
  }
  return report;
}

nlohmann::ordered_json T41Table::to_json() const {
  nlohmann::ordered_json j;
  j["model"] = levyfit::to_json(model);
  j["threshold"] = threshold;
  j["flagged"] = flagged;
  j["ratios"] = ratios;
  nlohmann::ordered_json rs = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    rs.push_back({{"n", r.n}, {"k", r.k}, {"mean_norm", r.mean_norm}, {"sd_norm", r.sd_norm}});
  }
  j["rows"] = std::move(rs);
  return j;
}

T41Table run_t41_check(const ModelSpec& model, std::span<const int> ks,
                       std::span<const std::size_t> n_values, std::size_t replications,
                       const FrequencyGrid& grid, std::size_t parallelism,
                       const std::filesystem::path& output_dir) {
  model.validate();
  if (ks.empty() || n_values.empty()) {
    throw std::invalid_argument("run_t41_check: ks and n_values must be nonempty");
  }
  for (int k : ks) {
    if (k < 0 || k > 2) throw std::invalid_argument("run_t41_check: k must be 0, 1 or 2");
  }
  if (replications < 1) throw std::invalid_argument("run_t41_check: replications must be >= 1");

  // |phi_n - phi| is even in u, so the nonnegative half grid gives the same sup.
  const FrequencyGrid half = grid.nonnegative_half();
  std::vector<CfTriple> exact;
  exact.reserve(half.size());
  for (double u : half.nodes()) exact.push_back(exact_cf(model, u));

  // norms[(ni * replications + r) * 3 + k]
  const std::size_t tasks = n_values.size() * replications;
  std::vector<double> norms(tasks * 3, 0.0);
  parallel_for(tasks, parallelism, [&](std::size_t t) {
    const std::size_t n = n_values[t / replications];
    const SampleSet samples = sample_increments(model, n, t % replications);
    const std::vector<CfTriple> emp = empirical_cf_table(samples, half.nodes());
    const double root_n = std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < half.size(); ++i) {
      for (int k = 0; k < 3; ++k) {
        const double v = half.weights()[i] * root_n * std::abs(emp[i][k] - exact[i][k]);
        norms[t * 3 + k] = std::max(norms[t * 3 + k], v);
      }
    }
  });

  T41Table table;
  table.model = model;
  for (std::size_t ni = 0; ni < n_values.size(); ++ni) {
    for (int k : ks) {
      double sum = 0.0;
      double sq = 0.0;
      for (std::size_t r = 0; r < replications; ++r) {
        const double v = norms[(ni * replications + r) * 3 + k];
        sum += v;
        sq += v * v;
      }
      const double reps = static_cast<double>(replications);
      const double mean = sum / reps;
      const double var = replications > 1 ? std::max(0.0, (sq - reps * mean * mean) / (reps - 1))
                                          : 0.0;
      table.rows.push_back(T41Row{n_values[ni], k, mean, std::sqrt(var)});
    }
  }
  const std::size_t nk = ks.size();
  for (std::size_t ki = 0; ki < nk; ++ki) {
    const double first = table.rows[ki].mean_norm;
    const double last = table.rows[(n_values.size() - 1) * nk + ki].mean_norm;
    // Norms at rounding level (degenerate laws) carry no growth signal.
    constexpr double kRoundingFloor = 1e-10;
    double ratio = 1.0;
    if (first > kRoundingFloor) {
      ratio = last / first;
    } else if (last > kRoundingFloor) {
      ratio = std::numeric_limits<double>::infinity();
    }
    table.ratios.push_back(ratio);
    if (ratio > table.threshold) table.flagged = true;
  }

  if (!output_dir.empty()) {
    write_json(output_dir, "t41.json", table.to_json());
    auto out = open_output(output_dir, "t41.csv");
    out << "n,k,mean_norm,sd_norm\n";
    for (const auto& r : table.rows) {
      out << r.n << ',' << r.k << ',' << num(r.mean_norm) << ',' << num(r.sd_norm) << '\n';
    }
    close_output(out, output_dir, "t41.csv");
  }
  return table;
}

std::string_view to_string(DecayCase c) {
  switch (c) {
    case DecayCase::gaussian:
      return "gaussian";
    case DecayCase::exponential:
      return "exponential";
    case DecayCase::polynomial:
      return "polynomial";
  }
  return "unknown";
}

DecayCase decay_case(const ModelSpec& model) {
  if (model.kind() == ModelKind::normal_inverse_gaussian) return DecayCase::exponential;
  return gaussian_sigma(model) > 0.0 ? DecayCase::gaussian : DecayCase::polynomial;
}

double measure_cf_decay_order(const ModelSpec& model) {
  // -log|phi(u)| = -Re Psi(u), which stays finite where |phi| underflows.
  constexpr int kPoints = 41;
  std::vector<double> x, y;
  for (int i = 0; i < kPoints; ++i) {
    const double u = std::pow(10.0, 1.0 + 2.0 * i / (kPoints - 1));
    x.push_back(std::log1p(u));
    y.push_back(-exact_exponent(model, u).d0.real());
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / kPoints;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / kPoints;
  double sxy = 0.0;
  double sxx = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return std::max(0.0, sxy / sxx);
}

nlohmann::ordered_json RateTable::to_json() const {
  nlohmann::ordered_json j;
  j["model"] = levyfit::to_json(model);
  j["decay"] = std::string(to_string(decay));
  j["beta"] = beta ? nlohmann::ordered_json(*beta) : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json rs = nlohmann::ordered_json::array();
  for (const auto& r : rows) rs.push_back({{"n", r.n}, {"s", r.s}, {"median_loss", r.median_loss}});
  j["rows"] = std::move(rs);
  nlohmann::ordered_json ss = nlohmann::ordered_json::array();
  for (const auto& s : slopes) {
    nlohmann::ordered_json e;
    e["s"] = s.s;
    e["slope"] = s.slope ? nlohmann::ordered_json(*s.slope) : nlohmann::ordered_json(nullptr);
    e["target"] = s.target ? nlohmann::ordered_json(*s.target) : nlohmann::ordered_json(nullptr);
    ss.push_back(std::move(e));
  }
  j["slopes"] = std::move(ss);
  return j;
}

RateTable run_rate_study(const ExperimentPlan& plan) {
  plan.validate();
  const GridMeasure truth = truth_for(plan);
  const std::size_t reps = plan.replications;

  RateTable table;
  table.model = plan.model;
  table.decay = decay_case(plan.model);
  if (table.decay == DecayCase::polynomial) table.beta = measure_cf_decay_order(plan.model);

  table.replications.resize(plan.n_values.size() * reps);
  parallel_for(table.replications.size(), plan.parallelism, [&](std::size_t t) {
    table.replications[t] = run_replication(plan, plan.n_values[t / reps], t % reps, &truth);
  });

  std::vector<double> ns;
  for (std::size_t n : plan.n_values) ns.push_back(static_cast<double>(n));
  for (std::size_t si = 0; si < plan.s_values.size(); ++si) {
    const double s = plan.s_values[si];
    std::vector<double> medians;
    for (std::size_t ni = 0; ni < plan.n_values.size(); ++ni) {
      std::vector<double> losses;
      for (std::size_t r = 0; r < reps; ++r) {
        losses.push_back(table.replications[ni * reps + r].losses[si]);
      }
      medians.push_back(median(losses));
      table.rows.push_back(RateRow{plan.n_values[ni], s, medians.back()});
    }
    RateSlope slope;
    slope.s = s;
    slope.slope = log_log_slope(ns, medians);
    if (table.beta) {
      const double beta = *table.beta;
      slope.target = beta > 0.0 ? std::max(-s / (2.0 * beta), -0.5) : -0.5;
    }
    table.slopes.push_back(slope);
  }

  if (!plan.output_dir.empty()) {
    const auto& dir = plan.output_dir;
    nlohmann::ordered_json j = table.to_json();
    j["plan"] = to_json(plan);
    write_json(dir, "rates.json", j);
    {
      auto out = open_output(dir, "rates.csv");
      out << "n,s,median_loss\n";
      for (const auto& r : table.rows) {
        out << r.n << ',' << num(r.s) << ',' << num(r.median_loss) << '\n';
      }
      close_output(out, dir, "rates.csv");
    }
    {
      auto out = open_output(dir, "rate_replications.csv");
      write_records_csv(out, plan, table.replications);
      close_output(out, dir, "rate_replications.csv");
    }
  }
  return table;
}

std::optional<double> log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("log_log_slope: size mismatch");
  if (x.size() < 2) return std::nullopt;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::nullopt;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double m = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / m;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / m;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

nlohmann::ordered_json to_json(const ExperimentPlan& plan) {
  nlohmann::ordered_json j;
  j["model"] = to_json(plan.model);
  j["n_values"] = plan.n_values;
  j["replications"] = plan.replications;
  j["s_values"] = plan.s_values;
  j["output_dir"] = plan.output_dir.string();
  j["parallelism"] = plan.parallelism;
  j["fit_grid"] = grid_json(plan.fit_grid);
  j["support"] = {plan.support_lo, plan.support_hi};
  j["bins"] = plan.bins;
  j["kappa"] = plan.kappa;
  j["max_iters"] = plan.max_iters;
  j["loss_grid"] = grid_json(plan.loss_grid);
  j["truth_refinement"] = plan.truth_refinement;
  return j;
}

}  // namespace levyfit
