// levyfit command line: simulate, pilot, fit, example, t41-check, rates.
//
// Every subcommand prints a one-line JSON summary on stdout. Failures print
// {"error": {"kind": ..., "message": ...}} on stderr and exit nonzero
// (2: bad arguments, 3: input/output, 1: anything else).

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "levyfit/charfn.hpp"
#include "levyfit/experiment.hpp"
#include "levyfit/fit.hpp"
#include "levyfit/pilot.hpp"
#include "levyfit/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace levyfit;

namespace {

constexpr const char* kOutputEnv = "LEVYFIT_OUTPUT_DIR";

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 20080601;
  std::string output_dir = "levyfit-out";
  double u_max = 20.0;
  double step = 0.05;
  double delta = 0.25;
  double support_lo = -10.0;
  double support_hi = 10.0;
  std::size_t bins = 16;
  double kappa = 1.0;
  std::size_t threads = 1;

  FrequencyGrid grid() const { return FrequencyGrid(u_max, step, delta); }
};

void add_output(CLI::App* cmd, Common& c) {
  cmd->add_option("-o,--output-dir", c.output_dir, "Output directory")
      ->envname(kOutputEnv)
      ->capture_default_str();
}

void add_seed(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Base seed")->capture_default_str();
}

void add_grid(CLI::App* cmd, Common& c) {
  cmd->add_option("--u-max", c.u_max, "Largest fit frequency")->capture_default_str();
  cmd->add_option("--step", c.step, "Frequency grid step")->capture_default_str();
  cmd->add_option("--delta", c.delta, "Weight exponent delta")->capture_default_str();
}

void add_layout(CLI::App* cmd, Common& c) {
  cmd->add_option("--support-lo", c.support_lo, "Left end of the support")->capture_default_str();
  cmd->add_option("--support-hi", c.support_hi, "Right end of the support")->capture_default_str();
  cmd->add_option("--bins", c.bins, "Number of bins")->capture_default_str()->check(
      CLI::PositiveNumber);
  cmd->add_option("--kappa", c.kappa, "Pilot threshold constant")->capture_default_str();
}

void add_threads(CLI::App* cmd, Common& c) {
  cmd->add_option("-j,--threads", c.threads, "Parallel replications")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

struct ModelArgs {
  std::string kind = "brownian_gamma";
  std::vector<std::string> params;
};

void add_model(CLI::App* cmd, ModelArgs& m, const std::string& default_kind) {
  m.kind = default_kind;
  cmd->add_option("-m,--model", m.kind,
                  "brownian_gamma, compound_poisson, bilateral_gamma, pure_gaussian or nig")
      ->capture_default_str();
  cmd->add_option("-p,--param", m.params, "Model parameter override, key=value (repeatable)");
}

ModelSpec build_model(const ModelArgs& m, std::uint64_t seed) {
  nlohmann::json j;
  j["kind"] = m.kind;
  j["seed"] = seed;
  nlohmann::json params = nlohmann::json::object();
  const ModelSpec defaults = ModelSpec::defaults(model_kind_from_string(m.kind), seed);
  const auto known = to_json(defaults)["params"];
  for (const auto& kv : m.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--param expects key=value: " + kv);
    const std::string key = kv.substr(0, eq);
    if (!known.contains(key)) {
      throw std::invalid_argument("unknown parameter '" + key + "' for model " + m.kind);
    }
    std::size_t used = 0;
    const std::string text = kv.substr(eq + 1);
    double value = 0.0;
    try {
      value = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) {
      throw std::invalid_argument("parameter '" + key + "' is not a number: " + text);
    }
    params[key] = value;
  }
  j["params"] = params;
  return model_spec_from_json(j);
}

std::ofstream open_file(const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.precision(17);
  return out;
}

void finish_file(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

void write_json_file(const fs::path& path, const ordered_json& j) {
  auto out = open_file(path);
  out << j.dump(2) << '\n';
  finish_file(out, path);
}

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

// One increment per line; a non-numeric first line is taken as a header.
SampleSet read_increments(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string cell = line.substr(0, line.find(','));
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0') {
      if (line_no == 1) continue;
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": not a number: " + cell);
    }
    values.push_back(v);
  }
  if (values.empty()) throw IoError(path.string() + ": no increments");
  return SampleSet(std::move(values));
}

PilotConfig pilot_config(const Common& c) {
  PilotConfig pc;
  pc.kappa = c.kappa;
  pc.grid = c.grid();
  pc.support_lo = c.support_lo;
  pc.support_hi = c.support_hi;
  pc.bins = c.bins;
  pc.validate();
  return pc;
}

void write_density_csv(const fs::path& path, const GridMeasure& nu) {
  auto out = open_file(path);
  out << "lo,hi,density\n";
  for (std::size_t j = 0; j < nu.bin_count(); ++j) {
    const auto [lo, hi] = nu.bin_edges(j);
    out << lo << ',' << hi << ',' << nu.bins()[j] << '\n';
  }
  finish_file(out, path);
}

void emit(const ordered_json& summary) { std::cout << summary.dump() << std::endl; }

int run_simulate(const Common& c, const ModelArgs& m, std::size_t n, std::uint64_t replication) {
  const ModelSpec spec = build_model(m, c.seed);
  const SampleSet samples = sample_increments(spec, n, replication);
  const fs::path dir(c.output_dir);
  const fs::path csv = dir / "increments.csv";
  {
    auto out = open_file(csv);
    out << "increment\n";
    for (double z : samples.increments()) out << z << '\n';
    finish_file(out, csv);
  }
  ordered_json side;
  side["spec"] = to_json(spec);
  side["seed"] = spec.seed;
  side["replication"] = replication;
  side["n"] = n;
  side["truth"] = {{"mean", model_mean(spec)},
                   {"variance", model_variance(spec)},
                   {"decay", std::string(to_string(decay_case(spec)))}};
  write_json_file(dir / "increments.json", side);
  emit({{"status", "ok"},
        {"command", "simulate"},
        {"outputs", {csv.string(), (dir / "increments.json").string()}}});
  return 0;
}

int run_pilot(const Common& c, const std::string& input) {
  const SampleSet samples = read_increments(input);
  const PilotConfig pc = pilot_config(c);
  const PilotEstimate pilot = project_pilot(samples, pc);
  const fs::path dir(c.output_dir);
  ordered_json j = to_json(pilot);
  j["n"] = samples.size();
  write_json_file(dir / "pilot.json", j);
  const fs::path csv = dir / "pilot_fnu.csv";
  {
    auto out = open_file(csv);
    out << "u,re,im,active\n";
    const auto nodes = pc.grid.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      out << nodes[i] << ',' << pilot.fnu[i].real() << ',' << pilot.fnu[i].imag() << ','
          << (pilot.active[i] ? 1 : 0) << '\n';
    }
    finish_file(out, csv);
  }
  emit({{"status", "ok"},
        {"command", "pilot"},
        {"b", pilot.b},
        {"ridge_used", pilot.ridge_used},
        {"outputs", {(dir / "pilot.json").string(), csv.string()}}});
  return 0;
}

int run_fit(const Common& c, const std::string& input, const std::string& pilot_path,
            std::size_t max_iters) {
  const SampleSet samples = read_increments(input);
  double b_start = 0.0;
  GridMeasure start = GridMeasure::zero();
  if (!pilot_path.empty()) {
    const auto j = read_json_file(pilot_path);
    b_start = j.at("b").get<double>();
    start = grid_measure_from_json(j.at("nu"));
  } else {
    const PilotEstimate pilot = project_pilot(samples, pilot_config(c));
    b_start = pilot.b;
    start = pilot.nu;
  }
  FitConfig cfg;
  cfg.grid = c.grid();
  cfg.max_iters = max_iters;
  const FitObjective obj(samples, cfg.grid, start.support_lo(), start.support_hi(),
                         start.bin_count());
  const FitResult result = minimize(obj, b_start, start, cfg);

  const fs::path dir(c.output_dir);
  ordered_json j = to_json(result);
  j["n"] = samples.size();
  j["sigma_hat"] = std::sqrt(result.nu_hat.atom_mass());
  j["tail_hat"] = jump_tail_functional(result.nu_hat, 1.0);
  j["hf_baseline"] = hf_baseline(samples, 1.0);
  write_json_file(dir / "fit.json", j);
  const fs::path cf = dir / "fit_cf.csv";
  {
    auto out = open_file(cf);
    const CharExponentModel model{result.b_hat, result.nu_hat};
    write_cf_csv(out, cfg.grid, [&model](double u) { return model_cf(model, u); }, {});
    finish_file(out, cf);
  }
  write_density_csv(dir / "density.csv", result.nu_hat);
  emit({{"status", "ok"},
        {"command", "fit"},
        {"objective", result.objective},
        {"converged", result.converged},
        {"outputs", {(dir / "fit.json").string(), cf.string(), (dir / "density.csv").string()}}});
  return 0;
}

int run_example_cmd(const Common& c, std::size_t n, std::size_t reps, std::size_t max_iters) {
  ExperimentPlan plan = example_plan(c.seed);
  plan.n_values = {n};
  plan.replications = reps;
  plan.output_dir = c.output_dir;
  plan.parallelism = c.threads;
  plan.fit_grid = c.grid();
  plan.support_lo = c.support_lo;
  plan.support_hi = c.support_hi;
  plan.bins = c.bins;
  plan.kappa = c.kappa;
  plan.max_iters = max_iters;
  const ExampleReport report = run_example(plan);
  emit({{"status", "ok"},
        {"command", "example"},
        {"median_abs_b_error", report.median_abs_b_error},
        {"median_abs_sigma_error", report.median_abs_sigma_error},
        {"median_tail", report.median_tail},
        {"mean_hf", report.mean_hf},
        {"fraction_closer_than_truth", report.fraction_closer_than_truth},
        {"outputs", {(fs::path(c.output_dir) / "report.json").string()}}});
  return 0;
}

int run_t41_cmd(const Common& c, const ModelArgs& m, const std::vector<int>& ks,
                const std::vector<std::size_t>& ns, std::size_t reps) {
  const ModelSpec spec = build_model(m, c.seed);
  const T41Table table = run_t41_check(spec, ks, ns, reps, c.grid(), c.threads, c.output_dir);
  emit({{"status", "ok"},
        {"command", "t41-check"},
        {"ratios", table.ratios},
        {"flagged", table.flagged},
        {"outputs", {(fs::path(c.output_dir) / "t41.json").string()}}});
  return 0;
}

int run_rates_cmd(const Common& c, const ModelArgs& m, const std::vector<std::size_t>& ns,
                  std::size_t reps, const std::vector<double>& s_values, bool layout_given,
                  std::size_t max_iters) {
  const ModelSpec spec = build_model(m, c.seed);
  ExperimentPlan plan = rate_plan(spec.kind(), c.seed);
  plan.model = spec;
  if (!ns.empty()) plan.n_values = ns;
  plan.replications = reps;
  plan.s_values = s_values;
  plan.output_dir = c.output_dir;
  plan.parallelism = c.threads;
  plan.fit_grid = c.grid();
  plan.kappa = c.kappa;
  plan.max_iters = max_iters;
  if (layout_given) {
    plan.support_lo = c.support_lo;
    plan.support_hi = c.support_hi;
    plan.bins = c.bins;
  }
  const RateTable table = run_rate_study(plan);
  ordered_json slopes = table.to_json()["slopes"];
  emit({{"status", "ok"},
        {"command", "rates"},
        {"decay", std::string(to_string(table.decay))},
        {"slopes", slopes},
        {"outputs", {(fs::path(c.output_dir) / "rates.json").string()}}});
  return 0;
}

int fail(const char* kind, const std::string& message, int code) {
  ordered_json j;
  j["error"] = {{"kind", kind}, {"message", message}};
  std::cerr << j.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Levy triplet estimation from low-frequency increments"};
  app.require_subcommand(1);
  Common c;
  ModelArgs sim_model, t41_model, rate_model;

  auto* sim = app.add_subcommand("simulate", "Simulate increments of a model");
  std::size_t n = 1000;
  std::uint64_t replication = 0;
  add_model(sim, sim_model, "brownian_gamma");
  add_seed(sim, c);
  sim->add_option("-n,--n", n, "Number of increments")->capture_default_str()->check(
      CLI::PositiveNumber);
  sim->add_option("--replication", replication, "Replication index (random stream)")
      ->capture_default_str();
  add_output(sim, c);

  auto* pil = app.add_subcommand("pilot", "Pilot estimate from an increments CSV");
  std::string input;
  pil->add_option("-i,--input", input, "Increments CSV")->required();
  add_grid(pil, c);
  add_layout(pil, c);
  add_output(pil, c);

  auto* fitc = app.add_subcommand("fit", "Minimum-distance fit from an increments CSV");
  std::string pilot_path;
  std::size_t max_iters = 4000;
  fitc->add_option("-i,--input", input, "Increments CSV")->required();
  fitc->add_option("--pilot", pilot_path, "pilot.json to start from (default: compute it)");
  fitc->add_option("--max-iters", max_iters, "Sweep budget")->capture_default_str();
  add_grid(fitc, c);
  add_layout(fitc, c);
  add_output(fitc, c);

  auto* ex = app.add_subcommand("example", "Worked example with replications");
  std::size_t reps = 20;
  add_seed(ex, c);
  ex->add_option("-n,--n", n, "Sample size")->capture_default_str()->check(CLI::PositiveNumber);
  ex->add_option("-r,--replications", reps, "Replications")->capture_default_str()->check(
      CLI::PositiveNumber);
  ex->add_option("--max-iters", max_iters, "Sweep budget per fit")->capture_default_str();
  add_grid(ex, c);
  add_layout(ex, c);
  add_threads(ex, c);
  add_output(ex, c);

  auto* t41 = app.add_subcommand("t41-check", "Boundedness of the normalized CF process");
  std::vector<int> ks{0, 1, 2};
  std::vector<std::size_t> ns{100, 1000, 10000};
  std::size_t t41_reps = 100;
  add_model(t41, t41_model, "pure_gaussian");
  add_seed(t41, c);
  t41->add_option("-k,--k", ks, "Derivative orders")->capture_default_str()->check(
      CLI::Range(0, 2));
  t41->add_option("-n,--n", ns, "Sample sizes")->capture_default_str();
  t41->add_option("-r,--replications", t41_reps, "Replications")->capture_default_str();
  add_grid(t41, c);
  add_threads(t41, c);
  add_output(t41, c);

  auto* rates = app.add_subcommand("rates", "Loss rates over sample sizes");
  std::vector<std::size_t> rate_ns;
  std::size_t rate_reps = 20;
  std::vector<double> s_values{1.0};
  add_model(rates, rate_model, "compound_poisson");
  add_seed(rates, c);
  rates->add_option("-n,--n", rate_ns, "Sample sizes (default 500 2000 8000)");
  rates->add_option("-r,--replications", rate_reps, "Replications")->capture_default_str();
  rates->add_option("-s,--s", s_values, "Loss smoothness indices")->capture_default_str();
  rates->add_option("--max-iters", max_iters, "Sweep budget per fit")->capture_default_str();
  add_grid(rates, c);
  add_layout(rates, c);
  add_threads(rates, c);
  add_output(rates, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    if (*sim) return run_simulate(c, sim_model, n, replication);
    if (*pil) return run_pilot(c, input);
    if (*fitc) return run_fit(c, input, pilot_path, max_iters);
    if (*ex) return run_example_cmd(c, n, reps, max_iters);
    if (*t41) return run_t41_cmd(c, t41_model, ks, ns, t41_reps);
    if (*rates) {
      const bool layout_given = rates->count("--support-lo") + rates->count("--support-hi") +
                                    rates->count("--bins") >
                                0;
      return run_rates_cmd(c, rate_model, rate_ns, rate_reps, s_values, layout_given, max_iters);
    }
  } catch (const IoError& e) {
    return fail("io", e.what(), 3);
  } catch (const std::invalid_argument& e) {
    return fail("invalid_argument", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), 1);
  }
  return fail("usage", "no subcommand", 2);
}
