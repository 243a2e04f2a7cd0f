// permuton-lab: sampling, limit parameters, and experiment reproduction for
// random permutation models on the unit square.
//
// Exit codes: 0 success, 1 usage/configuration error, 2 embedded assertion
// failure (the failing criterion is named on stderr).

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "permlab/enumeration.hpp"
#include "permlab/experiment.hpp"
#include "permlab/io.hpp"
#include "permlab/limits.hpp"
#include "permlab/samplers.hpp"

namespace {

using permlab::json;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PERMUTON_LAB_SEED"))
    return std::strtoull(env, nullptr, 10);
  return permlab::kDefaultSeed;
}

/// Arguments accept inline JSON or @path to a JSON file.
json parse_json_arg(const std::string& arg) {
  if (!arg.empty() && arg.front() == '@') {
    std::ifstream in(arg.substr(1));
    if (!in) throw std::invalid_argument("cannot open file: " + arg.substr(1));
    return json::parse(in);
  }
  return json::parse(arg);
}

json parse_json_or_string(const std::string& arg) {
  if (!arg.empty() && (arg.front() == '{' || arg.front() == '[' || arg.front() == '@'))
    return parse_json_arg(arg);
  return json(arg);
}

struct SampleArgs {
  std::string model;
  std::int64_t count = 1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  int grid_k = 0;
  std::int64_t burn_in = -2, thin = -2;  // -2: keep the model's values
};

struct LimitsArgs {
  std::string density = R"({"kind":"uniform"})";
  int n = 100;
  std::string sigma = "identity";
  int lmax = 4;
  int grid_k = 512;
  std::string out;
};

struct ExperimentArgs {
  std::string config;
  std::string model;
  std::string statistic = "fixed_points";
  std::int64_t count = 10000;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
  int lmax = 3;
  int grid_k = 0;
  std::int64_t burn_in = -2, thin = -2;
  std::string out;
  std::string format;
};

void apply_model_overrides(permlab::ModelSpec& spec, std::int64_t burn_in, std::int64_t thin,
                           int grid_k) {
  if (auto* e = std::get_if<permlab::ExpFamilyModel>(&spec)) {
    if (burn_in != -2) e->burn_in = burn_in;
    if (thin != -2) e->thin = thin;
  }
  if (auto* mu = std::get_if<permlab::MuRandomModel>(&spec)) {
    if (grid_k > 0) mu->grid_k = grid_k;
  }
}

int run_sample(const SampleArgs& a) {
  permlab::ModelSpec spec = permlab::model_from_json(parse_json_arg(a.model));
  apply_model_overrides(spec, a.burn_in, a.thin, a.grid_k);
  permlab::validate_model(spec);
  const std::uint64_t seed = a.seed_set ? a.seed : default_seed();

  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!a.out.empty() && a.out != "-") {
    file.open(a.out);
    if (!file) throw std::invalid_argument("cannot open output file: " + a.out);
    os = &file;
  }

  const permlab::RandomStream root(seed);
  if (const auto* z = std::get_if<permlab::IndependentZModel>(&spec)) {
    const permlab::IndependentZSampler sampler(z->density, z->n);
    std::vector<std::int32_t> buf;
    for (std::int64_t r = 0; r < a.count; ++r) {
      permlab::RandomStream rs = root.split(static_cast<std::uint64_t>(r));
      sampler.sample(rs, buf);
      *os << json(buf).dump() << '\n';
    }
    return 0;
  }
  if (const auto* e = std::get_if<permlab::ExpFamilyModel>(&spec)) {
    permlab::ExpFamilyChain chain(*e, root.split(0));
    chain.advance(e->resolved_burn_in());
    for (std::int64_t r = 0; r < a.count; ++r) {
      if (r > 0) chain.advance(e->resolved_thin());
      *os << json(chain.targets()).dump() << '\n';
    }
    return 0;
  }
  for (std::int64_t r = 0; r < a.count; ++r) {
    permlab::RandomStream rs = root.split(static_cast<std::uint64_t>(r));
    *os << permlab::permutation_to_json(permlab::sample_permutation(spec, rs)).dump() << '\n';
  }
  return 0;
}

int run_limits(const LimitsArgs& a) {
  const permlab::Density d = permlab::density_from_json(parse_json_arg(a.density));
  permlab::validate_density(d);
  permlab::Permutation sigma = permlab::Permutation::identity(a.n);
  if (a.sigma == "reversal") sigma = permlab::Permutation::reversal(a.n);
  else if (a.sigma != "identity") sigma = permlab::permutation_from_json(parse_json_arg(a.sigma));

  json out;
  out["density"] = permlab::density_to_json(d);
  out["n"] = a.n;
  out["sigma"] = a.sigma;
  double mu_rho;
  if (a.sigma == "identity")
    mu_rho = permlab::integrate_gl([&](double x) { return d(x, x); }, 0.0, 1.0, 256, 8);
  else if (a.sigma == "reversal")
    mu_rho = permlab::integrate_gl([&](double x) { return d(x, 1.0 - x); }, 0.0, 1.0, 256, 8);
  else
    mu_rho = permlab::mu_rho_along(d, sigma);
  out["mu_rho"] = mu_rho;
  json crho = json::array();
  for (int l = 1; l <= a.lmax; ++l) crho.push_back(permlab::c_rho(d, l, a.grid_k));
  out["c_rho"] = crho;
  const auto overlap_bound = permlab::stein_tv_bound_overlap(d, sigma);
  out["lambda_n"] = overlap_bound.lambda_n;
  out["stein_overlap"] = permlab::stein_bound_to_json(overlap_bound);
  json cycles = json::array();
  const permlab::IndependentZSampler sampler(d, a.n);
  for (int l = 2; l <= std::min(a.lmax, 3); ++l)
    cycles.push_back(permlab::stein_bound_to_json(
        permlab::stein_tv_bound_cycle(d, a.n, l, sampler.lambda_cycle(l))));
  out["stein_cycle"] = cycles;

  if (!a.out.empty()) {
    std::ofstream file(a.out);
    if (!file) throw std::invalid_argument("cannot open output file: " + a.out);
    file << out.dump(2) << '\n';
  } else {
    std::cout << out.dump(2) << '\n';
  }
  return 0;
}

int emit_experiment(const permlab::ExperimentReport& rep, const std::string& out,
                    const std::string& format, const std::string& reference_col) {
  if (!out.empty()) {
    std::ofstream jf(out + ".json");
    if (!jf) throw std::invalid_argument("cannot open output file: " + out + ".json");
    jf << permlab::report_to_json(rep).dump(2) << '\n';
    std::ofstream cf(out + ".csv");
    if (!cf) throw std::invalid_argument("cannot open output file: " + out + ".csv");
    permlab::pmf_to_csv(rep, cf, reference_col);
  }
  if (format == "json") {
    std::cout << permlab::report_to_json(rep).dump(2) << '\n';
  } else if (format == "csv") {
    permlab::pmf_to_csv(rep, std::cout, reference_col);
  } else {
    std::cout << "model: " << rep.model_label << "\nstatistic: " << rep.statistic_label
              << "\nreplicates: " << rep.replicates << "\nempirical mean: " << rep.mean;
    if (std::isfinite(rep.lambda_finite_n)) std::cout << "\nlambda_n: " << rep.lambda_finite_n;
    if (std::isfinite(rep.lambda_reference))
      std::cout << "\nasymptotic lambda: " << rep.lambda_reference
                << "\n|mean - lambda|: " << std::abs(rep.mean - rep.lambda_reference);
    if (std::isfinite(rep.tv_to_reference))
      std::cout << "\nTV to Poi(lambda): " << rep.tv_to_reference;
    std::cout << "\nchi2 vs Poi(mean): " << rep.chi2_fitted.statistic
              << " (df " << rep.chi2_fitted.df << ", p " << rep.chi2_fitted.p_value << ")\n";
  }
  if (!rep.assertions_pass) {
    for (const auto& f : rep.assertion_failures)
      std::cerr << "assertion failed: " << f << '\n';
    return 2;
  }
  return 0;
}

int run_exp(const ExperimentArgs& a) {
  permlab::ExperimentConfig cfg;
  if (!a.config.empty()) {
    cfg = permlab::experiment_config_from_json(parse_json_arg(a.config));
  } else {
    if (a.model.empty())
      throw std::invalid_argument("experiment: need --config or --model");
    cfg.model = permlab::model_from_json(parse_json_arg(a.model));
    cfg.statistic = permlab::statistic_from_json(parse_json_or_string(a.statistic),
                                                 permlab::model_size(cfg.model));
    cfg.replicates = a.count;
    if (cfg.statistic.kind == permlab::StatisticKind::cycle_counts) cfg.statistic.l_max = a.lmax;
  }
  apply_model_overrides(cfg.model, a.burn_in, a.thin, a.grid_k);
  if (a.seed_set) cfg.seed = a.seed;
  else if (a.config.empty()) cfg.seed = default_seed();
  cfg.threads = a.threads;
  const permlab::ExperimentReport rep = permlab::run_experiment(cfg);
  return emit_experiment(rep, a.out, a.format, "reference_prob");
}

int run_fig1(std::int64_t count, std::uint64_t seed, int threads, const std::string& out,
             const std::string& format) {
  permlab::ExperimentConfig cfg;
  const int n = 100;
  cfg.model = permlab::MallowsModel{n, std::exp(-20.0 / n)};
  cfg.statistic.kind = permlab::StatisticKind::fixed_points;
  cfg.replicates = count;
  cfg.seed = seed;
  cfg.threads = threads;
  const permlab::ExperimentReport rep = permlab::run_experiment(cfg);
  return emit_experiment(rep, out, format, "poisson_prob");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"permutation-model sampling, Poisson limit parameters, and Monte Carlo "
               "experiment reports"};
  app.name("permuton-lab");
  app.require_subcommand(1);

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "draw permutations, one JSON array per line");
  sample->add_option("--model", sa.model, "model spec JSON (inline or @file)")->required();
  sample->add_option("--count", sa.count, "number of draws");
  sample->add_option("--seed", sa.seed, "random seed (default 1729 or $PERMUTON_LAB_SEED)")
      ->each([&](const std::string&) { sa.seed_set = true; });
  sample->add_option("--out", sa.out, "output path ('-' or empty: stdout)");
  sample->add_option("--grid-k", sa.grid_k, "mu-random grid resolution override");
  sample->add_option("--burn-in", sa.burn_in, "exp-family burn-in swaps override");
  sample->add_option("--thin", sa.thin, "exp-family thinning swaps override");

  LimitsArgs la;
  auto* limits = app.add_subcommand("limits", "Poisson limit parameters and Stein bounds");
  limits->add_option("--density", la.density, "density spec JSON (inline or @file)");
  limits->add_option("--n", la.n, "size for finite-n parameters");
  limits->add_option("--sigma", la.sigma, "overlap target: identity, reversal, or JSON");
  limits->add_option("--lmax", la.lmax, "largest cycle length l for c_rho");
  limits->add_option("--grid-k", la.grid_k, "kernel-trace grid resolution");
  limits->add_option("--out", la.out, "write JSON here instead of stdout");

  ExperimentArgs ea;
  auto* experiment =
      app.add_subcommand("experiment", "Monte Carlo experiment -> report JSON + pmf CSV");
  experiment->add_option("--config", ea.config, "full experiment config JSON (inline or @file)");
  experiment->add_option("--model", ea.model, "model spec JSON (inline or @file)");
  experiment->add_option("--statistic", ea.statistic,
                         "fixed_points | overlap | cycle_counts | joint_cycle_moments | JSON");
  experiment->add_option("--count", ea.count, "replicates");
  experiment->add_option("--seed", ea.seed, "random seed (default 1729 or $PERMUTON_LAB_SEED)")
      ->each([&](const std::string&) { ea.seed_set = true; });
  experiment->add_option("--threads", ea.threads, "worker threads");
  experiment->add_option("--lmax", ea.lmax, "largest cycle length for cycle_counts");
  experiment->add_option("--grid-k", ea.grid_k, "mu-random grid resolution override");
  experiment->add_option("--burn-in", ea.burn_in, "exp-family burn-in swaps override");
  experiment->add_option("--thin", ea.thin, "exp-family thinning swaps override");
  experiment->add_option("--out", ea.out, "report base path (writes <out>.json and <out>.csv)");
  experiment->add_option("--format", ea.format, "stdout format: json | csv (default: summary)");

  std::int64_t f1_count = 10000;
  std::uint64_t f1_seed = 0;
  bool f1_seed_set = false;
  int f1_threads = 1;
  std::string f1_out, f1_format;
  auto* fig1 = app.add_subcommand(
      "fig1", "preset: Mallows n=100, q=e^{-20/n}, 10^4 replicates, fixed points");
  fig1->add_option("--count", f1_count, "replicates");
  fig1->add_option("--seed", f1_seed, "random seed (default 1729 or $PERMUTON_LAB_SEED)")
      ->each([&](const std::string&) { f1_seed_set = true; });
  fig1->add_option("--threads", f1_threads, "worker threads");
  fig1->add_option("--out", f1_out, "report base path (writes <out>.json and <out>.csv)");
  fig1->add_option("--format", f1_format, "stdout format: json | csv (default: summary)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sample->parsed()) return run_sample(sa);
    if (limits->parsed()) return run_limits(la);
    if (experiment->parsed()) return run_exp(ea);
    if (fig1->parsed())
      return run_fig1(f1_count, f1_seed_set ? f1_seed : default_seed(), f1_threads, f1_out,
                      f1_format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
