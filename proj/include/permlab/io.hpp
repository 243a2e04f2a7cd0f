#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "permlab/density.hpp"
#include "permlab/experiment.hpp"
#include "permlab/permutation.hpp"
#include "permlab/samplers.hpp"

namespace permlab {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// permutations and censuses
// ---------------------------------------------------------------------------

/// A permutation serializes as a JSON array of 1-based targets.
inline json permutation_to_json(const Permutation& p) { return json(p.targets()); }

inline Permutation permutation_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("permutation: expected a JSON array");
  return Permutation::from_targets(j.get<std::vector<std::int32_t>>());
}

/// A cycle census serializes sparsely as {"length": count}.
inline json census_to_json(const CycleCensus& c) {
  json j = json::object();
  for (int l = 1; l <= c.n; ++l)
    if (c.count_of(l) > 0) j[std::to_string(l)] = c.count_of(l);
  return j;
}

inline CycleCensus census_from_json(const json& j, int n) {
  CycleCensus c;
  c.n = n;
  c.counts.assign(static_cast<std::size_t>(n), 0);
  for (const auto& [key, value] : j.items()) {
    const int l = std::stoi(key);
    if (l < 1 || l > n) throw std::invalid_argument("census: cycle length out of range");
    c.counts[static_cast<std::size_t>(l - 1)] = value.get<std::int64_t>();
  }
  return c;
}

// ---------------------------------------------------------------------------
// score functions and densities
// ---------------------------------------------------------------------------

inline ScoreFunction score_from_json(const json& j) {
  if (j.is_string()) return ScoreFunction::by_name(j.get<std::string>());
  if (j.is_object() && j.contains("grid")) {
    const auto& g = j.at("grid");
    return ScoreFunction::from_grid(g.at("k").get<int>(),
                                    g.at("values").get<std::vector<double>>());
  }
  throw std::invalid_argument("score function: expected a name or {\"grid\": {...}}");
}

inline json density_to_json(const Density& d) {
  switch (d.kind()) {
    case DensityKind::uniform:
      return json{{"kind", "uniform"}};
    case DensityKind::frank:
      return json{{"kind", "frank"}, {"beta", d.frank_beta()}};
    case DensityKind::exp_family:
      return json{{"kind", "exp_family"},
                  {"f", d.score().id},
                  {"theta", d.theta()},
                  {"k", d.grid_k()}};
    case DensityKind::grid:
      return json{{"kind", "grid"}, {"k", d.grid_k()}, {"values", d.grid_values()}};
  }
  throw std::logic_error("density_to_json: unknown kind");
}

inline Density density_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform") return Density::uniform();
  if (kind == "frank") return Density::frank(j.at("beta").get<double>());
  if (kind == "exp_family")
    return fit_exp_family(score_from_json(j.at("f")), j.at("theta").get<double>(),
                          j.value("k", 128));
  if (kind == "grid")
    return Density::from_grid(j.at("k").get<int>(), j.at("values").get<std::vector<double>>());
  throw std::invalid_argument("density: unknown kind '" + kind + "'");
}

/// Grid densities also serialize to CSV: k rows of k positive reals.
inline void density_grid_to_csv(const Density& d, std::ostream& os) {
  const int k = d.grid_k();
  if (k == 0) throw std::invalid_argument("density CSV: only grid-backed kinds");
  os << std::setprecision(17);
  const auto& v = d.grid_values();
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (j) os << ',';
      os << v[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) +
              static_cast<std::size_t>(j)];
    }
    os << '\n';
  }
}

inline Density density_grid_from_csv(std::istream& is) {
  std::vector<double> values;
  std::string line;
  int k = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    int cols = 0;
    while (std::getline(row, cell, ',')) {
      values.push_back(std::stod(cell));
      ++cols;
    }
    if (k == 0) k = cols;
    else if (cols != k) throw std::invalid_argument("density CSV: ragged rows");
  }
  if (k == 0 || values.size() != static_cast<std::size_t>(k) * static_cast<std::size_t>(k))
    throw std::invalid_argument("density CSV: expected k rows of k values");
  return Density::from_grid(k, std::move(values));
}

// ---------------------------------------------------------------------------
// model specifications
// ---------------------------------------------------------------------------

/// {"model": "mallows", "n": 100, "q": 0.81873075} — q may alternatively be
/// given as {"beta": 20}, meaning q = exp(-beta/n).
inline ModelSpec model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("model"))
    throw std::invalid_argument("model spec: expected an object with a \"model\" field");
  const std::string kind = j.at("model").get<std::string>();
  const int n = j.at("n").get<int>();
  if (kind == "uniform") return UniformModel{n};
  if (kind == "mallows") {
    double q;
    if (j.contains("q")) {
      q = j.at("q").get<double>();
    } else if (j.contains("beta")) {
      q = std::exp(-j.at("beta").get<double>() / n);
    } else {
      throw std::invalid_argument("mallows: need \"q\" or \"beta\"");
    }
    return MallowsModel{n, q};
  }
  if (kind == "exp_family") {
    ExpFamilyModel m{n, score_from_json(j.at("f")), j.at("theta").get<double>()};
    m.burn_in = j.value("burn_in", static_cast<std::int64_t>(-1));
    m.thin = j.value("thin", static_cast<std::int64_t>(-1));
    return m;
  }
  if (kind == "mu_random") {
    MuRandomModel m{n, density_from_json(j.at("density"))};
    m.grid_k = j.value("grid_k", 256);
    return m;
  }
  if (kind == "fixed_point_tilt") return FixedPointTiltModel{n, j.at("theta").get<double>()};
  if (kind == "independent_z") return IndependentZModel{n, density_from_json(j.at("density"))};
  throw std::invalid_argument("model spec: unknown model '" + kind + "'");
}

inline json model_to_json(const ModelSpec& spec) {
  json j;
  if (const auto* u = std::get_if<UniformModel>(&spec)) {
    j = {{"model", "uniform"}, {"n", u->n}};
  } else if (const auto* m = std::get_if<MallowsModel>(&spec)) {
    j = {{"model", "mallows"}, {"n", m->n}, {"q", m->q}};
  } else if (const auto* e = std::get_if<ExpFamilyModel>(&spec)) {
    j = {{"model", "exp_family"}, {"n", e->n}, {"f", e->f.id}, {"theta", e->theta},
         {"burn_in", e->resolved_burn_in()}, {"thin", e->resolved_thin()}};
  } else if (const auto* mu = std::get_if<MuRandomModel>(&spec)) {
    j = {{"model", "mu_random"}, {"n", mu->n}, {"density", density_to_json(mu->density)},
         {"grid_k", mu->grid_k}};
  } else if (const auto* t = std::get_if<FixedPointTiltModel>(&spec)) {
    j = {{"model", "fixed_point_tilt"}, {"n", t->n}, {"theta", t->theta}};
  } else if (const auto* z = std::get_if<IndependentZModel>(&spec)) {
    j = {{"model", "independent_z"}, {"n", z->n}, {"density", density_to_json(z->density)}};
  }
  return j;
}

// ---------------------------------------------------------------------------
// experiment reports
// ---------------------------------------------------------------------------

inline json poisson_spec_to_json(const PoissonSpec& s) {
  return json{{"lambda", s.lambda}, {"provenance", s.provenance}};
}

inline json stein_bound_to_json(const SteinBound& b) {
  return json{{"lambda_n", b.lambda_n},
              {"tv_bound", b.tv_bound},
              {"regime", b.regime == SteinRegime::overlap ? "overlap" : "cycle"},
              {"cycle_len", b.cycle_len}};
}

inline json counts_to_json(const std::map<int, std::int64_t>& counts) {
  json j = json::object();
  for (const auto& [v, c] : counts) j[std::to_string(v)] = c;
  return j;
}

inline json report_to_json(const ExperimentReport& r, bool include_timing = true) {
  json j{{"model", r.model_label},
         {"statistic", r.statistic_label},
         {"replicates", r.replicates},
         {"seed", r.seed},
         {"threads", r.threads},
         {"pmf_counts", counts_to_json(r.counts)},
         {"mean", r.mean},
         {"variance", r.variance},
         {"moments", r.moments},
         {"moment_se", r.moment_se},
         {"assertions_pass", r.assertions_pass},
         {"assertion_failures", r.assertion_failures}};
  json refs = json::array();
  for (const auto& s : r.references) refs.push_back(poisson_spec_to_json(s));
  j["references"] = refs;
  if (std::isfinite(r.lambda_reference)) j["lambda_reference"] = r.lambda_reference;
  if (std::isfinite(r.lambda_finite_n)) j["lambda_n"] = r.lambda_finite_n;
  if (std::isfinite(r.tv_to_reference)) j["tv_to_reference"] = r.tv_to_reference;
  if (std::isfinite(r.tv_to_fitted)) j["tv_to_fitted"] = r.tv_to_fitted;
  j["chi2_fitted"] = {{"statistic", r.chi2_fitted.statistic},
                      {"df", r.chi2_fitted.df},
                      {"p_value", r.chi2_fitted.p_value},
                      {"bins", r.chi2_fitted.bins}};
  if (!r.z_reference.empty()) j["z_scores_reference"] = r.z_reference;
  if (!r.z_fitted.empty()) j["z_scores_fitted"] = r.z_fitted;
  if (r.l_max > 0) {
    j["l_max"] = r.l_max;
    json marg = json::array();
    for (const auto& c : r.cycle_marginals) marg.push_back(counts_to_json(c));
    j["cycle_marginals"] = marg;
    j["cycle_mean"] = r.cycle_mean;
    j["cycle_reference"] = r.cycle_reference;
    if (std::isfinite(r.joint_c1c2)) {
      j["joint_c1c2"] = r.joint_c1c2;
      j["joint_c1c2_se"] = r.joint_c1c2_se;
    }
    if (!r.joint_orders.empty()) {
      j["joint_orders"] = r.joint_orders;
      j["joint_moment"] = r.joint_moment;
      j["joint_moment_se"] = r.joint_moment_se;
    }
  }
  if (std::isfinite(r.mcmc_stat_autocorr)) j["mcmc_stat_autocorr"] = r.mcmc_stat_autocorr;
  if (include_timing) {
    j["wall_seconds"] = r.wall_seconds;
    j["replicates_per_second"] = r.replicates_per_second;
  }
  return j;
}

/// pmf table CSV: value,empirical_prob,reference_prob.  Probabilities print
/// with 17 significant digits so re-reading reproduces them exactly.
inline void pmf_to_csv(const ExperimentReport& r, std::ostream& os,
                       const std::string& reference_col = "reference_prob") {
  const double lambda = std::isfinite(r.lambda_reference) && r.lambda_reference > 0.0
                            ? r.lambda_reference
                            : r.mean;
  const std::vector<double> ref = poisson_pmf_vector(lambda);
  const int max_obs = r.counts.empty() ? 0 : r.counts.rbegin()->first;
  const int hi = std::max(static_cast<int>(ref.size()) - 1, max_obs);
  os << "value,empirical_prob," << reference_col << '\n' << std::setprecision(17);
  for (int v = 0; v <= hi; ++v) {
    const auto it = r.counts.find(v);
    const double p = it == r.counts.end()
                         ? 0.0
                         : static_cast<double>(it->second) / static_cast<double>(r.replicates);
    const double q = v < static_cast<int>(ref.size()) ? ref[static_cast<std::size_t>(v)] : 0.0;
    os << v << ',' << p << ',' << q << '\n';
  }
}

struct PmfCsvRow {
  int value;
  double empirical_prob;
  double reference_prob;
};

inline std::vector<PmfCsvRow> pmf_from_csv(std::istream& is) {
  std::vector<PmfCsvRow> rows;
  std::string line;
  if (!std::getline(is, line) || line.rfind("value,", 0) != 0)
    throw std::invalid_argument("pmf CSV: missing header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c))
      throw std::invalid_argument("pmf CSV: malformed row");
    rows.push_back({std::stoi(a), std::stod(b), std::stod(c)});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// experiment configuration documents
// ---------------------------------------------------------------------------

inline StatisticSpec statistic_from_json(const json& j, int n) {
  StatisticSpec s;
  const std::string kind = j.is_string() ? j.get<std::string>()
                                         : j.at("kind").get<std::string>();
  if (kind == "fixed_points") {
    s.kind = StatisticKind::fixed_points;
  } else if (kind == "overlap") {
    s.kind = StatisticKind::overlap;
    if (j.is_object() && j.contains("sigma")) {
      if (j.at("sigma").is_string()) {
        const std::string name = j.at("sigma").get<std::string>();
        if (name == "identity") s.sigma = Permutation::identity(n);
        else if (name == "reversal") s.sigma = Permutation::reversal(n);
        else throw std::invalid_argument("overlap sigma: unknown name '" + name + "'");
      } else {
        s.sigma = permutation_from_json(j.at("sigma"));
      }
    }
  } else if (kind == "cycle_counts") {
    s.kind = StatisticKind::cycle_counts;
    if (j.is_object()) s.l_max = j.value("l_max", 3);
  } else if (kind == "joint_cycle_moments") {
    s.kind = StatisticKind::joint_cycle_moments;
    if (j.is_object()) {
      s.joint_orders = j.value("orders", std::vector<int>{1, 1});
      s.l_max = std::max(j.value("l_max", static_cast<int>(s.joint_orders.size())),
                         static_cast<int>(s.joint_orders.size()));
    } else {
      s.joint_orders = {1, 1};
      s.l_max = 2;
    }
  } else {
    throw std::invalid_argument("statistic: unknown kind '" + kind + "'");
  }
  return s;
}

/// Parses a full experiment config document (see schemas/experiment_config.schema.json).
inline ExperimentConfig experiment_config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("experiment config: expected a JSON object");
  ExperimentConfig cfg;
  cfg.model = model_from_json(j.at("model"));
  const int n = model_size(cfg.model);
  if (j.contains("statistic")) cfg.statistic = statistic_from_json(j.at("statistic"), n);
  cfg.replicates = j.value("replicates", static_cast<std::int64_t>(10000));
  cfg.seed = j.value("seed", kDefaultSeed);
  cfg.threads = j.value("threads", 1);
  cfg.moment_order = j.value("moment_order", 4);
  cfg.c_rho_grid = j.value("c_rho_grid", 256);
  return cfg;
}

}  // namespace permlab
