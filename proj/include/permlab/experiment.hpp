#pragma once

#include <boost/math/special_functions/gamma.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "permlab/density.hpp"
#include "permlab/limits.hpp"
#include "permlab/permutation.hpp"
#include "permlab/rng.hpp"
#include "permlab/samplers.hpp"

namespace permlab {

inline constexpr std::uint64_t kDefaultSeed = 1729;

enum class StatisticKind { fixed_points, overlap, cycle_counts, joint_cycle_moments };

inline std::string statistic_name(StatisticKind k) {
  switch (k) {
    case StatisticKind::fixed_points: return "fixed_points";
    case StatisticKind::overlap: return "overlap";
    case StatisticKind::cycle_counts: return "cycle_counts";
    case StatisticKind::joint_cycle_moments: return "joint_cycle_moments";
  }
  return "?";
}

struct StatisticSpec {
  StatisticKind kind = StatisticKind::fixed_points;
  std::optional<Permutation> sigma;  // overlap target; defaults to identity
  int l_max = 3;                     // cycle statistics collected for l = 1..l_max
  std::vector<int> joint_orders;     // exponents k_1..k_l for the joint moment
};

struct ExperimentConfig {
  ModelSpec model;
  StatisticSpec statistic;
  std::int64_t replicates = 10000;
  std::uint64_t seed = kDefaultSeed;
  int threads = 1;
  int moment_order = 4;   // raw moments reported up to this order (<= 10)
  int c_rho_grid = 256;   // kernel-trace resolution for cycle references
};

// ---------------------------------------------------------------------------
// distribution comparison helpers
// ---------------------------------------------------------------------------

/// (1/2) sum_j |p_j - q_j| between an empirical pmf (integer counts) and
/// Poi(lambda), reference tail truncated below 1e-12 total mass (the cut tail
/// is charged to the distance).
inline double tv_distance(const std::map<int, std::int64_t>& counts, std::int64_t total,
                          double lambda) {
  const std::vector<double> ref = poisson_pmf_vector(lambda);
  const int max_obs = counts.empty() ? 0 : counts.rbegin()->first;
  const int hi = std::max(static_cast<int>(ref.size()) - 1, max_obs);
  double acc = 0.0;
  double ref_mass = 0.0;
  for (int j = 0; j <= hi; ++j) {
    const auto it = counts.find(j);
    const double p = it == counts.end()
                         ? 0.0
                         : static_cast<double>(it->second) / static_cast<double>(total);
    const double q = j < static_cast<int>(ref.size()) ? ref[static_cast<std::size_t>(j)] : 0.0;
    ref_mass += q;
    acc += std::abs(p - q);
  }
  acc += std::max(0.0, 1.0 - ref_mass);  // truncated reference tail
  return 0.5 * acc;
}

/// Plain TV between two finite pmfs (shorter one zero-padded).
inline double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  const std::size_t hi = std::max(p.size(), q.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < hi; ++j)
    acc += std::abs((j < p.size() ? p[j] : 0.0) - (j < q.size() ? q[j] : 0.0));
  return 0.5 * acc;
}

/// Monte Carlo half-width of the empirical-TV estimate: half the sum of
/// per-cell binomial standard errors, with cell probability taken as
/// max(empirical, reference) so unobserved reference cells still contribute.
inline double tv_mc_half_width(const std::map<int, std::int64_t>& counts, std::int64_t total,
                               double lambda) {
  const std::vector<double> ref = poisson_pmf_vector(lambda);
  const int max_obs = counts.empty() ? 0 : counts.rbegin()->first;
  const int hi = std::max(static_cast<int>(ref.size()) - 1, max_obs);
  double acc = 0.0;
  for (int j = 0; j <= hi; ++j) {
    const auto it = counts.find(j);
    const double p = it == counts.end()
                         ? 0.0
                         : static_cast<double>(it->second) / static_cast<double>(total);
    const double q = j < static_cast<int>(ref.size()) ? ref[static_cast<std::size_t>(j)] : 0.0;
    const double cell = std::max(p, q);
    acc += std::sqrt(cell * (1.0 - cell) / static_cast<double>(total));
  }
  return 0.5 * acc;
}

struct Chi2Result {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  int bins = 0;
};

/// Goodness-of-fit of integer counts against Poi(lambda).  Cells are pooled
/// left to right until each bin's expected count is >= 5; the remainder joins
/// the last bin; df = bins - 2 (mean estimated + normalization).
inline Chi2Result chi_square_poisson(const std::map<int, std::int64_t>& counts,
                                     std::int64_t total, double lambda) {
  const std::vector<double> ref = poisson_pmf_vector(lambda);
  const int max_obs = counts.empty() ? 0 : counts.rbegin()->first;
  const int hi = std::max(static_cast<int>(ref.size()) - 1, max_obs);

  std::vector<std::pair<double, double>> bins;  // (observed, expected)
  double cur_obs = 0.0, cur_exp = 0.0, used_mass = 0.0;
  for (int j = 0; j <= hi; ++j) {
    const auto it = counts.find(j);
    cur_obs += it == counts.end() ? 0.0 : static_cast<double>(it->second);
    const double q = j < static_cast<int>(ref.size()) ? ref[static_cast<std::size_t>(j)] : 0.0;
    used_mass += q;
    cur_exp += q * static_cast<double>(total);
    if (cur_exp >= 5.0) {
      bins.emplace_back(cur_obs, cur_exp);
      cur_obs = cur_exp = 0.0;
    }
  }
  cur_exp += std::max(0.0, 1.0 - used_mass) * static_cast<double>(total);
  if (!bins.empty()) {
    bins.back().first += cur_obs;
    bins.back().second += cur_exp;
  } else {
    bins.emplace_back(cur_obs, cur_exp);
  }

  Chi2Result r;
  r.bins = static_cast<int>(bins.size());
  for (const auto& [o, e] : bins)
    if (e > 0.0) r.statistic += (o - e) * (o - e) / e;
  r.df = std::max(1, r.bins - 2);
  r.p_value = boost::math::gamma_q(r.df / 2.0, r.statistic / 2.0);
  return r;
}

/// Raw moments 1..order and their plain standard errors computed exactly from
/// integer counts (deterministic regardless of accumulation order).
struct MomentSummary {
  std::vector<double> raw;  // index k-1 = E[X^k]
  std::vector<double> se;
};

inline MomentSummary moments_from_counts(const std::map<int, std::int64_t>& counts,
                                         std::int64_t total, int order) {
  MomentSummary m;
  m.raw.assign(static_cast<std::size_t>(order), 0.0);
  m.se.assign(static_cast<std::size_t>(order), 0.0);
  std::vector<long double> raw2(static_cast<std::size_t>(2 * order), 0.0L);
  for (const auto& [v, c] : counts) {
    long double pw = 1.0L;
    for (int k = 1; k <= 2 * order; ++k) {
      pw *= v;
      raw2[static_cast<std::size_t>(k - 1)] += pw * c;
    }
  }
  for (auto& x : raw2) x /= total;
  for (int k = 1; k <= order; ++k) {
    m.raw[static_cast<std::size_t>(k - 1)] = static_cast<double>(raw2[static_cast<std::size_t>(k - 1)]);
    const long double var =
        raw2[static_cast<std::size_t>(2 * k - 1)] -
        raw2[static_cast<std::size_t>(k - 1)] * raw2[static_cast<std::size_t>(k - 1)];
    m.se[static_cast<std::size_t>(k - 1)] =
        std::sqrt(std::max(0.0, static_cast<double>(var)) / static_cast<double>(total));
  }
  return m;
}

// ---------------------------------------------------------------------------
// experiment report
// ---------------------------------------------------------------------------

struct ExperimentReport {
  std::string model_label;
  std::string statistic_label;
  std::int64_t replicates = 0;
  std::uint64_t seed = 0;
  int threads = 1;

  std::map<int, std::int64_t> counts;  // primary statistic pmf (C(1) for cycle kinds)
  double mean = 0.0;
  double variance = 0.0;
  std::vector<double> moments;
  std::vector<double> moment_se;

  std::vector<PoissonSpec> references;
  double lambda_reference = std::numeric_limits<double>::quiet_NaN();  // asymptotic
  double lambda_finite_n = std::numeric_limits<double>::quiet_NaN();
  double tv_to_reference = std::numeric_limits<double>::quiet_NaN();
  double tv_to_fitted = std::numeric_limits<double>::quiet_NaN();  // vs Poi(mean)
  Chi2Result chi2_fitted;
  std::vector<double> z_reference;
  std::vector<double> z_fitted;

  int l_max = 0;
  std::vector<std::map<int, std::int64_t>> cycle_marginals;
  std::vector<double> cycle_mean;
  std::vector<double> cycle_reference;
  double joint_c1c2 = std::numeric_limits<double>::quiet_NaN();
  double joint_c1c2_se = std::numeric_limits<double>::quiet_NaN();
  std::vector<int> joint_orders;
  double joint_moment = std::numeric_limits<double>::quiet_NaN();
  double joint_moment_se = std::numeric_limits<double>::quiet_NaN();

  double mcmc_stat_autocorr = std::numeric_limits<double>::quiet_NaN();

  double wall_seconds = 0.0;
  double replicates_per_second = 0.0;

  bool assertions_pass = true;
  std::vector<std::string> assertion_failures;
};

namespace detail {

/// Number of l-cycle tuples in the functional graph of a value vector
/// (bijection not required): canonical tuples p = min of its orbit window
/// with z(p_a) = p_{a+1} cyclically and all entries distinct.
inline std::int64_t functional_cycle_count(const std::vector<std::int32_t>& z, int l) {
  const int n = static_cast<int>(z.size());
  std::int64_t count = 0;
  std::array<std::int32_t, 16> orbit{};
  for (int p = 1; p <= n; ++p) {
    orbit[0] = p;
    bool ok = true;
    for (int a = 1; a < l; ++a) {
      const std::int32_t next = z[static_cast<std::size_t>(orbit[static_cast<std::size_t>(a - 1)] - 1)];
      if (next <= p) { ok = false; break; }  // p must be the minimum, so strictly larger
      bool dup = false;
      for (int b = 1; b < a; ++b)
        if (orbit[static_cast<std::size_t>(b)] == next) dup = true;
      if (dup) { ok = false; break; }
      orbit[static_cast<std::size_t>(a)] = next;
    }
    if (!ok) continue;
    if (z[static_cast<std::size_t>(orbit[static_cast<std::size_t>(l - 1)] - 1)] == p) ++count;
  }
  return count;
}

struct BlockAccum {
  std::map<int, std::int64_t> primary;
  std::vector<std::map<int, std::int64_t>> cycles;
  long double joint_c1c2 = 0.0L, joint_c1c2_sq = 0.0L;
  long double joint = 0.0L, joint_sq = 0.0L;
};

}  // namespace detail

/// The reference density of a model's permuton limit, when the theory
/// provides one.  Mallows uses beta = -n log q (so q = exp(-beta/n)).
inline std::optional<Density> reference_density(const ModelSpec& spec) {
  if (std::holds_alternative<UniformModel>(spec)) return Density::uniform();
  if (const auto* m = std::get_if<MallowsModel>(&spec)) {
    const double beta = -static_cast<double>(m->n) * std::log(m->q);
    if (std::abs(beta) < 1e-12) return Density::uniform();
    if (std::abs(beta) > 500.0) return std::nullopt;
    return Density::frank(beta);
  }
  if (const auto* e = std::get_if<ExpFamilyModel>(&spec))
    return fit_exp_family(e->f, e->theta, 128);
  if (const auto* mu = std::get_if<MuRandomModel>(&spec)) return mu->density;
  if (const auto* z = std::get_if<IndependentZModel>(&spec)) return z->density;
  return std::nullopt;  // fixed-point tilt: converges to the uniform permuton,
                        // but its fixed-point law is tilted; no density reference
}

inline std::string model_label(const ModelSpec& spec) {
  std::ostringstream os;
  if (const auto* u = std::get_if<UniformModel>(&spec)) {
    os << "uniform(n=" << u->n << ")";
  } else if (const auto* m = std::get_if<MallowsModel>(&spec)) {
    os << "mallows(n=" << m->n << ",q=" << m->q << ")";
  } else if (const auto* e = std::get_if<ExpFamilyModel>(&spec)) {
    os << "exp_family(n=" << e->n << ",f=" << e->f.id << ",theta=" << e->theta << ")";
  } else if (const auto* mu = std::get_if<MuRandomModel>(&spec)) {
    os << "mu_random(n=" << mu->n << ")";
  } else if (const auto* t = std::get_if<FixedPointTiltModel>(&spec)) {
    os << "fixed_point_tilt(n=" << t->n << ",theta=" << t->theta << ")";
  } else if (const auto* z = std::get_if<IndependentZModel>(&spec)) {
    os << "independent_z(n=" << z->n << ")";
  }
  return os.str();
}

/// Monte Carlo experiment driver.  Replicate r always consumes the stream
/// split(seed, r) and block partial sums merge in index order, so reports are
/// bit-identical for a fixed seed regardless of worker count.  Exponential-
/// family models run a single sequential chain (replicate r = chain state
/// after burn-in + r*thin swaps) and report the statistic's lag-1
/// autocorrelation as the mixing diagnostic.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  validate_model(cfg.model);
  if (cfg.replicates < 1) throw std::invalid_argument("run_experiment: replicates must be >= 1");
  if (cfg.moment_order < 1 || cfg.moment_order > 10)
    throw std::invalid_argument("run_experiment: moment_order must be in [1, 10]");
  const auto t0 = std::chrono::steady_clock::now();

  const int n = model_size(cfg.model);
  const StatisticSpec& stat = cfg.statistic;
  const bool cycle_kind = stat.kind == StatisticKind::cycle_counts ||
                          stat.kind == StatisticKind::joint_cycle_moments;
  const int l_max = cycle_kind ? std::max(1, stat.l_max) : 0;
  if (cycle_kind && l_max > 16)
    throw std::invalid_argument("run_experiment: l_max must be <= 16");
  if (stat.kind == StatisticKind::overlap && stat.sigma && stat.sigma->size() != n)
    throw std::invalid_argument("run_experiment: overlap sigma size mismatch");
  const Permutation sigma = stat.sigma ? *stat.sigma : Permutation::identity(n);

  const bool z_model = std::holds_alternative<IndependentZModel>(cfg.model);
  const bool mcmc_model = std::holds_alternative<ExpFamilyModel>(cfg.model);

  // shared immutable sampler contexts
  std::optional<MuRandomSampler> mu_sampler;
  std::optional<FixedPointTiltSampler> tilt_sampler;
  std::optional<IndependentZSampler> z_sampler;
  if (const auto* mu = std::get_if<MuRandomModel>(&cfg.model))
    mu_sampler.emplace(mu->density, mu->n, mu->grid_k);
  if (const auto* t = std::get_if<FixedPointTiltModel>(&cfg.model))
    tilt_sampler.emplace(t->n, t->theta);
  if (const auto* z = std::get_if<IndependentZModel>(&cfg.model))
    z_sampler.emplace(z->density, z->n);

  const RandomStream root(cfg.seed);

  auto draw_targets = [&](std::int64_t rep, std::vector<std::int32_t>& buf) {
    RandomStream rs = root.split(static_cast<std::uint64_t>(rep));
    if (const auto* u = std::get_if<UniformModel>(&cfg.model)) {
      uniform_targets(u->n, rs, buf);
    } else if (const auto* m = std::get_if<MallowsModel>(&cfg.model)) {
      mallows_insertion_targets(m->n, m->q, rs, buf);
    } else if (mu_sampler) {
      buf = mu_sampler->sample(rs).targets();
    } else if (tilt_sampler) {
      buf = tilt_sampler->sample(rs).targets();
    } else if (z_sampler) {
      z_sampler->sample(rs, buf);
    }
  };

  auto accumulate = [&](const std::vector<std::int32_t>& buf, detail::BlockAccum& acc) {
    if (cycle_kind) {
      std::array<std::int64_t, 16> c{};
      if (z_model) {
        for (int l = 1; l <= l_max; ++l)
          c[static_cast<std::size_t>(l - 1)] = detail::functional_cycle_count(buf, l);
      } else {
        // one pass over the bijection's orbits
        thread_local std::vector<bool> visited;
        visited.assign(buf.size(), false);
        for (int start = 1; start <= n; ++start) {
          if (visited[static_cast<std::size_t>(start - 1)]) continue;
          int len = 0, i = start;
          do {
            visited[static_cast<std::size_t>(i - 1)] = true;
            i = buf[static_cast<std::size_t>(i - 1)];
            ++len;
          } while (i != start);
          if (len <= l_max) ++c[static_cast<std::size_t>(len - 1)];
        }
      }
      ++acc.primary[static_cast<int>(c[0])];
      for (int l = 1; l <= l_max; ++l)
        ++acc.cycles[static_cast<std::size_t>(l - 1)][static_cast<int>(c[static_cast<std::size_t>(l - 1)])];
      if (l_max >= 2) {
        const long double prod = static_cast<long double>(c[0]) * static_cast<long double>(c[1]);
        acc.joint_c1c2 += prod;
        acc.joint_c1c2_sq += prod * prod;
      }
      if (!stat.joint_orders.empty()) {
        long double prod = 1.0L;
        for (std::size_t a = 0; a < stat.joint_orders.size(); ++a)
          for (int e = 0; e < stat.joint_orders[a]; ++e)
            prod *= static_cast<long double>(c[a]);
        acc.joint += prod;
        acc.joint_sq += prod * prod;
      }
    } else {
      int v = 0;
      for (int i = 1; i <= n; ++i)
        if (buf[static_cast<std::size_t>(i - 1)] == sigma(i)) ++v;
      ++acc.primary[v];
    }
  };

  ExperimentReport rep;
  rep.model_label = model_label(cfg.model);
  rep.statistic_label = statistic_name(stat.kind);
  rep.replicates = cfg.replicates;
  rep.seed = cfg.seed;
  rep.threads = mcmc_model ? 1 : std::max(1, cfg.threads);
  rep.l_max = l_max;

  std::vector<detail::BlockAccum> blocks;
  const std::int64_t block_size = 4096;
  const std::int64_t nblocks = (cfg.replicates + block_size - 1) / block_size;
  blocks.resize(static_cast<std::size_t>(nblocks));
  for (auto& b : blocks)
    b.cycles.assign(static_cast<std::size_t>(l_max), {});

  if (mcmc_model) {
    const auto& model = std::get<ExpFamilyModel>(cfg.model);
    ExpFamilyChain chain(model, root.split(0));
    chain.advance(model.resolved_burn_in());
    long double ac_xy = 0.0L, ac_x = 0.0L, ac_x2 = 0.0L;
    double prev = 0.0;
    for (std::int64_t r = 0; r < cfg.replicates; ++r) {
      if (r > 0) chain.advance(model.resolved_thin());
      auto& acc = blocks[static_cast<std::size_t>(r / block_size)];
      accumulate(chain.targets(), acc);
      int v = 0;
      if (cycle_kind) {
        for (int i = 1; i <= n; ++i)
          if (chain.targets()[static_cast<std::size_t>(i - 1)] == i) ++v;
      } else {
        for (int i = 1; i <= n; ++i)
          if (chain.targets()[static_cast<std::size_t>(i - 1)] == sigma(i)) ++v;
      }
      ac_x += v;
      ac_x2 += static_cast<long double>(v) * v;
      if (r > 0) ac_xy += prev * static_cast<long double>(v);
      prev = v;
    }
    if (cfg.replicates > 1) {
      const long double N = cfg.replicates;
      const long double mean = ac_x / N;
      const long double var = ac_x2 / N - mean * mean;
      if (var > 0)
        rep.mcmc_stat_autocorr =
            static_cast<double>((ac_xy / (N - 1) - mean * mean) / var);
    }
  } else {
    std::atomic<std::int64_t> cursor{0};
    auto work = [&] {
      std::vector<std::int32_t> buf;
      std::int64_t b;
      while ((b = cursor.fetch_add(1)) < nblocks) {
        auto& acc = blocks[static_cast<std::size_t>(b)];
        const std::int64_t lo = b * block_size;
        const std::int64_t hi = std::min(cfg.replicates, lo + block_size);
        for (std::int64_t r = lo; r < hi; ++r) {
          draw_targets(r, buf);
          accumulate(buf, acc);
        }
      }
    };
    if (rep.threads == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < rep.threads; ++t) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }
  }

  // ordered merge (block index order: identical for any worker count)
  long double joint_c1c2 = 0.0L, joint_c1c2_sq = 0.0L, joint = 0.0L, joint_sq = 0.0L;
  for (const auto& b : blocks) {
    for (const auto& [v, c] : b.primary) rep.counts[v] += c;
    joint_c1c2 += b.joint_c1c2;
    joint_c1c2_sq += b.joint_c1c2_sq;
    joint += b.joint;
    joint_sq += b.joint_sq;
  }
  if (cycle_kind) {
    rep.cycle_marginals.assign(static_cast<std::size_t>(l_max), {});
    for (const auto& b : blocks)
      for (int l = 0; l < l_max; ++l)
        for (const auto& [v, c] : b.cycles[static_cast<std::size_t>(l)])
          rep.cycle_marginals[static_cast<std::size_t>(l)][v] += c;
    for (int l = 0; l < l_max; ++l) {
      long double s = 0.0L;
      for (const auto& [v, c] : rep.cycle_marginals[static_cast<std::size_t>(l)])
        s += static_cast<long double>(v) * c;
      rep.cycle_mean.push_back(static_cast<double>(s / cfg.replicates));
    }
    if (l_max >= 2) {
      const long double N = cfg.replicates;
      rep.joint_c1c2 = static_cast<double>(joint_c1c2 / N);
      rep.joint_c1c2_se = std::sqrt(std::max(
          0.0, static_cast<double>(joint_c1c2_sq / N - (joint_c1c2 / N) * (joint_c1c2 / N))) /
          static_cast<double>(cfg.replicates));
    }
    if (!stat.joint_orders.empty()) {
      const long double N = cfg.replicates;
      rep.joint_orders = stat.joint_orders;
      rep.joint_moment = static_cast<double>(joint / N);
      rep.joint_moment_se = std::sqrt(
          std::max(0.0, static_cast<double>(joint_sq / N - (joint / N) * (joint / N))) /
          static_cast<double>(cfg.replicates));
    }
  }

  const MomentSummary ms = moments_from_counts(rep.counts, cfg.replicates, cfg.moment_order);
  rep.moments = ms.raw;
  rep.moment_se = ms.se;
  rep.mean = ms.raw[0];
  rep.variance = ms.raw.size() > 1 ? ms.raw[1] - ms.raw[0] * ms.raw[0] : 0.0;

  // Poisson references
  const std::optional<Density> d = reference_density(cfg.model);
  if (d) {
    if (!cycle_kind) {
      double asym;
      if (sigma == Permutation::identity(n)) {
        asym = integrate_gl([&](double x) { return (*d)(x, x); }, 0.0, 1.0, 256, 8);
        rep.references.push_back({asym, "mu_rho"});
      } else if (sigma == Permutation::reversal(n)) {
        asym = integrate_gl([&](double x) { return (*d)(x, 1.0 - x); }, 0.0, 1.0, 256, 8);
        rep.references.push_back({asym, "mu_rho"});
      } else {
        asym = mu_rho_along(*d, sigma);
        rep.references.push_back({asym, "mu_rho_discrete"});
      }
      rep.lambda_reference = asym;
      rep.lambda_finite_n = lambda_n_overlap(*d, sigma);
      rep.references.push_back({rep.lambda_finite_n, "lambda_n"});
    } else {
      for (int l = 1; l <= l_max; ++l) {
        const double c = c_rho(*d, l, cfg.c_rho_grid);
        rep.cycle_reference.push_back(c);
        rep.references.push_back({c, "c_rho(" + std::to_string(l) + ")"});
      }
      rep.lambda_reference = rep.cycle_reference.front();
      rep.lambda_finite_n = lambda_n_overlap(*d, Permutation::identity(n));
    }
  } else if (const auto* t = std::get_if<FixedPointTiltModel>(&cfg.model)) {
    rep.lambda_reference = std::exp(t->theta);
    rep.references.push_back({rep.lambda_reference, "exp_theta"});
  }

  if (std::isfinite(rep.lambda_reference) && rep.lambda_reference > 0.0) {
    rep.tv_to_reference = tv_distance(rep.counts, cfg.replicates, rep.lambda_reference);
    for (int k = 1; k <= cfg.moment_order; ++k) {
      const double se = rep.moment_se[static_cast<std::size_t>(k - 1)];
      rep.z_reference.push_back(
          se > 0.0 ? (rep.moments[static_cast<std::size_t>(k - 1)] -
                      poisson_moment(rep.lambda_reference, k)) / se
                   : 0.0);
    }
  }
  if (rep.mean > 0.0) {
    rep.tv_to_fitted = tv_distance(rep.counts, cfg.replicates, rep.mean);
    rep.chi2_fitted = chi_square_poisson(rep.counts, cfg.replicates, rep.mean);
    for (int k = 1; k <= cfg.moment_order; ++k) {
      const double se = rep.moment_se[static_cast<std::size_t>(k - 1)];
      rep.z_fitted.push_back(se > 0.0 ? (rep.moments[static_cast<std::size_t>(k - 1)] -
                                         poisson_moment(rep.mean, k)) / se
                                      : 0.0);
    }
  }

  // embedded assertions: Poisson shape against the moment-matched law (only
  // where the asymptotic regime is meaningful: n >= 50 and enough replicates),
  // plus the dependency-graph bound for independent-Z runs (which must never
  // fail)
  if (cfg.replicates >= 1000 && n >= 50 && rep.mean > 0.0) {
    if (rep.chi2_fitted.p_value < 1e-3) {
      rep.assertions_pass = false;
      rep.assertion_failures.push_back("chi2 vs Poi(mean) p < 1e-3");
    }
    for (int k = 2; k <= std::min(3, cfg.moment_order); ++k) {
      if (std::abs(rep.z_fitted[static_cast<std::size_t>(k - 1)]) >= 5.0) {
        rep.assertions_pass = false;
        rep.assertion_failures.push_back("moment z-score order " + std::to_string(k) +
                                         " vs Poi(mean) >= 5");
      }
    }
  }
  if (z_model && !cycle_kind && d) {
    const auto [m, M] = d->bounds();
    const double bound = (M / m) * (M / m) / n;
    const double hw = tv_mc_half_width(rep.counts, cfg.replicates, rep.lambda_finite_n);
    const double tv = tv_distance(rep.counts, cfg.replicates, rep.lambda_finite_n);
    if (tv > bound + 3.0 * hw) {
      rep.assertions_pass = false;
      rep.assertion_failures.push_back("Stein TV bound violated");
    }
  }

  const auto t1 = std::chrono::steady_clock::now();
  rep.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  rep.replicates_per_second =
      rep.wall_seconds > 0.0 ? static_cast<double>(cfg.replicates) / rep.wall_seconds : 0.0;
  return rep;
}

// ---------------------------------------------------------------------------
// Stein-bound verification by simulation
// ---------------------------------------------------------------------------

struct SteinCheckReport {
  int n = 0;
  SteinRegime regime = SteinRegime::overlap;
  int cycle_len = 1;
  std::int64_t replicates = 0;
  double lambda_n = 0.0;
  double tv_bound = 0.0;
  double tv_estimate = 0.0;
  double mc_half_width = 0.0;
  bool pass = false;
};

namespace detail {

template <typename StatFn>
std::map<int, std::int64_t> simulate_z_counts(const IndependentZSampler& sampler,
                                              std::int64_t replicates, std::uint64_t seed,
                                              int threads, StatFn&& stat) {
  const RandomStream root(seed);
  const std::int64_t block_size = 4096;
  const std::int64_t nblocks = (replicates + block_size - 1) / block_size;
  std::vector<std::map<int, std::int64_t>> blocks(static_cast<std::size_t>(nblocks));
  std::atomic<std::int64_t> cursor{0};
  auto work = [&] {
    std::vector<std::int32_t> buf;
    std::int64_t b;
    while ((b = cursor.fetch_add(1)) < nblocks) {
      auto& acc = blocks[static_cast<std::size_t>(b)];
      const std::int64_t lo = b * block_size;
      const std::int64_t hi = std::min(replicates, lo + block_size);
      for (std::int64_t r = lo; r < hi; ++r) {
        RandomStream rs = root.split(static_cast<std::uint64_t>(r));
        sampler.sample(rs, buf);
        ++acc[stat(buf)];
      }
    }
  };
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  std::map<int, std::int64_t> counts;
  for (const auto& b : blocks)
    for (const auto& [v, c] : b) counts[v] += c;
  return counts;
}

}  // namespace detail

/// Simulates the overlap count M_n(sigma) of the independent-Z model and
/// checks the simulated TV against the dependency-graph bound (1/n)(M/m)^2.
inline SteinCheckReport stein_check_overlap(const Density& d, const Permutation& sigma,
                                            std::int64_t replicates, std::uint64_t seed,
                                            int threads = 1) {
  validate_density(d);
  const int n = sigma.size();
  const IndependentZSampler sampler(d, n);
  SteinCheckReport r;
  r.n = n;
  r.regime = SteinRegime::overlap;
  r.replicates = replicates;
  r.lambda_n = sampler.lambda_overlap(sigma);
  const auto [m, M] = d.bounds();
  r.tv_bound = (M / m) * (M / m) / n;
  const auto counts = detail::simulate_z_counts(
      sampler, replicates, seed, threads, [&](const std::vector<std::int32_t>& z) {
        int v = 0;
        for (int p = 1; p <= n; ++p)
          if (z[static_cast<std::size_t>(p - 1)] == sigma(p)) ++v;
        return v;
      });
  r.tv_estimate = tv_distance(counts, replicates, r.lambda_n);
  r.mc_half_width = tv_mc_half_width(counts, replicates, r.lambda_n);
  r.pass = r.tv_estimate <= r.tv_bound + 3.0 * r.mc_half_width;
  return r;
}

/// Same for the l-cycle tuple count D_n(l), bound (1/n)(M/m)^{2l}.
inline SteinCheckReport stein_check_cycle(const Density& d, int n, int l,
                                          std::int64_t replicates, std::uint64_t seed,
                                          int threads = 1) {
  validate_density(d);
  const IndependentZSampler sampler(d, n);
  SteinCheckReport r;
  r.n = n;
  r.regime = SteinRegime::cycle;
  r.cycle_len = l;
  r.replicates = replicates;
  r.lambda_n = sampler.lambda_cycle(l);
  const auto [m, M] = d.bounds();
  r.tv_bound = std::pow(M / m, 2.0 * l) / n;
  const auto counts = detail::simulate_z_counts(
      sampler, replicates, seed, threads,
      [&](const std::vector<std::int32_t>& z) {
        return static_cast<int>(detail::functional_cycle_count(z, l));
      });
  r.tv_estimate = tv_distance(counts, replicates, r.lambda_n);
  r.mc_half_width = tv_mc_half_width(counts, replicates, r.lambda_n);
  r.pass = r.tv_estimate <= r.tv_bound + 3.0 * r.mc_half_width;
  return r;
}

}  // namespace permlab
