#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "permlab/density.hpp"
#include "permlab/permutation.hpp"
#include "permlab/rng.hpp"

namespace permlab {

// ---------------------------------------------------------------------------
// model specifications
// ---------------------------------------------------------------------------

struct UniformModel {
  int n;
};

struct MallowsModel {
  int n;
  double q;  // q > 0
};

struct ExpFamilyModel {
  int n;
  ScoreFunction f;
  double theta;
  std::int64_t burn_in = -1;  // -1: default n^2 swaps
  std::int64_t thin = -1;     // -1: default n swaps

  std::int64_t resolved_burn_in() const {
    return burn_in >= 0 ? burn_in : static_cast<std::int64_t>(n) * n;
  }
  std::int64_t resolved_thin() const { return thin >= 0 ? thin : n; }
};

struct MuRandomModel {
  int n;
  Density density;
  int grid_k = 256;
};

struct FixedPointTiltModel {
  int n;
  double theta;
};

struct IndependentZModel {
  int n;
  Density density;
};

using ModelSpec = std::variant<UniformModel, MallowsModel, ExpFamilyModel, MuRandomModel,
                               FixedPointTiltModel, IndependentZModel>;

inline int model_size(const ModelSpec& spec) {
  return std::visit([](const auto& m) { return m.n; }, spec);
}

inline void validate_model(const ModelSpec& spec) {
  if (model_size(spec) < 1) throw std::invalid_argument("model: n must be >= 1");
  if (const auto* m = std::get_if<MallowsModel>(&spec)) {
    if (!(m->q > 0.0)) throw std::invalid_argument("mallows: q must be > 0");
  } else if (const auto* e = std::get_if<ExpFamilyModel>(&spec)) {
    if (e->resolved_burn_in() < 0 || e->resolved_thin() < 1)
      throw std::invalid_argument("exp_family: mcmc parameters must be positive");
  } else if (const auto* mu = std::get_if<MuRandomModel>(&spec)) {
    validate_density(mu->density);
  } else if (const auto* z = std::get_if<IndependentZModel>(&spec)) {
    validate_density(z->density);
  }
}

// ---------------------------------------------------------------------------
// uniform
// ---------------------------------------------------------------------------

inline void uniform_targets(int n, RandomStream& rs, std::vector<std::int32_t>& out) {
  out.resize(static_cast<std::size_t>(n));
  std::iota(out.begin(), out.end(), 1);
  for (int i = n - 1; i >= 1; --i) {
    const auto j = static_cast<std::size_t>(rs.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(out[static_cast<std::size_t>(i)], out[j]);
  }
}

/// Fisher-Yates shuffle with unbiased bounded draws: exactly uniform on S_n.
inline Permutation sample_uniform(int n, RandomStream& rs) {
  std::vector<std::int32_t> t;
  uniform_targets(n, rs, t);
  return Permutation(std::move(t), Permutation::Unchecked{});
}

// ---------------------------------------------------------------------------
// Mallows (Kendall's Tau)
// ---------------------------------------------------------------------------

namespace detail {
/// log(e^z - 1) for z > 0 without overflow.
inline double log_expm1(double z) { return z > 36.0 ? z : std::log(std::expm1(z)); }

/// Truncated geometric offset t in {0..len-1} with P(t) ~ r^t for r < 1,
/// by closed-form inverse CDF.  `lr` = log r.
inline int truncated_geometric(int len, double lr, RandomStream& rs) {
  const double u = rs.next_unit();
  const double tail = -std::expm1(len * lr);  // 1 - r^len
  const double t = std::ceil(std::log1p(-u * tail) / lr) - 1.0;
  const int ti = t < 0.0 ? 0 : static_cast<int>(t);
  return std::min(ti, len - 1);
}
}  // namespace detail

/// log Z_{n,q} with Z_{n,q} = prod_{i=1}^n (1-q^i)/(1-q); q = 1 gives log n!.
inline double mallows_log_normalizer(int n, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("mallows_log_normalizer: q must be > 0");
  const double lq = std::log(q);
  if (std::abs(lq) < 1e-13) return std::lgamma(static_cast<double>(n) + 1.0);
  double logz = 0.0;
  for (int i = 1; i <= n; ++i) {
    if (q < 1.0)
      logz += std::log1p(-std::exp(i * lq)) - std::log1p(-q);
    else
      logz += detail::log_expm1(i * lq) - detail::log_expm1(lq);
  }
  return logz;
}

/// Exact sampler by sequential insertion: item i goes to position j in {1..i}
/// with P(j) ~ q^{i-j}, so the word's law is exactly q^{Inv}/Z_{n,q}.
inline void mallows_insertion_targets(int n, double q, RandomStream& rs,
                                      std::vector<std::int32_t>& out) {
  out.clear();
  out.reserve(static_cast<std::size_t>(n));
  const double lq = std::log(q);
  const bool uniform_case = std::abs(lq) < 1e-13;
  for (int i = 1; i <= n; ++i) {
    int offset;  // i - j, favoring small offsets when q < 1
    if (uniform_case) {
      offset = static_cast<int>(rs.next_below(static_cast<std::uint64_t>(i)));
    } else if (q < 1.0) {
      offset = detail::truncated_geometric(i, lq, rs);
    } else {
      offset = (i - 1) - detail::truncated_geometric(i, -lq, rs);
    }
    out.insert(out.begin() + (i - 1 - offset), static_cast<std::int32_t>(i));
  }
}

inline Permutation sample_mallows(int n, double q, RandomStream& rs) {
  if (!(q > 0.0)) throw std::invalid_argument("sample_mallows: q must be > 0");
  std::vector<std::int32_t> t;
  mallows_insertion_targets(n, q, rs, t);
  return Permutation(std::move(t), Permutation::Unchecked{});
}

// ---------------------------------------------------------------------------
// mu-random permutations
// ---------------------------------------------------------------------------

/// Draws n i.i.d. points from the density via inverse CDF on the x-marginal
/// cell masses, then the conditional y given the x-cell, with uniform jitter
/// inside the cell (ties have probability 0), and returns the rank pattern
/// sigma_y^{-1} o sigma_x.  The grid discretization is cached, so repeated
/// sampling is cheap.
class MuRandomSampler {
 public:
  MuRandomSampler(const Density& d, int n, int grid_k = 256) : n_(n), k_(grid_k) {
    if (n < 1) throw std::invalid_argument("MuRandomSampler: n must be >= 1");
    if (grid_k < 1) throw std::invalid_argument("MuRandomSampler: grid_k must be >= 1");
    const std::size_t ks = static_cast<std::size_t>(k_);
    std::vector<double> w(ks * ks);
    double total = 0.0;
    for (std::size_t i = 0; i < ks; ++i) {
      const double x = (static_cast<double>(i) + 0.5) / k_;
      for (std::size_t j = 0; j < ks; ++j) {
        const double y = (static_cast<double>(j) + 0.5) / k_;
        w[i * ks + j] = d(x, y);
        total += w[i * ks + j];
      }
    }
    row_cdf_.resize(ks);
    cond_cdf_.resize(ks * ks);
    double cum = 0.0;
    for (std::size_t i = 0; i < ks; ++i) {
      double rowsum = 0.0;
      for (std::size_t j = 0; j < ks; ++j) rowsum += w[i * ks + j];
      cum += rowsum / total;
      row_cdf_[i] = cum;
      double c = 0.0;
      for (std::size_t j = 0; j < ks; ++j) {
        c += w[i * ks + j] / rowsum;
        cond_cdf_[i * ks + j] = c;
      }
    }
    row_cdf_.back() = 1.0;
    for (std::size_t i = 0; i < ks; ++i) cond_cdf_[i * ks + ks - 1] = 1.0;
  }

  Permutation sample(RandomStream& rs) const {
    const std::size_t ns = static_cast<std::size_t>(n_);
    std::vector<std::pair<double, int>> xs(ns), ys(ns);
    for (std::size_t t = 0; t < ns; ++t) {
      const std::size_t i = pick(row_cdf_.data(), static_cast<std::size_t>(k_), rs.next_unit());
      const std::size_t j = pick(cond_cdf_.data() + i * static_cast<std::size_t>(k_),
                                 static_cast<std::size_t>(k_), rs.next_unit());
      xs[t] = {(static_cast<double>(i) + rs.next_unit()) / k_, static_cast<int>(t)};
      ys[t] = {(static_cast<double>(j) + rs.next_unit()) / k_, static_cast<int>(t)};
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    std::vector<std::int32_t> yrank(ns);
    for (std::size_t r = 0; r < ns; ++r)
      yrank[static_cast<std::size_t>(ys[r].second)] = static_cast<std::int32_t>(r + 1);
    std::vector<std::int32_t> t(ns);
    for (std::size_t r = 0; r < ns; ++r)
      t[r] = yrank[static_cast<std::size_t>(xs[r].second)];
    return Permutation(std::move(t), Permutation::Unchecked{});
  }

 private:
  static std::size_t pick(const double* cdf, std::size_t k, double u) {
    const double* it = std::upper_bound(cdf, cdf + k, u);
    return std::min(static_cast<std::size_t>(it - cdf), k - 1);
  }

  int n_;
  int k_;
  std::vector<double> row_cdf_;
  std::vector<double> cond_cdf_;
};

inline Permutation sample_mu_random(const Density& d, int n, RandomStream& rs,
                                    int grid_k = 256) {
  return MuRandomSampler(d, n, grid_k).sample(rs);
}

// ---------------------------------------------------------------------------
// exponential family with statistic sum f(i/n, pi(i)/n): Metropolis chain
// ---------------------------------------------------------------------------

/// Metropolis chain on S_n with uniform random-transposition proposals and
/// acceptance min(1, exp(theta * delta)); delta touches only the two swapped
/// summands, so each step is O(1).  Satisfies detailed balance with respect
/// to the exponential-family law.
class ExpFamilyChain {
 public:
  ExpFamilyChain(const ExpFamilyModel& model, RandomStream stream)
      : n_(model.n), theta_(model.theta), rs_(stream) {
    const std::size_t ns = static_cast<std::size_t>(n_);
    fval_.resize(ns * ns);
    for (std::size_t i = 0; i < ns; ++i)
      for (std::size_t j = 0; j < ns; ++j)
        fval_[i * ns + j] = model.f(static_cast<double>(i + 1) / n_,
                                    static_cast<double>(j + 1) / n_);
    state_.resize(ns);
    std::iota(state_.begin(), state_.end(), 1);
    stat_ = 0.0;
    for (std::size_t i = 0; i < ns; ++i) stat_ += fv(i, state_[i] - 1);
  }

  /// Change in the statistic if positions i and j (0-based) swapped targets.
  double swap_delta(int i, int j) const {
    const std::size_t si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
    return fv(si, state_[sj] - 1) + fv(sj, state_[si] - 1) -
           fv(si, state_[si] - 1) - fv(sj, state_[sj] - 1);
  }

  void step() {
    if (n_ < 2) return;
    const int i = static_cast<int>(rs_.next_below(static_cast<std::uint64_t>(n_)));
    int j = static_cast<int>(rs_.next_below(static_cast<std::uint64_t>(n_) - 1));
    if (j >= i) ++j;
    const double delta = swap_delta(i, j);
    const double log_ratio = theta_ * delta;
    if (log_ratio >= 0.0 || rs_.next_unit() < std::exp(log_ratio)) {
      std::swap(state_[static_cast<std::size_t>(i)], state_[static_cast<std::size_t>(j)]);
      stat_ += delta;
      ++accepted_;
    }
    ++proposed_;
  }

  void advance(std::int64_t swaps) {
    for (std::int64_t s = 0; s < swaps; ++s) step();
  }

  Permutation state() const { return Permutation(state_, Permutation::Unchecked{}); }
  const std::vector<std::int32_t>& targets() const { return state_; }
  double statistic() const { return stat_; }
  std::int64_t accepted() const { return accepted_; }
  std::int64_t proposed() const { return proposed_; }

 private:
  double fv(std::size_t i, std::size_t j) const {
    return fval_[i * static_cast<std::size_t>(n_) + j];
  }

  int n_;
  double theta_;
  RandomStream rs_;
  std::vector<double> fval_;
  std::vector<std::int32_t> state_;
  double stat_ = 0.0;
  std::int64_t accepted_ = 0, proposed_ = 0;
};

/// One draw after the model's burn-in.  For many draws, keep a chain and
/// advance by the thinning interval between reads.
inline Permutation sample_exp_family(const ExpFamilyModel& model, RandomStream& rs) {
  ExpFamilyChain chain(model, rs.split(0));
  chain.advance(model.resolved_burn_in());
  return chain.state();
}

// ---------------------------------------------------------------------------
// derangements
// ---------------------------------------------------------------------------

/// Exact D_n via the recurrence D_n = (n-1)(D_{n-1} + D_{n-2}).
inline boost::multiprecision::cpp_int derangement_count(int n) {
  if (n < 0) throw std::invalid_argument("derangement_count: n must be >= 0");
  boost::multiprecision::cpp_int prev2 = 1, prev1 = 0;  // D_0, D_1
  if (n == 0) return prev2;
  if (n == 1) return prev1;
  boost::multiprecision::cpp_int cur = 0;
  for (int m = 2; m <= n; ++m) {
    cur = (m - 1) * (prev1 + prev2);
    prev2 = prev1;
    prev1 = cur;
  }
  return cur;
}

/// log D_n as a double (-inf for n = 1); survives n in the thousands.
inline std::vector<double> log_derangement_table(int n_max) {
  std::vector<double> L(static_cast<std::size_t>(n_max) + 1);
  L[0] = 0.0;
  if (n_max >= 1) L[1] = -std::numeric_limits<double>::infinity();
  auto logaddexp = [](double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
  };
  for (int m = 2; m <= n_max; ++m)
    L[static_cast<std::size_t>(m)] =
        std::log(static_cast<double>(m - 1)) +
        logaddexp(L[static_cast<std::size_t>(m - 1)], L[static_cast<std::size_t>(m - 2)]);
  return L;
}

inline double log_derangement(int n) { return log_derangement_table(n).back(); }

// ---------------------------------------------------------------------------
// fixed-point tilted model: pmf ~ exp(theta * #fixed points)
// ---------------------------------------------------------------------------

/// Exact three-stage sampler.  Stage 1 draws the fixed-point count k with
/// P(k) ~ e^{theta k} C(n,k) D_{n-k} (log-space weights); stage 2 picks the
/// fixed set uniformly; stage 3 draws a uniform derangement of the rest by
/// rejection from uniform shuffles (expected ~e retries).
class FixedPointTiltSampler {
 public:
  FixedPointTiltSampler(int n, double theta) : n_(n) {
    if (n < 1) throw std::invalid_argument("FixedPointTiltSampler: n must be >= 1");
    const auto logD = log_derangement_table(n);
    log_weights_.resize(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
      const double lchoose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                             std::lgamma(n - k + 1.0);
      log_weights_[static_cast<std::size_t>(k)] =
          theta * k + lchoose + logD[static_cast<std::size_t>(n - k)];
    }
    const double lse = log_sum_exp(log_weights_);
    cdf_.resize(log_weights_.size());
    double cum = 0.0;
    for (std::size_t k = 0; k < log_weights_.size(); ++k) {
      cum += std::exp(log_weights_[k] - lse);
      cdf_[k] = cum;
    }
    cdf_.back() = 1.0;
  }

  /// Normalized stage-1 weight of fixed-point count k.
  double count_probability(int k) const {
    return k == 0 ? cdf_[0] : cdf_[static_cast<std::size_t>(k)] - cdf_[static_cast<std::size_t>(k - 1)];
  }

  const std::vector<double>& log_weights() const { return log_weights_; }

  Permutation sample(RandomStream& rs) const {
    const double u = rs.next_unit();
    const int k = static_cast<int>(
        std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());

    std::vector<std::int32_t> pool(static_cast<std::size_t>(n_));
    std::iota(pool.begin(), pool.end(), 1);
    for (int i = 0; i < k; ++i) {
      const auto j = i + static_cast<int>(rs.next_below(static_cast<std::uint64_t>(n_ - i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    std::vector<std::int32_t> t(static_cast<std::size_t>(n_));
    for (int i = 0; i < k; ++i)
      t[static_cast<std::size_t>(pool[static_cast<std::size_t>(i)] - 1)] =
          pool[static_cast<std::size_t>(i)];

    const int m = n_ - k;
    if (m == 1) throw std::logic_error("fixed-point tilt: stage 1 drew an impossible count");
    if (m > 0) {
      std::vector<std::int32_t> rest(pool.begin() + k, pool.end());
      std::sort(rest.begin(), rest.end());
      std::vector<std::int32_t> img(rest);
      while (true) {
        for (int i = m - 1; i >= 1; --i) {
          const auto j = static_cast<std::size_t>(
              rs.next_below(static_cast<std::uint64_t>(i) + 1));
          std::swap(img[static_cast<std::size_t>(i)], img[j]);
        }
        bool deranged = true;
        for (int i = 0; i < m; ++i)
          if (img[static_cast<std::size_t>(i)] == rest[static_cast<std::size_t>(i)]) {
            deranged = false;
            break;
          }
        if (deranged) break;
      }
      for (int i = 0; i < m; ++i)
        t[static_cast<std::size_t>(rest[static_cast<std::size_t>(i)] - 1)] =
            img[static_cast<std::size_t>(i)];
    }
    return Permutation(std::move(t), Permutation::Unchecked{});
  }

  static double log_sum_exp(const std::vector<double>& v) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : v) hi = std::max(hi, x);
    double s = 0.0;
    for (double x : v) s += std::exp(x - hi);
    return hi + std::log(s);
  }

 private:
  int n_;
  std::vector<double> log_weights_;
  std::vector<double> cdf_;
};

inline Permutation sample_fixed_point_tilt(int n, double theta, RandomStream& rs) {
  return FixedPointTiltSampler(n, theta).sample(rs);
}

// ---------------------------------------------------------------------------
// independent-Z model: Z(p) independent with P(Z(p)=q) ~ rho(p/n, q/n)
// ---------------------------------------------------------------------------

/// Cached row distributions with Vose alias tables: O(1) per draw.  The output
/// vector is NOT a permutation in general (collisions allowed).
class IndependentZSampler {
 public:
  IndependentZSampler(const Density& d, int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("IndependentZSampler: n must be >= 1");
    const std::size_t ns = static_cast<std::size_t>(n);
    prob_.resize(ns * ns);
    alias_prob_.resize(ns * ns);
    alias_idx_.resize(ns * ns);
    std::vector<double> row(ns);
    std::vector<std::int32_t> small, large;
    for (std::size_t p = 0; p < ns; ++p) {
      double rowsum = 0.0;
      for (std::size_t q = 0; q < ns; ++q) {
        row[q] = d(static_cast<double>(p + 1) / n, static_cast<double>(q + 1) / n);
        rowsum += row[q];
      }
      for (std::size_t q = 0; q < ns; ++q) {
        row[q] /= rowsum;
        prob_[p * ns + q] = row[q];
      }
      build_alias(row, alias_prob_.data() + p * ns, alias_idx_.data() + p * ns, small, large);
    }
  }

  int size() const { return n_; }

  /// P(Z(p) = q), both 1-based.
  double row_prob(int p, int q) const {
    return prob_[static_cast<std::size_t>(p - 1) * static_cast<std::size_t>(n_) +
                 static_cast<std::size_t>(q - 1)];
  }

  void sample(RandomStream& rs, std::vector<std::int32_t>& out) const {
    const std::size_t ns = static_cast<std::size_t>(n_);
    out.resize(ns);
    for (std::size_t p = 0; p < ns; ++p) {
      const std::size_t cell = static_cast<std::size_t>(rs.next_below(ns));
      const bool keep = rs.next_unit() < alias_prob_[p * ns + cell];
      out[p] = static_cast<std::int32_t>(
                   keep ? cell : static_cast<std::size_t>(alias_idx_[p * ns + cell])) +
               1;
    }
  }

  /// Exact finite-n Poisson parameter of the overlap count with sigma.
  double lambda_overlap(const Permutation& sigma) const {
    double s = 0.0;
    for (int p = 1; p <= n_; ++p) s += row_prob(p, sigma(p));
    return s;
  }

  /// Exact finite-n Poisson parameter of the l-cycle tuple count, summing the
  /// product over distinct index tuples (supported for l <= 3).
  double lambda_cycle(int l) const {
    const std::size_t ns = static_cast<std::size_t>(n_);
    auto r = [&](std::size_t p, std::size_t q) { return prob_[p * ns + q]; };
    if (l == 1) {
      double s = 0.0;
      for (std::size_t p = 0; p < ns; ++p) s += r(p, p);
      return s;
    }
    if (l == 2) {
      double s = 0.0;
      for (std::size_t p = 0; p < ns; ++p)
        for (std::size_t q = 0; q < ns; ++q)
          if (p != q) s += r(p, q) * r(q, p);
      return s / 2.0;
    }
    if (l == 3) {
      double tr3 = 0.0;
      for (std::size_t p = 0; p < ns; ++p)
        for (std::size_t q = 0; q < ns; ++q) {
          double dot = 0.0;
          for (std::size_t s2 = 0; s2 < ns; ++s2) dot += r(q, s2) * r(s2, p);
          tr3 += r(p, q) * dot;
        }
      double two_eq = 0.0, all_eq = 0.0;
      for (std::size_t p = 0; p < ns; ++p) {
        all_eq += r(p, p) * r(p, p) * r(p, p);
        for (std::size_t q = 0; q < ns; ++q)
          if (p != q) two_eq += r(p, p) * r(p, q) * r(q, p);
      }
      return (tr3 - 3.0 * two_eq - all_eq) / 3.0;
    }
    throw std::invalid_argument("lambda_cycle: only l <= 3 supported");
  }

 private:
  static void build_alias(const std::vector<double>& p, double* ap, std::int32_t* ai,
                          std::vector<std::int32_t>& small, std::vector<std::int32_t>& large) {
    const std::size_t n = p.size();
    std::vector<double> scaled(n);
    small.clear();
    large.clear();
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = p[i] * static_cast<double>(n);
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::int32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
      const auto s = static_cast<std::size_t>(small.back());
      small.pop_back();
      const auto g = static_cast<std::size_t>(large.back());
      ap[s] = scaled[s];
      ai[s] = static_cast<std::int32_t>(g);
      scaled[g] = (scaled[g] + scaled[s]) - 1.0;
      if (scaled[g] < 1.0) {
        large.pop_back();
        small.push_back(static_cast<std::int32_t>(g));
      }
    }
    for (auto idx : large) {
      ap[static_cast<std::size_t>(idx)] = 1.0;
      ai[static_cast<std::size_t>(idx)] = idx;
    }
    for (auto idx : small) {  // numerical leftovers
      ap[static_cast<std::size_t>(idx)] = 1.0;
      ai[static_cast<std::size_t>(idx)] = idx;
    }
  }

  int n_;
  std::vector<double> prob_;
  std::vector<double> alias_prob_;
  std::vector<std::int32_t> alias_idx_;
};

inline std::vector<std::int32_t> sample_independent_z(const Density& d, int n,
                                                      RandomStream& rs) {
  std::vector<std::int32_t> out;
  IndependentZSampler(d, n).sample(rs, out);
  return out;
}

/// Dispatcher for one-off draws.  Exponential-family models pay their burn-in
/// on every call; use ExpFamilyChain directly for repeated draws.
inline Permutation sample_permutation(const ModelSpec& spec, RandomStream& rs) {
  if (const auto* u = std::get_if<UniformModel>(&spec)) return sample_uniform(u->n, rs);
  if (const auto* m = std::get_if<MallowsModel>(&spec)) return sample_mallows(m->n, m->q, rs);
  if (const auto* e = std::get_if<ExpFamilyModel>(&spec)) return sample_exp_family(*e, rs);
  if (const auto* mu = std::get_if<MuRandomModel>(&spec))
    return sample_mu_random(mu->density, mu->n, rs, mu->grid_k);
  if (const auto* t = std::get_if<FixedPointTiltModel>(&spec))
    return sample_fixed_point_tilt(t->n, t->theta, rs);
  throw std::invalid_argument("sample_permutation: model has no permutation law");
}

}  // namespace permlab
