#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "permlab/density.hpp"
#include "permlab/limits.hpp"
#include "permlab/permutation.hpp"
#include "permlab/quadrature.hpp"
#include "permlab/samplers.hpp"

namespace permlab {

inline std::int64_t factorial_i64(int n) {
  std::int64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Lexicographic rank of a permutation (Lehmer code), O(n^2); n <= 8 use.
inline std::int64_t lex_rank(const std::vector<std::int32_t>& t) {
  const int n = static_cast<int>(t.size());
  std::int64_t rank = 0;
  std::int64_t f = factorial_i64(n);
  for (int i = 0; i < n; ++i) {
    f /= (n - i);
    int smaller = 0;
    for (int j = i + 1; j < n; ++j)
      if (t[static_cast<std::size_t>(j)] < t[static_cast<std::size_t>(i)]) ++smaller;
    rank += smaller * f;
  }
  return rank;
}

/// Exact law of a permutation model on S_n, indexed by lexicographic rank.
class ExactPmf {
 public:
  ExactPmf(int n, std::vector<double> probs) : n_(n), probs_(std::move(probs)) {}

  int size() const { return n_; }
  const std::vector<double>& probabilities() const { return probs_; }

  double prob_of(const Permutation& p) const {
    return probs_[static_cast<std::size_t>(lex_rank(p.targets()))];
  }

  /// Visits every permutation in lexicographic order with its probability.
  template <typename F>
  void for_each(F&& f) const {
    std::vector<std::int32_t> t(static_cast<std::size_t>(n_));
    std::iota(t.begin(), t.end(), 1);
    std::size_t rank = 0;
    do {
      f(t, probs_[rank]);
      ++rank;
    } while (std::next_permutation(t.begin(), t.end()));
  }

 private:
  int n_;
  std::vector<double> probs_;
};

/// P(rank pattern = pi) for n i.i.d. points from the density, by nested
/// ordered quadrature of the 2n-dimensional integral
///   n! * int_{u ordered} int_{v ordered} prod_i rho(u_i, v_{pi(i)}).
/// The inner u-integral is an ordered product integral (separable for fixed
/// v); the outer v-levels are nested composite Gauss rules.  Practical for
/// n <= 4.
inline double mu_random_pmf_quadrature(const Density& d, const Permutation& pi,
                                       int outer_panels = 0, int outer_g = 8,
                                       int inner_panels = 16, int inner_g = 8) {
  const int n = pi.size();
  if (n > 4)
    throw std::invalid_argument("mu_random_pmf_quadrature: supported for n <= 4 only");
  if (outer_panels <= 0) outer_panels = (n <= 2) ? 8 : (n == 3 ? 4 : 2);

  const GaussRule rule = gauss_legendre(outer_g);
  const OrderedProductContext inner_ctx(inner_panels, inner_g);
  std::vector<double> v(static_cast<std::size_t>(n));
  std::vector<std::function<double(double)>> h(static_cast<std::size_t>(n));

  // recursion over v_n > v_{n-1} > ... > v_1
  std::function<double(int, double)> level = [&](int depth, double upper) -> double {
    const int idx = n - 1 - depth;  // fills v[n-1], v[n-2], ..., v[0]
    const double h_panel = upper / outer_panels;
    double total = 0.0;
    for (int p = 0; p < outer_panels; ++p) {
      const double lo = p * h_panel;
      double s = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        v[static_cast<std::size_t>(idx)] = lo + 0.5 * h_panel * (rule.nodes[q] + 1.0);
        double val;
        if (idx == 0) {
          for (int i = 1; i <= n; ++i)
            h[static_cast<std::size_t>(i - 1)] = [&, i](double u) {
              return d(u, v[static_cast<std::size_t>(pi(i) - 1)]);
            };
          val = ordered_product_integral(h, inner_ctx);
        } else {
          val = level(depth + 1, v[static_cast<std::size_t>(idx)]);
        }
        s += rule.weights[q] * val;
      }
      total += s * 0.5 * h_panel;
    }
    return total;
  };

  return static_cast<double>(factorial_i64(n)) * level(0, 1.0);
}

/// Exact enumeration oracle for models with an explicit unnormalized weight
/// (and for mu-random laws at n <= 4 via quadrature).  n <= 8.
inline ExactPmf enumerate_model(const ModelSpec& spec) {
  const int n = model_size(spec);
  if (n > 8) throw std::invalid_argument("enumerate_model: n must be <= 8");
  const std::int64_t total = factorial_i64(n);
  std::vector<double> w(static_cast<std::size_t>(total));

  auto fill_by_weight = [&](auto&& weight_fn) {
    std::vector<std::int32_t> t(static_cast<std::size_t>(n));
    std::iota(t.begin(), t.end(), 1);
    std::size_t rank = 0;
    do {
      w[rank] = weight_fn(t);
      ++rank;
    } while (std::next_permutation(t.begin(), t.end()));
  };

  if (std::holds_alternative<UniformModel>(spec)) {
    fill_by_weight([](const std::vector<std::int32_t>&) { return 1.0; });
  } else if (const auto* m = std::get_if<MallowsModel>(&spec)) {
    const double q = m->q;
    fill_by_weight([&](const std::vector<std::int32_t>& t) {
      const Permutation p(t, Permutation::Unchecked{});
      return std::pow(q, static_cast<double>(inversions(p)));
    });
  } else if (const auto* e = std::get_if<ExpFamilyModel>(&spec)) {
    fill_by_weight([&](const std::vector<std::int32_t>& t) {
      double s = 0.0;
      for (int i = 1; i <= n; ++i)
        s += e->f(static_cast<double>(i) / n,
                  static_cast<double>(t[static_cast<std::size_t>(i - 1)]) / n);
      return std::exp(e->theta * s);
    });
  } else if (const auto* ft = std::get_if<FixedPointTiltModel>(&spec)) {
    fill_by_weight([&](const std::vector<std::int32_t>& t) {
      int fp = 0;
      for (int i = 1; i <= n; ++i)
        if (t[static_cast<std::size_t>(i - 1)] == i) ++fp;
      return std::exp(ft->theta * fp);
    });
  } else if (const auto* mu = std::get_if<MuRandomModel>(&spec)) {
    if (n > 4)
      throw std::invalid_argument("enumerate_model: mu-random oracle is limited to n <= 4");
    fill_by_weight([&](const std::vector<std::int32_t>& t) {
      const Permutation p(t, Permutation::Unchecked{});
      return mu_random_pmf_quadrature(mu->density, p);
    });
  } else {
    throw std::invalid_argument("enumerate_model: model has no explicit permutation weight");
  }

  long double sum = 0.0L;
  for (double x : w) sum += x;
  for (double& x : w) x = static_cast<double>(x / sum);
  return ExactPmf(n, std::move(w));
}

/// Sum of unnormalized weights of the Mallows oracle (the partition function),
/// for cross-checks against the closed product formula.
inline double mallows_weight_sum(int n, double q) {
  if (n > 8) throw std::invalid_argument("mallows_weight_sum: n must be <= 8");
  std::vector<std::int32_t> t(static_cast<std::size_t>(n));
  std::iota(t.begin(), t.end(), 1);
  long double sum = 0.0L;
  do {
    const Permutation p(t, Permutation::Unchecked{});
    sum += std::pow(q, static_cast<double>(inversions(p)));
  } while (std::next_permutation(t.begin(), t.end()));
  return static_cast<double>(sum);
}

/// Exact P(pi(p) = q) for all index tuples p, q of length l (l <= 2).
/// Tuples are flattened as idx = (p_1-1)*n + (p_2-1) for l = 2.
class MarginalTable {
 public:
  MarginalTable(int n, int l, std::vector<double> t) : n_(n), l_(l), table_(std::move(t)) {}

  int size() const { return n_; }
  int tuple_length() const { return l_; }

  double prob(const std::vector<std::int32_t>& p, const std::vector<std::int32_t>& q) const {
    return table_[flat(p) * dim() + flat(q)];
  }

  double row_sum(const std::vector<std::int32_t>& p) const {
    double s = 0.0;
    const std::size_t base = flat(p) * dim();
    for (std::size_t j = 0; j < dim(); ++j) s += table_[base + j];
    return s;
  }

  /// Visits all valid (p, q) tuple pairs with positive-probability structure.
  template <typename F>
  void for_each_entry(F&& f) const {
    std::vector<std::int32_t> p(static_cast<std::size_t>(l_)), q(static_cast<std::size_t>(l_));
    visit_tuples(p, 0, [&](const std::vector<std::int32_t>& pt) {
      visit_tuples(q, 0, [&](const std::vector<std::int32_t>& qt) { f(pt, qt, prob(pt, qt)); });
    });
  }

  template <typename F>
  void for_each_tuple(F&& f) const {
    std::vector<std::int32_t> p(static_cast<std::size_t>(l_));
    visit_tuples(p, 0, f);
  }

 private:
  std::size_t dim() const {
    std::size_t d = 1;
    for (int a = 0; a < l_; ++a) d *= static_cast<std::size_t>(n_);
    return d;
  }

  std::size_t flat(const std::vector<std::int32_t>& t) const {
    std::size_t idx = 0;
    for (const auto v : t) idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v - 1);
    return idx;
  }

  template <typename F>
  void visit_tuples(std::vector<std::int32_t>& t, int depth, F&& f) const {
    if (depth == l_) {
      f(t);
      return;
    }
    for (int v = 1; v <= n_; ++v) {
      bool dup = false;
      for (int a = 0; a < depth; ++a)
        if (t[static_cast<std::size_t>(a)] == v) dup = true;
      if (dup) continue;
      t[static_cast<std::size_t>(depth)] = v;
      visit_tuples(t, depth + 1, f);
    }
  }

  friend MarginalTable marginal_table(const ExactPmf&, int);

  int n_;
  int l_;
  std::vector<double> table_;  // dim x dim, distinct-tuple entries populated
};

inline MarginalTable marginal_table(const ExactPmf& pmf, int l) {
  const int n = pmf.size();
  if (l < 1 || l > 2) throw std::invalid_argument("marginal_table: l must be 1 or 2");
  std::size_t dim = 1;
  for (int a = 0; a < l; ++a) dim *= static_cast<std::size_t>(n);
  std::vector<double> table(dim * dim, 0.0);
  pmf.for_each([&](const std::vector<std::int32_t>& t, double prob) {
    if (l == 1) {
      for (int i = 0; i < n; ++i)
        table[static_cast<std::size_t>(i) * dim +
              static_cast<std::size_t>(t[static_cast<std::size_t>(i)] - 1)] += prob;
    } else {
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          if (a == b) continue;
          const std::size_t pi = static_cast<std::size_t>(a) * static_cast<std::size_t>(n) +
                                 static_cast<std::size_t>(b);
          const std::size_t qi =
              static_cast<std::size_t>(t[static_cast<std::size_t>(a)] - 1) *
                  static_cast<std::size_t>(n) +
              static_cast<std::size_t>(t[static_cast<std::size_t>(b)] - 1);
          table[pi * dim + qi] += prob;
        }
    }
  });
  return MarginalTable(n, l, std::move(table));
}

/// Max over tuple pairs within the window ||p-r||_inf <= n*delta,
/// ||q-s||_inf <= n*delta of |P(pi(p)=q) / P(pi(r)=s) - 1|.  The regularity
/// diagnostic: ~0 for equi-continuous laws, bounded away from 0 where the
/// property fails.
inline double equi_continuity_ratio(const ExactPmf& pmf, int l, double delta) {
  const MarginalTable table = marginal_table(pmf, l);
  const int n = pmf.size();
  const double window = n * delta + 1e-9;

  std::vector<std::vector<std::int32_t>> tuples;
  table.for_each_tuple([&](const std::vector<std::int32_t>& t) { tuples.push_back(t); });

  auto within = [&](const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (std::abs(a[i] - b[i]) > window) return false;
    return true;
  };

  double worst = 0.0;
  for (const auto& p : tuples)
    for (const auto& r : tuples) {
      if (!within(p, r)) continue;
      for (const auto& q : tuples)
        for (const auto& s : tuples) {
          if (!within(q, s)) continue;
          const double denom = table.prob(r, s);
          if (denom <= 0.0) continue;
          worst = std::max(worst, std::abs(table.prob(p, q) / denom - 1.0));
        }
    }
  return worst;
}

/// sup over p, q in S(n,l) of |n^l P(pi(p)=q) / prod_a rho(p_a/n, q_a/n) - 1|:
/// the finite-n measure of the marginal density estimate.
inline double density_ratio_sup(const ExactPmf& pmf, const Density& d, int l) {
  const MarginalTable table = marginal_table(pmf, l);
  const int n = pmf.size();
  const double nl = std::pow(static_cast<double>(n), l);
  double sup = 0.0;
  table.for_each_entry([&](const std::vector<std::int32_t>& p,
                           const std::vector<std::int32_t>& q, double prob) {
    double denom = 1.0;
    for (std::size_t a = 0; a < p.size(); ++a)
      denom *= d(static_cast<double>(p[a]) / n, static_cast<double>(q[a]) / n);
    sup = std::max(sup, std::abs(nl * prob / denom - 1.0));
  });
  return sup;
}

}  // namespace permlab
