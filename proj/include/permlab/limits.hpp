#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "permlab/density.hpp"
#include "permlab/permutation.hpp"

namespace permlab {

/// A Poisson reference parameter together with which formula produced it.
struct PoissonSpec {
  double lambda = 0.0;
  std::string provenance;  // "mu_rho", "c_rho(l)", "exp_theta", "lambda_n", ...
};

enum class SteinRegime { overlap, cycle };

struct SteinBound {
  double lambda_n = 0.0;
  double tv_bound = 0.0;
  SteinRegime regime = SteinRegime::overlap;
  int cycle_len = 1;
};

/// (1/n) sum_i rho(i/n, sigma(i)/n): the discrete integral of rho against the
/// empirical permuton of sigma.  For sigma = identity this approximates
/// int rho(x,x) dx.
inline double mu_rho_along(const Density& d, const Permutation& sigma) {
  const int n = sigma.size();
  double s = 0.0;
  for (int i = 1; i <= n; ++i)
    s += d(static_cast<double>(i) / n, static_cast<double>(sigma(i)) / n);
  return s / n;
}

/// Limiting cycle parameter c_rho(l) = (1/l) * cyclic l-fold integral of rho,
/// computed as a kernel-operator trace: discretize rho to the k x k midpoint
/// matrix A with entries rho(x_i, x_j)/k and return trace(A^l)/l.  Matrix
/// power by repeated squaring.
inline double c_rho(const Density& d, int l, int grid_k = 512) {
  if (l < 1) throw std::invalid_argument("c_rho: l must be >= 1");
  if (grid_k < 64) throw std::invalid_argument("c_rho: grid resolution must be >= 64");
  const int k = grid_k;
  Eigen::MatrixXd A(k, k);
  for (int i = 0; i < k; ++i) {
    const double x = (i + 0.5) / k;
    for (int j = 0; j < k; ++j)
      A(i, j) = d(x, (j + 0.5) / k) / k;
  }
  if (l == 1) return A.trace();
  Eigen::MatrixXd result;
  bool have = false;
  Eigen::MatrixXd base = A;
  int e = l;
  while (e > 0) {
    if (e & 1) {
      result = have ? Eigen::MatrixXd(result * base) : base;
      have = true;
    }
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result.trace() / l;
}

/// Exact finite-n Poisson parameter of the independent-Z overlap count:
/// sum_p rho(p/n, sigma(p)/n) / sum_q rho(p/n, q/n).
inline double lambda_n_overlap(const Density& d, const Permutation& sigma) {
  const int n = sigma.size();
  double total = 0.0;
  for (int p = 1; p <= n; ++p) {
    double rowsum = 0.0;
    for (int q = 1; q <= n; ++q)
      rowsum += d(static_cast<double>(p) / n, static_cast<double>(q) / n);
    total += d(static_cast<double>(p) / n, static_cast<double>(sigma(p)) / n) / rowsum;
  }
  return total;
}

/// Dependency-graph total-variation bound for the independent-Z statistics:
/// overlap regime (1/n)(M/m)^2, cycle(l) regime (1/n)(M/m)^{2l}.
inline SteinBound stein_tv_bound_overlap(const Density& d, const Permutation& sigma) {
  const auto [m, M] = d.bounds();
  const double ratio = M / m;
  SteinBound b;
  b.regime = SteinRegime::overlap;
  b.cycle_len = 1;
  b.lambda_n = lambda_n_overlap(d, sigma);
  b.tv_bound = ratio * ratio / sigma.size();
  return b;
}

inline SteinBound stein_tv_bound_cycle(const Density& d, int n, int l, double lambda_n) {
  const auto [m, M] = d.bounds();
  SteinBound b;
  b.regime = SteinRegime::cycle;
  b.cycle_len = l;
  b.lambda_n = lambda_n;
  b.tv_bound = std::pow(M / m, 2.0 * l) / n;
  return b;
}

/// Stirling numbers of the second kind S(k, j) for k, j <= 20, exact.
inline const std::array<std::array<std::uint64_t, 21>, 21>& stirling2_table() {
  static const auto table = [] {
    std::array<std::array<std::uint64_t, 21>, 21> S{};
    S[0][0] = 1;
    for (int k = 1; k <= 20; ++k)
      for (int j = 1; j <= k; ++j)
        S[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] =
            static_cast<std::uint64_t>(j) * S[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j)] +
            S[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j - 1)];
    return S;
  }();
  return table;
}

/// Touchard's formula E[Poi(lambda)^k] = sum_j S(k,j) lambda^j; k <= 20.
inline double poisson_moment(double lambda, int k) {
  if (!(lambda > 0.0)) throw std::invalid_argument("poisson_moment: lambda must be > 0");
  if (k < 0 || k > 20) throw std::invalid_argument("poisson_moment: k must be in [0, 20]");
  const auto& S = stirling2_table();
  double acc = 0.0;
  double lp = 1.0;
  for (int j = 0; j <= k; ++j) {
    acc += static_cast<double>(S[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]) * lp;
    lp *= lambda;
  }
  return acc;
}

inline double log_poisson_pmf(double lambda, int j) {
  if (!(lambda > 0.0)) throw std::invalid_argument("poisson_pmf: lambda must be > 0");
  if (j < 0) return -std::numeric_limits<double>::infinity();
  return -lambda + j * std::log(lambda) - std::lgamma(static_cast<double>(j) + 1.0);
}

inline double poisson_pmf(double lambda, int j) { return std::exp(log_poisson_pmf(lambda, j)); }

/// Poisson probabilities 0..j_max where j_max is the first index with
/// cumulative mass >= 1 - tail_cutoff (reference law for TV comparisons).
inline std::vector<double> poisson_pmf_vector(double lambda, double tail_cutoff = 1e-12,
                                              int hard_cap = 4096) {
  std::vector<double> out;
  double cum = 0.0;
  for (int j = 0; j < hard_cap; ++j) {
    const double p = poisson_pmf(lambda, j);
    out.push_back(p);
    cum += p;
    if (cum >= 1.0 - tail_cutoff) break;
  }
  return out;
}

}  // namespace permlab
