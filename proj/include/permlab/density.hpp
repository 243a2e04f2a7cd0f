#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "permlab/quadrature.hpp"

namespace permlab {

/// Limiting density of the beta-scaled Kendall's-Tau model (Frank copula
/// density).  Strictly positive on the unit square with uniform marginals.
///
/// |beta| <= 500 supported; the final division is arranged as (N/D)/D so the
/// squared denominator cannot overflow.  For |beta| < 1e-4 the closed form is
/// 0/0-degenerate, so a second-order expansion in beta is used instead
/// (relative error < 1e-11 at the branch point).
inline double frank_eval(double beta, double x, double y) {
  if (!(std::abs(beta) <= 500.0))
    throw std::invalid_argument("frank_eval: |beta| must be <= 500");
  const double u = x - y;
  const double v = x + y - 1.0;
  if (std::abs(beta) < 1e-4) {
    const double A = (u * u - v * v) / 4.0;
    const double B = 1.0 / 96.0 + (u * u + v * v) / 16.0;
    return 1.0 - 2.0 * beta * A + beta * beta * (3.0 * A * A - 2.0 * B + 1.0 / 24.0);
  }
  const double num = 0.5 * beta * std::sinh(0.5 * beta);
  const double den = std::exp(0.25 * beta) * std::cosh(0.5 * beta * u) -
                     std::exp(-0.25 * beta) * std::cosh(0.5 * beta * v);
  return (num / den) / den;
}

/// Continuous bounded score on the unit square, selected by identifier.
struct ScoreFunction {
  std::string id;
  std::function<double(double, double)> eval;

  double operator()(double x, double y) const { return eval(x, y); }

  static ScoreFunction footrule() {
    return {"footrule", [](double x, double y) { return std::abs(x - y); }};
  }
  static ScoreFunction spearman_rank() {
    return {"spearman_rank", [](double x, double y) { return (x - y) * (x - y); }};
  }
  /// Piecewise-linear ridge of width 1/4 around the diagonal.
  static ScoreFunction identity_band() {
    return {"identity_band",
            [](double x, double y) { return std::max(0.0, 1.0 - 4.0 * std::abs(x - y)); }};
  }
  /// Piecewise-constant score backed by a user k x k grid (row-major,
  /// value at cell of (x, y)).
  static ScoreFunction from_grid(int k, std::vector<double> values) {
    if (k < 1 || values.size() != static_cast<std::size_t>(k) * static_cast<std::size_t>(k))
      throw std::invalid_argument("ScoreFunction::from_grid: need k*k values");
    auto data = std::make_shared<std::vector<double>>(std::move(values));
    return {"grid", [k, data](double x, double y) {
              const int i = std::min(k - 1, static_cast<int>(x * k));
              const int j = std::min(k - 1, static_cast<int>(y * k));
              return (*data)[static_cast<std::size_t>(i) * static_cast<std::size_t>(k) +
                             static_cast<std::size_t>(j)];
            }};
  }
  static ScoreFunction by_name(const std::string& name) {
    if (name == "footrule") return footrule();
    if (name == "spearman_rank") return spearman_rank();
    if (name == "identity_band") return identity_band();
    throw std::invalid_argument("unknown score function: " + name);
  }
};

struct IpfResult {
  std::vector<double> grid;     // fitted k x k density values, row-major
  std::vector<double> log_row;  // accumulated log row corrections a_i
  std::vector<double> log_col;  // accumulated log column corrections b_j
  int sweeps = 0;
};

/// Iterative proportional fitting of a strictly positive k x k matrix of
/// density values to uniform marginals (every row/column cell-average 1).
/// Alternates row and column rescaling; converges for strictly positive
/// input.  Stops when max |marginal - 1| <= tol after a full sweep.
/// `on_sweep`, when set, observes the grid after every full sweep.
inline IpfResult ipf_uniform_marginals(
    int k, std::vector<double> weights, double tol = 1e-10, int max_sweeps = 100000,
    const std::function<void(const std::vector<double>&)>& on_sweep = {}) {
  const std::size_t ks = static_cast<std::size_t>(k);
  if (weights.size() != ks * ks)
    throw std::invalid_argument("ipf_uniform_marginals: need k*k weights");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("ipf_uniform_marginals: weights must be strictly positive");

  IpfResult r;
  r.grid = std::move(weights);
  r.log_row.assign(ks, 0.0);
  r.log_col.assign(ks, 0.0);
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (std::size_t i = 0; i < ks; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < ks; ++j) s += r.grid[i * ks + j];
      const double scale = static_cast<double>(k) / s;
      for (std::size_t j = 0; j < ks; ++j) r.grid[i * ks + j] *= scale;
      r.log_row[i] += std::log(scale);
    }
    double dev = 0.0;
    for (std::size_t j = 0; j < ks; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < ks; ++i) s += r.grid[i * ks + j];
      const double scale = static_cast<double>(k) / s;
      for (std::size_t i = 0; i < ks; ++i) r.grid[i * ks + j] *= scale;
      r.log_col[j] += std::log(scale);
      dev = std::max(dev, std::abs(s / k - 1.0));
    }
    // after the column pass the columns are exact; `dev` tracks how far the
    // rows drifted, measured on the pre-scaled column sums of the next sweep
    double row_dev = 0.0;
    for (std::size_t i = 0; i < ks; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < ks; ++j) s += r.grid[i * ks + j];
      row_dev = std::max(row_dev, std::abs(s / k - 1.0));
    }
    r.sweeps = sweep;
    if (on_sweep) on_sweep(r.grid);
    if (row_dev <= tol) return r;
  }
  throw std::runtime_error("ipf_uniform_marginals: no convergence after max sweeps");
}

enum class DensityKind { uniform, frank, exp_family, grid };

/// A strictly positive density on the unit square with (approximately)
/// uniform marginals, closed-form or grid-backed.  Immutable; evaluation is
/// pure.  Grid-backed kinds evaluate piecewise-constant on midpoint cells.
class Density {
 public:
  static Density uniform() {
    Density d;
    d.kind_ = DensityKind::uniform;
    d.m_ = d.M_ = 1.0;
    return d;
  }

  static Density frank(double beta) {
    Density d;
    d.kind_ = DensityKind::frank;
    d.beta_ = beta;
    d.scan_bounds();
    return d;
  }

  /// Grid density from k x k positive values; rescaled to total mass 1.
  static Density from_grid(int k, std::vector<double> values) {
    const std::size_t ks = static_cast<std::size_t>(k);
    if (k < 1 || values.size() != ks * ks)
      throw std::invalid_argument("Density::from_grid: need k*k values");
    double sum = 0.0;
    for (double v : values) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument("Density::from_grid: values must be strictly positive");
      sum += v;
    }
    const double scale = static_cast<double>(ks * ks) / sum;
    if (std::abs(scale - 1.0) > 1e-14)  // already-normalized grids round-trip bitwise
      for (double& v : values) v *= scale;
    Density d;
    d.kind_ = DensityKind::grid;
    d.k_ = k;
    d.grid_ = std::make_shared<std::vector<double>>(std::move(values));
    d.grid_bounds();
    return d;
  }

  DensityKind kind() const { return kind_; }
  double frank_beta() const { return beta_; }
  int grid_k() const { return k_; }
  const std::vector<double>& grid_values() const { return *grid_; }
  const ScoreFunction& score() const { return score_; }
  double theta() const { return theta_; }
  const std::vector<double>& log_row_correction() const { return log_row_; }
  const std::vector<double>& log_col_correction() const { return log_col_; }

  /// (m, M) = (inf, sup) over the unit square.  Closed forms: dense
  /// endpoint-inclusive lattice scan at resolution >= 1024 (the Frank extrema
  /// sit on the lattice; interior extrema carry an O(h^2) margin since the
  /// gradient vanishes there).  Grid kinds: exact min/max of cell values.
  std::pair<double, double> bounds() const { return {m_, M_}; }

  double operator()(double x, double y) const {
    switch (kind_) {
      case DensityKind::uniform:
        return 1.0;
      case DensityKind::frank:
        return frank_eval(beta_, x, y);
      default: {
        const int i = std::min(k_ - 1, static_cast<int>(x * k_));
        const int j = std::min(k_ - 1, static_cast<int>(y * k_));
        return (*grid_)[static_cast<std::size_t>(i) * static_cast<std::size_t>(k_) +
                        static_cast<std::size_t>(j)];
      }
    }
  }

  friend Density fit_exp_family(const ScoreFunction& f, double theta, int k);

 private:
  Density() = default;

  void scan_bounds(int resolution = 1024) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int i = 0; i <= resolution; ++i) {
      const double x = static_cast<double>(i) / resolution;
      for (int j = 0; j <= resolution; ++j) {
        const double v = (*this)(x, static_cast<double>(j) / resolution);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    m_ = lo;
    M_ = hi;
  }

  void grid_bounds() {
    m_ = *std::min_element(grid_->begin(), grid_->end());
    M_ = *std::max_element(grid_->begin(), grid_->end());
  }

  DensityKind kind_ = DensityKind::uniform;
  double beta_ = 0.0;
  int k_ = 0;
  std::shared_ptr<const std::vector<double>> grid_;
  ScoreFunction score_;
  double theta_ = 0.0;
  std::vector<double> log_row_, log_col_;
  double m_ = 1.0, M_ = 1.0;
};

/// Exponential-family density exp(theta*f(x,y) + a(x) + b(y)) realized by IPF
/// on the k x k midpoint grid of exp(theta*f); deterministic given (f, theta, k).
inline Density fit_exp_family(const ScoreFunction& f, double theta, int k) {
  if (k < 8) throw std::invalid_argument("fit_exp_family: k must be >= 8");
  if (!std::isfinite(theta)) throw std::invalid_argument("fit_exp_family: theta must be finite");
  const std::size_t ks = static_cast<std::size_t>(k);
  std::vector<double> w(ks * ks);
  for (std::size_t i = 0; i < ks; ++i) {
    const double x = (static_cast<double>(i) + 0.5) / k;
    for (std::size_t j = 0; j < ks; ++j) {
      const double y = (static_cast<double>(j) + 0.5) / k;
      w[i * ks + j] = std::exp(theta * f(x, y));
    }
  }
  // converge well past the 1e-10 contract so a refit is a bitwise no-op
  IpfResult r = ipf_uniform_marginals(k, std::move(w), 1e-13);
  Density d;
  d.kind_ = DensityKind::exp_family;
  d.k_ = k;
  d.grid_ = std::make_shared<std::vector<double>>(std::move(r.grid));
  d.score_ = f;
  d.theta_ = theta;
  d.log_row_ = std::move(r.log_row);
  d.log_col_ = std::move(r.log_col);
  d.grid_bounds();
  return d;
}

inline std::pair<double, double> density_bounds(const Density& d) { return d.bounds(); }

/// Max over rows and columns of |marginal - 1| at resolution k.  Closed forms
/// use composite Gauss-Legendre lines through k midpoint stations; grid kinds
/// integrate the piecewise-constant density exactly (cell-average sums).
inline double marginal_deviation(const Density& d, int k) {
  if (k < 2) throw std::invalid_argument("marginal_deviation: k must be >= 2");
  if (d.kind() == DensityKind::uniform) return 0.0;
  if (d.kind() == DensityKind::grid || d.kind() == DensityKind::exp_family) {
    const int g = d.grid_k();
    const auto& v = d.grid_values();
    double dev = 0.0;
    for (int i = 0; i < g; ++i) {
      double row = 0.0, col = 0.0;
      for (int j = 0; j < g; ++j) {
        row += v[static_cast<std::size_t>(i) * static_cast<std::size_t>(g) +
                 static_cast<std::size_t>(j)];
        col += v[static_cast<std::size_t>(j) * static_cast<std::size_t>(g) +
                 static_cast<std::size_t>(i)];
      }
      dev = std::max(dev, std::abs(row / g - 1.0));
      dev = std::max(dev, std::abs(col / g - 1.0));
    }
    return dev;
  }
  const GaussRule rule = gauss_legendre(8);
  const int panels = std::max(1, k / 8);
  double dev = 0.0;
  for (int i = 0; i < k; ++i) {
    const double s = (i + 0.5) / k;
    const double row = integrate_gl([&](double y) { return d(s, y); }, 0.0, 1.0, panels, rule);
    const double col = integrate_gl([&](double x) { return d(x, s); }, 0.0, 1.0, panels, rule);
    dev = std::max(dev, std::abs(row - 1.0));
    dev = std::max(dev, std::abs(col - 1.0));
  }
  return dev;
}

/// Membership validator for the class of strictly positive uniform-marginal
/// densities: samplers and limit formulas require this to hold.
inline void validate_density(const Density& d) {
  const auto [m, M] = d.bounds();
  if (!(m > 0.0))
    throw std::invalid_argument("density is not strictly positive");
  if (marginal_deviation(d, 512) >= 1e-5)
    throw std::invalid_argument("density marginals deviate from uniform beyond 1e-5");
  (void)M;
}

}  // namespace permlab
