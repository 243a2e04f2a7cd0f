#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace permlab {

/// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration on
/// the Legendre recurrence.  g up to ~64 is accurate to machine precision.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussRule gauss_legendre(int g) {
  if (g < 1) throw std::invalid_argument("gauss_legendre: g must be >= 1");
  GaussRule r;
  r.nodes.resize(static_cast<std::size_t>(g));
  r.weights.resize(static_cast<std::size_t>(g));
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < (g + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (g + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= g; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = g * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.nodes[static_cast<std::size_t>(g - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(g - 1 - i)] = w;
  }
  return r;
}

/// Composite Gauss-Legendre integral of f over [a, b] with `panels` panels.
template <typename F>
double integrate_gl(F&& f, double a, double b, int panels, const GaussRule& rule) {
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    double s = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q)
      s += rule.weights[q] * f(lo + 0.5 * h * (rule.nodes[q] + 1.0));
    total += s * 0.5 * h;
  }
  return total;
}

template <typename F>
double integrate_gl(F&& f, double a, double b, int panels, int g = 8) {
  return integrate_gl(std::forward<F>(f), a, b, panels, gauss_legendre(g));
}

/// Partial-integration matrix for a Gauss rule: B[q][r] = int_{-1}^{x_q} L_r,
/// where L_r is the Lagrange basis on the rule's nodes.  Turns node values of
/// a smooth integrand into partial integrals up to each node, with spectral
/// accuracy.  Used by ordered_product_integral.
inline std::vector<std::vector<double>> partial_integration_matrix(const GaussRule& rule) {
  const int g = static_cast<int>(rule.nodes.size());
  const GaussRule fine = gauss_legendre(32);
  auto lagrange = [&](int r, double x) {
    double v = 1.0;
    for (int j = 0; j < g; ++j) {
      if (j == r) continue;
      v *= (x - rule.nodes[static_cast<std::size_t>(j)]) /
           (rule.nodes[static_cast<std::size_t>(r)] - rule.nodes[static_cast<std::size_t>(j)]);
    }
    return v;
  };
  std::vector<std::vector<double>> B(static_cast<std::size_t>(g),
                                     std::vector<double>(static_cast<std::size_t>(g), 0.0));
  for (int q = 0; q < g; ++q) {
    const double hi = rule.nodes[static_cast<std::size_t>(q)];
    for (int r = 0; r < g; ++r) {
      B[static_cast<std::size_t>(q)][static_cast<std::size_t>(r)] =
          integrate_gl([&](double x) { return lagrange(r, x); }, -1.0, hi, 1, fine);
    }
  }
  return B;
}

/// Reusable grid + partial-integration matrix for ordered_product_integral;
/// build once, use across many integrand sets.
struct OrderedProductContext {
  GaussRule rule;
  std::vector<std::vector<double>> B;
  int panels;

  OrderedProductContext(int panels_count, int g)
      : rule(gauss_legendre(g)), B(partial_integration_matrix(rule)), panels(panels_count) {}
};

/// int over {0 < t_1 < ... < t_l < 1} of prod_i h_i(t_i).
///
/// Computed by the cumulative recursion F_1(t) = int_0^t h_1,
/// F_j(t) = int_0^t h_j F_{j-1}, answer = F_l(1), on a composite Gauss grid.
/// Partial integrals inside a panel use the spectral partial-integration
/// matrix, so the scheme keeps Gauss-order accuracy for smooth h_i.
inline double ordered_product_integral(const std::vector<std::function<double(double)>>& h,
                                       const OrderedProductContext& ctx) {
  const int l = static_cast<int>(h.size());
  if (l == 0) return 1.0;
  const GaussRule& rule = ctx.rule;
  const auto& B = ctx.B;
  const int panels = ctx.panels;
  const int g = static_cast<int>(rule.nodes.size());
  const int K = panels * g;
  const double hw = 1.0 / panels;

  std::vector<double> t(static_cast<std::size_t>(K));
  for (int p = 0; p < panels; ++p)
    for (int q = 0; q < g; ++q)
      t[static_cast<std::size_t>(p * g + q)] =
          (p + 0.5 * (rule.nodes[static_cast<std::size_t>(q)] + 1.0)) * hw;

  // F holds F_{j-1} at every node; psi is the current integrand h_j * F_{j-1}.
  std::vector<double> F(static_cast<std::size_t>(K), 1.0);
  std::vector<double> psi(static_cast<std::size_t>(K));
  for (int j = 0; j < l; ++j) {
    for (int i = 0; i < K; ++i)
      psi[static_cast<std::size_t>(i)] =
          h[static_cast<std::size_t>(j)](t[static_cast<std::size_t>(i)]) *
          F[static_cast<std::size_t>(i)];
    if (j + 1 < l) {
      double prefix = 0.0;
      for (int p = 0; p < panels; ++p) {
        double full = 0.0;
        for (int q = 0; q < g; ++q) {
          double partial = 0.0;
          for (int r = 0; r < g; ++r)
            partial += B[static_cast<std::size_t>(q)][static_cast<std::size_t>(r)] *
                       psi[static_cast<std::size_t>(p * g + r)];
          F[static_cast<std::size_t>(p * g + q)] = prefix + partial * 0.5 * hw;
          full += rule.weights[static_cast<std::size_t>(q)] *
                  psi[static_cast<std::size_t>(p * g + q)];
        }
        prefix += full * 0.5 * hw;
      }
    } else {
      double total = 0.0;
      for (int p = 0; p < panels; ++p) {
        double full = 0.0;
        for (int q = 0; q < g; ++q)
          full += rule.weights[static_cast<std::size_t>(q)] *
                  psi[static_cast<std::size_t>(p * g + q)];
        total += full * 0.5 * hw;
      }
      return total;
    }
  }
  return 0.0;  // unreachable
}

inline double ordered_product_integral(const std::vector<std::function<double(double)>>& h,
                                       int panels = 32, int g = 8) {
  return ordered_product_integral(h, OrderedProductContext(panels, g));
}

}  // namespace permlab
