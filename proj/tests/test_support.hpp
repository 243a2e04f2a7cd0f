#pragma once

// Independent oracles for the test suite: these deliberately avoid the
// library's own quadrature/statistic code paths.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "permlab/enumeration.hpp"
#include "permlab/permutation.hpp"

namespace testsupport {

/// O(n^2) pair-count inversion oracle.
inline std::int64_t inversions_quadratic(const permlab::Permutation& p) {
  std::int64_t c = 0;
  for (int i = 1; i <= p.size(); ++i)
    for (int j = i + 1; j <= p.size(); ++j)
      if (p(i) > p(j)) ++c;
  return c;
}

/// Adaptive Simpson quadrature on [a, b].
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double eps = 1e-11, int depth = 30) {
  struct Impl {
    const std::function<double(double)>& f;
    double run(double a, double b, double fa, double fm, double fb, double whole, double eps,
               int depth) const {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
      return run(a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
             run(m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
    }
  };
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return Impl{f}.run(a, b, fa, fm, fb, whole, eps, depth);
}

/// TV between empirical counts over S_n (keyed by lexicographic rank) and an
/// exact pmf.
inline double tv_to_exact(const std::map<std::int64_t, std::int64_t>& counts,
                          std::int64_t total, const permlab::ExactPmf& pmf) {
  double acc = 0.0;
  const auto& probs = pmf.probabilities();
  for (std::size_t r = 0; r < probs.size(); ++r) {
    const auto it = counts.find(static_cast<std::int64_t>(r));
    const double emp = it == counts.end()
                           ? 0.0
                           : static_cast<double>(it->second) / static_cast<double>(total);
    acc += std::abs(emp - probs[r]);
  }
  return 0.5 * acc;
}

}  // namespace testsupport
