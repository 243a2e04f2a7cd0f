#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "permlab/permutation.hpp"

namespace permlab {

/// The atomic measure of a permutation: mass 1/n at each (i/n, pi(i)/n).
struct EmpiricalPermuton {
  const Permutation* p;

  explicit EmpiricalPermuton(const Permutation& perm) : p(&perm) {}
  int size() const { return p->size(); }
};

/// k x k cell-mass matrix of an empirical permuton; cell (a,b) covers
/// ((a-1)/k, a/k] x ((b-1)/k, b/k].  Counts are exact integers; masses are
/// counts/n, so the total is accounted without floating accumulation.
struct GridMass {
  int k = 0;
  int n = 0;
  std::vector<std::int64_t> counts;  // row-major, k*k

  std::int64_t count(int a, int b) const {  // 1-based cell indices
    return counts[static_cast<std::size_t>(a - 1) * static_cast<std::size_t>(k) +
                  static_cast<std::size_t>(b - 1)];
  }
  double mass(int a, int b) const {
    return static_cast<double>(count(a, b)) / static_cast<double>(n);
  }
  std::int64_t total_count() const {
    std::int64_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
};

/// Cell index of coordinate i/n in the k-partition: a = ceil(k*i/n).
inline int grid_cell(int i, int n, int k) {
  return static_cast<int>((static_cast<std::int64_t>(k) * i + n - 1) / n);
}

inline GridMass grid_mass(const EmpiricalPermuton& e, int k) {
  if (k < 1) throw std::invalid_argument("grid_mass: k must be >= 1");
  const int n = e.size();
  GridMass g;
  g.k = k;
  g.n = n;
  g.counts.assign(static_cast<std::size_t>(k) * static_cast<std::size_t>(k), 0);
  for (int i = 1; i <= n; ++i) {
    const int a = grid_cell(i, n, k);
    const int b = grid_cell((*e.p)(i), n, k);
    ++g.counts[static_cast<std::size_t>(a - 1) * static_cast<std::size_t>(k) +
               static_cast<std::size_t>(b - 1)];
  }
  return g;
}

}  // namespace permlab
