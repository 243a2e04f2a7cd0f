#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace permlab {

/// A permutation of {1..n}.  All interfaces speak 1-based values: entry i of
/// targets() is pi(i).  Immutable after construction.
class Permutation {
 public:
  /// Validating constructor: `targets` must be a bijection of {1..n}.
  static Permutation from_targets(std::vector<std::int32_t> targets) {
    if (!is_bijection(targets))
      throw std::invalid_argument("Permutation: targets are not a bijection of {1..n}");
    return Permutation(std::move(targets), Unchecked{});
  }

  /// Fast path for samplers that construct bijections by design.  Checked in
  /// debug builds only.
  struct Unchecked {};
  Permutation(std::vector<std::int32_t> targets, Unchecked) : tgt_(std::move(targets)) {
    assert(is_bijection(tgt_));
  }

  static Permutation identity(int n) {
    std::vector<std::int32_t> t(static_cast<std::size_t>(n));
    std::iota(t.begin(), t.end(), 1);
    return Permutation(std::move(t), Unchecked{});
  }

  static Permutation reversal(int n) {
    std::vector<std::int32_t> t(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = n - i;
    return Permutation(std::move(t), Unchecked{});
  }

  int size() const { return static_cast<int>(tgt_.size()); }

  /// pi(i) for i in {1..n}.
  std::int32_t operator()(int i) const { return tgt_[static_cast<std::size_t>(i - 1)]; }

  const std::vector<std::int32_t>& targets() const { return tgt_; }

  bool operator==(const Permutation& o) const { return tgt_ == o.tgt_; }

  static bool is_bijection(const std::vector<std::int32_t>& t) {
    const int n = static_cast<int>(t.size());
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (std::int32_t v : t) {
      if (v < 1 || v > n || seen[static_cast<std::size_t>(v - 1)]) return false;
      seen[static_cast<std::size_t>(v - 1)] = true;
    }
    return true;
  }

 private:
  std::vector<std::int32_t> tgt_;
};

/// Number of inverted pairs |{(i,j): i<j, pi(i)>pi(j)}| by merge counting,
/// O(n log n).
inline std::int64_t inversions(const Permutation& p) {
  std::vector<std::int32_t> a = p.targets();
  std::vector<std::int32_t> buf(a.size());
  std::int64_t count = 0;
  for (std::size_t width = 1; width < a.size(); width *= 2) {
    for (std::size_t lo = 0; lo + width < a.size(); lo += 2 * width) {
      const std::size_t mid = lo + width;
      const std::size_t hi = std::min(lo + 2 * width, a.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (a[i] <= a[j]) {
          buf[k++] = a[i++];
        } else {
          count += static_cast<std::int64_t>(mid - i);
          buf[k++] = a[j++];
        }
      }
      while (i < mid) buf[k++] = a[i++];
      while (j < hi) buf[k++] = a[j++];
      std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
                buf.begin() + static_cast<std::ptrdiff_t>(hi),
                a.begin() + static_cast<std::ptrdiff_t>(lo));
    }
  }
  return count;
}

/// Number of indices where two equal-size permutations agree.  With the
/// identity as second argument this is the fixed-point count.
inline int overlap(const Permutation& p, const Permutation& s) {
  if (p.size() != s.size())
    throw std::invalid_argument("overlap: size mismatch");
  int c = 0;
  for (int i = 1; i <= p.size(); ++i)
    if (p(i) == s(i)) ++c;
  return c;
}

/// counts[l] = number of cycles of length l (1-based accessor via count_of).
struct CycleCensus {
  int n = 0;
  std::vector<std::int64_t> counts;  // counts[l-1] = C_n(l)

  std::int64_t count_of(int l) const {
    if (l < 1 || l > static_cast<int>(counts.size())) return 0;
    return counts[static_cast<std::size_t>(l - 1)];
  }
};

/// O(n) cycle decomposition census via visited marks.
inline CycleCensus cycle_census(const Permutation& p) {
  const int n = p.size();
  CycleCensus c;
  c.n = n;
  c.counts.assign(static_cast<std::size_t>(n), 0);
  std::vector<bool> visited(static_cast<std::size_t>(n), false);
  for (int start = 1; start <= n; ++start) {
    if (visited[static_cast<std::size_t>(start - 1)]) continue;
    int len = 0;
    int i = start;
    do {
      visited[static_cast<std::size_t>(i - 1)] = true;
      i = p(i);
      ++len;
    } while (i != start);
    ++c.counts[static_cast<std::size_t>(len - 1)];
  }
  return c;
}

/// compose(p, q)(i) = p(q(i)).
inline Permutation compose(const Permutation& p, const Permutation& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("compose: size mismatch");
  std::vector<std::int32_t> t(static_cast<std::size_t>(p.size()));
  for (int i = 1; i <= p.size(); ++i)
    t[static_cast<std::size_t>(i - 1)] = p(q(i));
  return Permutation(std::move(t), Permutation::Unchecked{});
}

inline Permutation inverse(const Permutation& p) {
  std::vector<std::int32_t> t(static_cast<std::size_t>(p.size()));
  for (int i = 1; i <= p.size(); ++i)
    t[static_cast<std::size_t>(p(i) - 1)] = static_cast<std::int32_t>(i);
  return Permutation(std::move(t), Permutation::Unchecked{});
}

/// A tuple of l pairwise-distinct indices in {1..n}.
struct IndexTuple {
  std::vector<std::int32_t> entries;

  int length() const { return static_cast<int>(entries.size()); }

  static IndexTuple of(std::vector<std::int32_t> e) {
    IndexTuple t{std::move(e)};
    if (t.entries.empty())
      throw std::invalid_argument("IndexTuple: length must be >= 1");
    for (std::size_t a = 0; a < t.entries.size(); ++a)
      for (std::size_t b = a + 1; b < t.entries.size(); ++b)
        if (t.entries[a] == t.entries[b])
          throw std::invalid_argument("IndexTuple: entries must be pairwise distinct");
    return t;
  }
};

/// (pi(p_1), ..., pi(p_l)); entries stay distinct since pi is a bijection.
inline std::vector<std::int32_t> apply_tuple(const Permutation& p, const IndexTuple& t) {
  std::vector<std::int32_t> out(t.entries.size());
  for (std::size_t a = 0; a < t.entries.size(); ++a) {
    const std::int32_t idx = t.entries[a];
    if (idx < 1 || idx > p.size())
      throw std::out_of_range("apply_tuple: index outside {1..n}");
    out[a] = p(idx);
  }
  return out;
}

/// Cyclic shift (p_2, ..., p_l, p_1); applying it l times is the identity.
inline IndexTuple shift_tuple(const IndexTuple& t) {
  IndexTuple out = t;
  if (out.entries.size() > 1)
    std::rotate(out.entries.begin(), out.entries.begin() + 1, out.entries.end());
  return out;
}

/// Canonical-rotation predicate: the tuple starts with its minimum entry.
inline bool in_canonical_rotation(const IndexTuple& t) {
  return t.entries.front() == *std::min_element(t.entries.begin(), t.entries.end());
}

}  // namespace permlab
