#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polyball/dyadic.hpp"
#include "polyball/errors.hpp"

namespace polyball {

// Enumeration guards. Anything bigger than these is out of desk scale and
// raises GuardExceeded instead of grinding.
inline constexpr std::uint64_t kGridEnumerationGuard = 10'000'000;
inline constexpr std::uint64_t kZEnumerationGuard = 1'000'000;
inline constexpr std::uint64_t kBlockTableGuard = 1'000'000;

/// Finite index set {0, ..., size-1}. A doubled set carries the two-tag
/// layout: even indices play the (gamma, a) role, odd indices (gamma, b).
struct IndexSet {
  int size = 1;
  bool doubled = false;

  IndexSet() = default;
  IndexSet(int size_, bool doubled_) : size(size_), doubled(doubled_) {
    if (size < 1) throw DomainViolation("index set: size must be positive");
    if (doubled && size % 2 != 0) throw DomainViolation("index set: doubled size must be even");
  }

  static IndexSet plain(int n) { return IndexSet(n, false); }
  static IndexSet paired(int gamma_count) { return IndexSet(2 * gamma_count, true); }

  bool contains(int i) const { return 0 <= i && i < size; }
  int pair_count() const {
    if (!doubled) throw DomainViolation("index set: not doubled");
    return size / 2;
  }

  bool operator==(const IndexSet&) const = default;
};

inline int pair_a(int gamma) { return 2 * gamma; }
inline int pair_b(int gamma) { return 2 * gamma + 1; }

/// Non-negative per-level counts (s_0, ..., s_{d-1}).
struct CountVector {
  std::vector<std::int64_t> entries;

  CountVector() = default;
  explicit CountVector(std::vector<std::int64_t> e) : entries(std::move(e)) {
    for (const auto s : entries)
      if (s < 0) throw DomainViolation("count vector: negative entry");
  }

  int depth() const { return static_cast<int>(entries.size()); }
  std::int64_t at(int n) const { return entries[static_cast<std::size_t>(n)]; }

  bool operator==(const CountVector&) const = default;
};

/// Subset of the index set with at most `cap` members.
class SigmaSet {
 public:
  SigmaSet() = default;
  SigmaSet(IndexSet index_set, int cap, std::vector<int> members)
      : index_set_(index_set), cap_(cap), members_(std::move(members)) {
    if (cap_ < 0) throw DomainViolation("sigma set: negative cap");
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    if (static_cast<int>(members_.size()) > cap_)
      throw DomainViolation("sigma set: member count exceeds cap");
    for (const int m : members_)
      if (!index_set_.contains(m)) throw DomainViolation("sigma set: member outside index set");
  }

  static SigmaSet empty(IndexSet index_set, int cap) { return SigmaSet(index_set, cap, {}); }
  static SigmaSet singleton(IndexSet index_set, int member) {
    return SigmaSet(index_set, 1, {member});
  }

  const IndexSet& index_set() const { return index_set_; }
  int cap() const { return cap_; }
  const std::vector<int>& members() const { return members_; }
  int size() const { return static_cast<int>(members_.size()); }
  bool is_empty() const { return members_.empty(); }
  bool contains(int i) const {
    return std::binary_search(members_.begin(), members_.end(), i);
  }

  bool operator==(const SigmaSet&) const = default;

 private:
  IndexSet index_set_{};
  int cap_ = 0;
  std::vector<int> members_;
};

/// Point of {0,1}^(index set x depth), stored by its support.
class BitPoint {
 public:
  BitPoint() = default;
  BitPoint(IndexSet index_set, int depth, std::vector<std::pair<int, int>> bits)
      : index_set_(index_set), depth_(depth), bits_(std::move(bits)) {
    if (depth_ < 1) throw DomainViolation("bit point: depth must be positive");
    std::sort(bits_.begin(), bits_.end());
    bits_.erase(std::unique(bits_.begin(), bits_.end()), bits_.end());
    for (const auto& [index, level] : bits_) {
      if (!index_set_.contains(index)) throw DomainViolation("bit point: index out of range");
      if (level < 0 || level >= depth_) throw DomainViolation("bit point: level out of range");
    }
  }

  const IndexSet& index_set() const { return index_set_; }
  int depth() const { return depth_; }
  const std::vector<std::pair<int, int>>& bits() const { return bits_; }

  bool bit(int index, int level) const {
    return std::binary_search(bits_.begin(), bits_.end(), std::pair{index, level});
  }

  /// Levels with a set bit in row `index`, ascending.
  std::vector<int> row(int index) const {
    std::vector<int> levels;
    auto it = std::lower_bound(bits_.begin(), bits_.end(), std::pair{index, 0});
    for (; it != bits_.end() && it->first == index; ++it) levels.push_back(it->second);
    return levels;
  }

  /// Indices with a set bit at `level`, ascending.
  std::vector<int> level_support(int level) const {
    std::vector<int> indices;
    for (const auto& [index, lvl] : bits_)
      if (lvl == level) indices.push_back(index);
    return indices;
  }

  bool operator==(const BitPoint&) const = default;

 private:
  IndexSet index_set_{};
  int depth_ = 1;
  std::vector<std::pair<int, int>> bits_;
};

/// Entry n counts the indices whose bit at level n is set.
inline CountVector count_vector(const BitPoint& x) {
  std::vector<std::int64_t> entries(static_cast<std::size_t>(x.depth()), 0);
  for (const auto& [index, level] : x.bits()) ++entries[static_cast<std::size_t>(level)];
  return CountVector(std::move(entries));
}

/// Positive dyadic level weights r_0..r_{d-1} with sum at most 1.
class WeightFamily {
 public:
  explicit WeightFamily(std::vector<Dyadic> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw DomainViolation("weights: empty family");
    Dyadic total;
    for (const auto& r : weights_) {
      if (!(Dyadic() < r)) throw DomainViolation("weights: weights must be positive");
      total += r;
    }
    if (dyadic_int(1) < total) throw DomainViolation("weights: total exceeds 1");
  }

  /// r_n = 1 / 2^(n+1); the family every section-building routine assumes.
  static WeightFamily standard(int depth) {
    if (depth < 1) throw DomainViolation("weights: depth must be positive");
    std::vector<Dyadic> r;
    r.reserve(static_cast<std::size_t>(depth));
    for (int n = 0; n < depth; ++n) r.push_back(Dyadic::half_power(n + 1));
    return WeightFamily(std::move(r));
  }

  int depth() const { return static_cast<int>(weights_.size()); }
  const Dyadic& at(int n) const { return weights_[static_cast<std::size_t>(n)]; }
  const std::vector<Dyadic>& values() const { return weights_; }

  /// Level bound M_n = floor(1 / r_n); no accepted count vector exceeds it.
  std::int64_t bound(int n) const {
    const Dyadic& r = weights_[static_cast<std::size_t>(n)];
    return static_cast<std::int64_t>((static_cast<__int128>(1) << r.exp()) / r.num());
  }

  bool is_standard() const {
    for (int n = 0; n < depth(); ++n)
      if (at(n) != Dyadic::half_power(n + 1)) return false;
    return true;
  }

  bool operator==(const WeightFamily&) const = default;

 private:
  std::vector<Dyadic> weights_;
};

/// sum_n r_n s_n <= 1, evaluated exactly.
inline bool z0_membership(const CountVector& s, const WeightFamily& weights) {
  if (weights.depth() < s.depth())
    throw DomainViolation("z0: weight family shorter than count vector");
  Dyadic total;
  for (int n = 0; n < s.depth(); ++n) total += weights.at(n) * dyadic_int(s.at(n));
  return !(dyadic_int(1) < total);
}

using ZPredicate = std::function<bool(const CountVector&)>;

inline ZPredicate z0_predicate(WeightFamily weights) {
  return [w = std::move(weights)](const CountVector& s) { return z0_membership(s, w); };
}

/// x lies in K(Z, index set) iff its level counts satisfy the Z predicate.
inline bool k_membership(const BitPoint& x, const ZPredicate& z_pred) {
  return z_pred(count_vector(x));
}

inline bool k_membership(const BitPoint& x, const WeightFamily& weights) {
  return z0_membership(count_vector(x), weights);
}

/// Certificate that x stays outside K(Z0): a set F of levels whose weighted
/// counts already exceed 1, so every point dominating x on F also stays out.
/// Levels are added greedily in decreasing r_n * N_n order (ties toward lower
/// levels); absent when x is a member.
inline std::optional<std::vector<int>> exclusion_certificate(const BitPoint& x,
                                                             const WeightFamily& weights) {
  const CountVector counts = count_vector(x);
  if (z0_membership(counts, weights)) return std::nullopt;
  std::vector<std::pair<Dyadic, int>> terms;
  for (int n = 0; n < counts.depth(); ++n) {
    if (counts.at(n) == 0) continue;
    terms.emplace_back(weights.at(n) * dyadic_int(counts.at(n)), n);
  }
  std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return b.first < a.first;
    return a.second < b.second;
  });
  Dyadic acc;
  std::vector<int> levels;
  for (const auto& [term, n] : terms) {
    acc += term;
    levels.push_back(n);
    if (dyadic_int(1) < acc) {
      std::sort(levels.begin(), levels.end());
      return levels;
    }
  }
  throw InvariantFailure("exclusion certificate: total exceeded 1 but greedy never did");
}

/// Finitely supported exact point of [-1,1]^(index set).
class GridVector {
 public:
  GridVector() = default;
  GridVector(IndexSet index_set, std::vector<std::pair<int, Dyadic>> coords)
      : index_set_(index_set), coords_(std::move(coords)) {
    std::erase_if(coords_, [](const auto& c) { return c.second.is_zero(); });
    std::sort(coords_.begin(), coords_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    const Dyadic one = dyadic_int(1);
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (i > 0 && coords_[i - 1].first == coords_[i].first)
        throw DomainViolation("grid vector: duplicate coordinate");
      if (!index_set_.contains(coords_[i].first))
        throw DomainViolation("grid vector: index out of range");
      if (one < abs(coords_[i].second))
        throw DomainViolation("grid vector: coordinate outside [-1,1]");
    }
  }

  const IndexSet& index_set() const { return index_set_; }
  const std::vector<std::pair<int, Dyadic>>& coords() const { return coords_; }

  Dyadic at(int index) const {
    auto it = std::lower_bound(coords_.begin(), coords_.end(), index,
                               [](const auto& c, int i) { return c.first < i; });
    return it != coords_.end() && it->first == index ? it->second : Dyadic();
  }

  bool is_zero() const { return coords_.empty(); }

  bool operator==(const GridVector&) const = default;

 private:
  IndexSet index_set_{};
  std::vector<std::pair<int, Dyadic>> coords_;
};

inline Dyadic coordinate_abs_sum(const GridVector& v) {
  Dyadic total;
  for (const auto& [index, value] : v.coords()) total += abs(value);
  return total;
}

/// Membership in B (coordinate magnitudes summing to at most 1), or in
/// B+ when positive_only additionally forbids negative coordinates.
inline bool b_membership(const GridVector& v, bool positive_only) {
  if (positive_only)
    for (const auto& [index, value] : v.coords())
      if (value.negative()) return false;
  return !(dyadic_int(1) < coordinate_abs_sum(v));
}

// ---------------------------------------------------------------------------
// Dyadic grid enumeration: every vector with coordinates k/2^d, |k| < 2^d,
// inside B (or B+). Coordinates of magnitude exactly 1 are excluded: the
// binary-expansion surjection never attains 1 at finite depth, so the exact
// round-trip domain stops one grid step short of the boundary.
// ---------------------------------------------------------------------------

/// Exact number of grid vectors; throws GuardExceeded past the guard.
inline std::uint64_t grid_count(const IndexSet& index_set, int denom_exp, bool positive_only) {
  if (denom_exp < 0) throw DomainViolation("grid: negative denominator exponent");
  if (denom_exp > 22)
    throw GuardExceeded("grid: denominator exponent " + std::to_string(denom_exp) +
                        " is beyond the enumeration guard");
  const std::int64_t unit = std::int64_t(1) << denom_exp;
  const std::uint64_t cap = kGridEnumerationGuard + 1;
  // ways[b] = completions with leftover budget b (in 1/2^d steps); exact below
  // the guard, saturated at cap above it.
  std::vector<std::uint64_t> ways(static_cast<std::size_t>(unit) + 1, 1);
  std::vector<std::uint64_t> prefix(static_cast<std::size_t>(unit) + 2, 0);
  const std::uint64_t sign_choices = positive_only ? 1 : 2;
  for (int c = 0; c < index_set.size; ++c) {
    for (std::int64_t b = 0; b <= unit; ++b)
      prefix[static_cast<std::size_t>(b) + 1] =
          prefix[static_cast<std::size_t>(b)] + ways[static_cast<std::size_t>(b)];
    std::vector<std::uint64_t> next(static_cast<std::size_t>(unit) + 1);
    for (std::int64_t b = 0; b <= unit; ++b) {
      const std::int64_t jmax = std::min<std::int64_t>(unit - 1, b);
      const std::uint64_t window = prefix[static_cast<std::size_t>(b)] -
                                   prefix[static_cast<std::size_t>(b - jmax)];
      next[static_cast<std::size_t>(b)] =
          std::min<std::uint64_t>(cap, ways[static_cast<std::size_t>(b)] + sign_choices * window);
    }
    ways.swap(next);
  }
  const std::uint64_t count = ways[static_cast<std::size_t>(unit)];
  if (count > kGridEnumerationGuard)
    throw GuardExceeded("grid: enumeration size exceeds " +
                        std::to_string(kGridEnumerationGuard));
  return count;
}

/// Visits every grid vector in a fixed order (coordinates ascending, values
/// from most negative to most positive).
template <class F>
void for_each_grid_vector(const IndexSet& index_set, int denom_exp, bool positive_only, F&& fn) {
  grid_count(index_set, denom_exp, positive_only);  // enforce the guard up front
  const std::int64_t unit = std::int64_t(1) << denom_exp;
  std::vector<std::pair<int, Dyadic>> coords;
  coords.reserve(static_cast<std::size_t>(index_set.size));
  auto rec = [&](auto&& self, int index, std::int64_t budget) -> void {
    if (index == index_set.size) {
      fn(GridVector(index_set, coords));
      return;
    }
    const std::int64_t top = std::min<std::int64_t>(unit - 1, budget);
    for (std::int64_t k = positive_only ? 0 : -top; k <= top; ++k) {
      if (k == 0) {
        self(self, index + 1, budget);
        continue;
      }
      coords.emplace_back(index, Dyadic(k, denom_exp));
      self(self, index + 1, budget - (k < 0 ? -k : k));
      coords.pop_back();
    }
  };
  rec(rec, 0, unit);
}

inline std::vector<GridVector> enumerate_grid(const IndexSet& index_set, int denom_exp,
                                              bool positive_only) {
  std::vector<GridVector> out;
  for_each_grid_vector(index_set, denom_exp, positive_only,
                       [&](const GridVector& v) { out.push_back(v); });
  return out;
}

// ---------------------------------------------------------------------------
// The finite state space Z0 and the block-product points mapped onto K(Z0).
// ---------------------------------------------------------------------------

inline std::int64_t floor_ratio(const Dyadic& a, const Dyadic& b) {
  // floor(a / b) for a >= 0, b > 0.
  const __int128 num = static_cast<__int128>(a.num()) << b.exp();
  const __int128 den = static_cast<__int128>(b.num()) << a.exp();
  return static_cast<std::int64_t>(num / den);
}

/// All count vectors with sum_n r_n s_n <= 1, in ascending lexicographic
/// order. Throws GuardExceeded past the guard.
inline std::vector<CountVector> enumerate_z0(const WeightFamily& weights) {
  std::vector<CountVector> out;
  std::vector<std::int64_t> entries(static_cast<std::size_t>(weights.depth()), 0);
  auto rec = [&](auto&& self, int level, Dyadic budget) -> void {
    if (level == weights.depth()) {
      out.emplace_back(entries);
      if (out.size() > kZEnumerationGuard)
        throw GuardExceeded("z0: enumeration size exceeds " +
                            std::to_string(kZEnumerationGuard));
      return;
    }
    const std::int64_t top = floor_ratio(budget, weights.at(level));
    for (std::int64_t s = 0; s <= top; ++s) {
      entries[static_cast<std::size_t>(level)] = s;
      self(self, level + 1, budget - weights.at(level) * dyadic_int(s));
    }
    entries[static_cast<std::size_t>(level)] = 0;
  };
  rec(rec, 0, dyadic_int(1));
  return out;
}

/// Point of the block product: counts z plus, per level m, the tuple
/// (x^{m,0}, ..., x^{m,M_m}) where x^{m,i} holds at most i members. The
/// tuples include the i = 0 factor, which is always the empty set.
struct BlockPoint {
  CountVector counts;
  std::vector<std::vector<SigmaSet>> blocks;

  bool operator==(const BlockPoint&) const = default;
};

inline void validate_block_point(const BlockPoint& e, const WeightFamily& weights,
                                 const IndexSet& index_set) {
  const int depth = e.counts.depth();
  if (depth != weights.depth() || static_cast<int>(e.blocks.size()) != depth)
    throw DomainViolation("block point: depth mismatch");
  if (!z0_membership(e.counts, weights))
    throw DomainViolation("block point: counts outside Z0");
  for (int m = 0; m < depth; ++m) {
    const auto& tuple = e.blocks[static_cast<std::size_t>(m)];
    if (static_cast<std::int64_t>(tuple.size()) != weights.bound(m) + 1)
      throw DomainViolation("block point: tuple size differs from level bound + 1");
    for (int i = 0; i < static_cast<int>(tuple.size()); ++i) {
      const SigmaSet& s = tuple[static_cast<std::size_t>(i)];
      if (s.cap() != i) throw DomainViolation("block point: cap must equal tuple position");
      if (s.index_set() != index_set) throw DomainViolation("block point: index set mismatch");
    }
  }
}

}  // namespace polyball
