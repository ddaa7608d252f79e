#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polyball/errors.hpp"
#include "polyball/norms.hpp"
#include "polyball/rng.hpp"

namespace polyball {

// ---------------------------------------------------------------------------
// Monotone subsequences. The fast path is patience sorting with predecessor
// links; the quadratic scan stays as an independently coded cross-check.
// ---------------------------------------------------------------------------

/// Indices of one longest strictly increasing subsequence, O(n log n).
inline std::vector<int> lis_indices(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  std::vector<int> pile_tops;         // index whose value ends each pile
  std::vector<int> predecessor(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    const double v = values[static_cast<std::size_t>(i)];
    const auto it = std::lower_bound(
        pile_tops.begin(), pile_tops.end(), v,
        [&](int idx, double x) { return values[static_cast<std::size_t>(idx)] < x; });
    if (it != pile_tops.begin()) predecessor[static_cast<std::size_t>(i)] = *(it - 1);
    if (it == pile_tops.end())
      pile_tops.push_back(i);
    else
      *it = i;
  }
  std::vector<int> out;
  if (!pile_tops.empty()) {
    for (int i = pile_tops.back(); i >= 0; i = predecessor[static_cast<std::size_t>(i)])
      out.push_back(i);
    std::reverse(out.begin(), out.end());
  }
  return out;
}

inline std::vector<int> lds_indices(const std::vector<double>& values) {
  std::vector<double> negated(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) negated[i] = -values[i];
  return lis_indices(negated);
}

/// Quadratic DP with parent links; the reference route for lis_indices.
inline std::vector<int> lis_indices_quadratic(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  std::vector<int> best(static_cast<std::size_t>(n), 1);
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  int tail = n > 0 ? 0 : -1;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (values[static_cast<std::size_t>(j)] < values[static_cast<std::size_t>(i)] &&
          best[static_cast<std::size_t>(j)] + 1 > best[static_cast<std::size_t>(i)]) {
        best[static_cast<std::size_t>(i)] = best[static_cast<std::size_t>(j)] + 1;
        parent[static_cast<std::size_t>(i)] = j;
      }
    }
    if (best[static_cast<std::size_t>(i)] > best[static_cast<std::size_t>(tail)]) tail = i;
  }
  std::vector<int> out;
  for (int i = tail; i >= 0; i = parent[static_cast<std::size_t>(i)]) out.push_back(i);
  std::reverse(out.begin(), out.end());
  return out;
}

inline std::vector<int> lds_indices_quadratic(const std::vector<double>& values) {
  std::vector<double> negated(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) negated[i] = -values[i];
  return lis_indices_quadratic(negated);
}

// ---------------------------------------------------------------------------
// Disjointness relations of the level-set families, and homogeneous sets.
// ---------------------------------------------------------------------------

/// Pairwise disjointness data of the two open families: u_disjoint for the
/// inner sets, v_disjoint for the outer ones. v-disjointness implies
/// u-disjointness because each inner set sits inside its outer set. When the
/// relations come from a comparison graph, order_values carries the
/// injection and unlocks the monotone-subsequence methods.
struct FamilyRelations {
  int n = 0;
  std::vector<std::vector<bool>> u_disjoint;
  std::vector<std::vector<bool>> v_disjoint;
  std::optional<std::vector<double>> order_values;
};

inline FamilyRelations make_relations(int n, const std::vector<std::pair<int, int>>& u_pairs,
                                      const std::vector<std::pair<int, int>>& v_pairs) {
  FamilyRelations rel;
  rel.n = n;
  rel.u_disjoint.assign(static_cast<std::size_t>(n),
                        std::vector<bool>(static_cast<std::size_t>(n), false));
  rel.v_disjoint = rel.u_disjoint;
  const auto put = [n](std::vector<std::vector<bool>>& m, int a, int b) {
    if (a < 0 || b < 0 || a >= n || b >= n) throw DomainViolation("relations: index out of range");
    if (a == b) throw DomainViolation("relations: the diagonal must stay empty");
    m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = true;
    m[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = true;
  };
  for (const auto& [a, b] : u_pairs) put(rel.u_disjoint, a, b);
  for (const auto& [a, b] : v_pairs) put(rel.v_disjoint, a, b);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (rel.v_disjoint[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] &&
          !rel.u_disjoint[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)])
        throw DomainViolation("relations: v-disjoint pairs must be u-disjoint");
  return rel;
}

/// Both relations equal the edge set: the level-set intersection is empty at
/// either level exactly on the edges.
inline FamilyRelations relations_from_graph(const SierpinskiGraph& g) {
  FamilyRelations rel;
  rel.n = g.size();
  rel.u_disjoint.assign(static_cast<std::size_t>(rel.n),
                        std::vector<bool>(static_cast<std::size_t>(rel.n), false));
  for (int a = 0; a < rel.n; ++a)
    for (int b = 0; b < rel.n; ++b)
      rel.u_disjoint[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = g.edge(a, b);
  rel.v_disjoint = rel.u_disjoint;
  rel.order_values = g.values();
  return rel;
}

enum class HomogeneousMode { kDisjoint, kMeeting };
enum class SearchMethod { kExhaustive, kDp, kFast };

inline bool homogeneous_pair_ok(const FamilyRelations& rel, HomogeneousMode mode, int a, int b) {
  return mode == HomogeneousMode::kDisjoint
             ? static_cast<bool>(
                   rel.u_disjoint[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)])
             : !rel.v_disjoint[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
}

inline bool verify_homogeneous(const FamilyRelations& rel, HomogeneousMode mode,
                               const std::vector<int>& members) {
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      if (!homogeneous_pair_ok(rel, mode, members[i], members[j])) return false;
  return true;
}

/// Largest index set whose pairs are all u-disjoint (mode kDisjoint) or all
/// v-meeting (mode kMeeting). Exhaustive walks every subset and is capped at
/// n <= 20; the dp and fast methods ride the monotone-subsequence structure
/// and need order_values: disjoint sets are increasing subsequences of the
/// injection, meeting sets decreasing ones.
inline std::vector<int> max_homogeneous(const FamilyRelations& rel, HomogeneousMode mode,
                                        SearchMethod method) {
  if (method == SearchMethod::kExhaustive) {
    if (rel.n > 20)
      throw GuardExceeded("homogeneous: exhaustive search is capped at 20 indices");
    // Subset DP over bitmasks: a mask is homogeneous iff its tail is and the
    // lowest member pairs with every tail member.
    std::vector<std::uint32_t> good(static_cast<std::size_t>(rel.n), 0);
    for (int a = 0; a < rel.n; ++a)
      for (int b = 0; b < rel.n; ++b)
        if (a != b && homogeneous_pair_ok(rel, mode, a, b))
          good[static_cast<std::size_t>(a)] |= std::uint32_t(1) << b;
    const std::uint32_t total = std::uint32_t(1) << rel.n;
    std::vector<std::uint8_t> ok(total, 0);
    ok[0] = 1;
    std::uint32_t best_mask = 0;
    int best_size = 0;
    for (std::uint32_t mask = 1; mask < total; ++mask) {
      const int low = std::countr_zero(mask);
      const std::uint32_t rest = mask & (mask - 1);
      ok[mask] = ok[rest] && (rest & ~good[static_cast<std::size_t>(low)]) == 0;
      if (ok[mask]) {
        const int size = std::popcount(mask);
        if (size > best_size) {
          best_size = size;
          best_mask = mask;
        }
      }
    }
    std::vector<int> out;
    for (int i = 0; i < rel.n; ++i)
      if (best_mask & (std::uint32_t(1) << i)) out.push_back(i);
    return out;
  }
  if (!rel.order_values)
    throw DomainViolation("homogeneous: dp and fast methods need comparison-graph relations");
  const std::vector<double>& values = *rel.order_values;
  if (method == SearchMethod::kDp)
    return mode == HomogeneousMode::kDisjoint ? lis_indices_quadratic(values)
                                              : lds_indices_quadratic(values);
  return mode == HomogeneousMode::kDisjoint ? lis_indices(values) : lds_indices(values);
}

/// Both alternatives at once, each re-verified pairwise before returning.
struct QReport {
  int n = 0;
  std::vector<int> best_disjoint;
  std::vector<int> best_meeting;
};

inline QReport q_report(const FamilyRelations& rel, SearchMethod method) {
  QReport report;
  report.n = rel.n;
  report.best_disjoint = max_homogeneous(rel, HomogeneousMode::kDisjoint, method);
  report.best_meeting = max_homogeneous(rel, HomogeneousMode::kMeeting, method);
  if (!verify_homogeneous(rel, HomogeneousMode::kDisjoint, report.best_disjoint) ||
      !verify_homogeneous(rel, HomogeneousMode::kMeeting, report.best_meeting))
    throw InvariantFailure("homogeneous: returned set fails its pairwise property");
  return report;
}

// ---------------------------------------------------------------------------
// The finite pigeonhole bound and the scaling experiment.
// ---------------------------------------------------------------------------

inline int isqrt_ceil(std::int64_t n) {
  std::int64_t r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r < n) ++r;
  while (r > 0 && (r - 1) * (r - 1) >= n) --r;
  return static_cast<int>(r);
}

enum class EsMode { kExhaustive, kRandom };

struct EsReport {
  int r = 0;
  int s = 0;
  int length = 0;
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
};

/// Confirms that every permutation of length (r-1)(s-1)+1 has an increasing
/// subsequence of length r or a decreasing one of length s. Exhaustive mode
/// walks all permutations and is capped at length 10.
inline EsReport erdos_szekeres_check(int r, int s, EsMode mode, std::uint64_t trials,
                                     std::uint64_t seed) {
  if (r < 2 || s < 2) throw DomainViolation("erdos-szekeres: r and s must be at least 2");
  EsReport report;
  report.r = r;
  report.s = s;
  report.length = (r - 1) * (s - 1) + 1;
  const auto violates = [&](const std::vector<double>& values) {
    return static_cast<int>(lis_indices(values).size()) < r &&
           static_cast<int>(lds_indices(values).size()) < s;
  };
  if (mode == EsMode::kExhaustive) {
    if (report.length > 10)
      throw GuardExceeded("erdos-szekeres: exhaustive mode is capped at length 10");
    std::vector<double> values(static_cast<std::size_t>(report.length));
    for (int i = 0; i < report.length; ++i)
      values[static_cast<std::size_t>(i)] = static_cast<double>(i);
    do {
      ++report.checked;
      if (violates(values)) ++report.violations;
    } while (std::next_permutation(values.begin(), values.end()));
    return report;
  }
  Rng rng(seed);
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::vector<double> values(static_cast<std::size_t>(report.length));
    for (int i = 0; i < report.length; ++i)
      values[static_cast<std::size_t>(i)] = static_cast<double>(i);
    rng.shuffle(values);
    ++report.checked;
    if (violates(values)) ++report.violations;
  }
  return report;
}

struct ScalingRow {
  int n = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  int lis = 0;
  int lds = 0;
  int m = 0;
  double m_over_n = 0.0;
  double m_over_sqrt_n = 0.0;
};

/// For each size, draws `trials` random injections and records the largest
/// homogeneous set of either kind, which for these relations is
/// max(LIS, LDS). The pigeonhole bound guarantees m >= ceil(sqrt(n)).
inline std::vector<ScalingRow> scaling_experiment(const std::vector<int>& sizes, int trials,
                                                  std::uint64_t seed) {
  std::vector<ScalingRow> rows;
  for (const int n : sizes) {
    if (n < 1) throw DomainViolation("scaling: sizes must be positive");
    for (int trial = 0; trial < trials; ++trial) {
      ScalingRow row;
      row.n = n;
      row.trial = trial;
      row.seed = derive_seed(seed, static_cast<std::uint64_t>(n),
                             static_cast<std::uint64_t>(trial));
      Rng rng(row.seed);
      std::vector<double> values(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = static_cast<double>(i);
      rng.shuffle(values);
      row.lis = static_cast<int>(lis_indices(values).size());
      row.lds = static_cast<int>(lds_indices(values).size());
      row.m = std::max(row.lis, row.lds);
      row.m_over_n = static_cast<double>(row.m) / static_cast<double>(n);
      row.m_over_sqrt_n = static_cast<double>(row.m) / std::sqrt(static_cast<double>(n));
      if (row.m < isqrt_ceil(n))
        throw InvariantFailure("scaling: monotone subsequence below the pigeonhole bound");
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace polyball
