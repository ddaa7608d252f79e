#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polyball/errors.hpp"
#include "polyball/rng.hpp"

namespace polyball {

// Floating-point module: 2^(-1/p) is irrational, so everything here runs in
// doubles with one shared tolerance applied at every comparison against 1
// and the levels.
inline constexpr double kNormTolerance = 1e-9;

/// Sparse real vector: sorted unique indices, nonzero values.
using SparseVector = std::vector<std::pair<int, double>>;

inline SparseVector make_sparse(std::vector<std::pair<int, double>> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVector out;
  for (const auto& [index, value] : entries) {
    if (value == 0.0) continue;
    if (!out.empty() && out.back().first == index)
      out.back().second = value;  // later entries win
    else
      out.emplace_back(index, value);
  }
  std::erase_if(out, [](const auto& e) { return e.second == 0.0; });
  return out;
}

inline double sparse_at(const SparseVector& v, int index) {
  const auto it = std::lower_bound(v.begin(), v.end(), index,
                                   [](const auto& e, int i) { return e.first < i; });
  return it != v.end() && it->first == index ? it->second : 0.0;
}

inline SparseVector sparse_scale(const SparseVector& v, double c) {
  SparseVector out;
  out.reserve(v.size());
  for (const auto& [index, value] : v) out.emplace_back(index, c * value);
  return make_sparse(std::move(out));
}

inline SparseVector sparse_add(const SparseVector& a, const SparseVector& b) {
  std::vector<std::pair<int, double>> entries;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first))
      entries.push_back(a[i++]);
    else if (i == a.size() || b[j].first < a[i].first)
      entries.push_back(b[j++]);
    else {
      entries.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return make_sparse(std::move(entries));
}

/// Comparison graph of an injection of {0,...,n-1} into the reals:
/// (a,b) is an edge iff a != b and the value order agrees with the index
/// order. Symmetric and irreflexive by construction.
class SierpinskiGraph {
 public:
  explicit SierpinskiGraph(std::vector<double> values) : values_(std::move(values)) {
    std::vector<double> sorted = values_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw DomainViolation("sierpinski graph: values must be injective");
  }

  /// Values drawn as a seeded uniform permutation of {0,...,n-1}; only the
  /// order of the injection ever matters.
  static SierpinskiGraph random(int n, std::uint64_t seed) {
    std::vector<double> values(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = static_cast<double>(i);
    Rng rng(seed);
    rng.shuffle(values);
    return SierpinskiGraph(std::move(values));
  }

  int size() const { return static_cast<int>(values_.size()); }
  double value(int i) const { return values_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& values() const { return values_; }

  bool edge(int a, int b) const {
    if (a == b) return false;
    return (value(a) < value(b)) == (a < b);
  }

 private:
  std::vector<double> values_;
};

/// Point of the product of two lp spaces.
struct PairVector {
  SparseVector x;
  SparseVector y;

  bool operator==(const PairVector&) const = default;
};

inline double lp_norm(const SparseVector& v, double p) {
  if (!(p > 1.0)) throw DomainViolation("lp norm: requires p > 1");
  double sum = 0.0;
  if (p == 2.0) {
    for (const auto& [index, value] : v) sum += value * value;
    return std::sqrt(sum);
  }
  for (const auto& [index, value] : v) sum += std::pow(std::fabs(value), p);
  return std::pow(sum, 1.0 / p);
}

/// Exponent plus levels 1 < xi1 < xi2 < 2^(1-1/p), plus the graph driving
/// the cross terms.
struct NormParams {
  double p;
  double xi1;
  double xi2;
  SierpinskiGraph graph;

  NormParams(double p_, double xi1_, double xi2_, SierpinskiGraph graph_)
      : p(p_), xi1(xi1_), xi2(xi2_), graph(std::move(graph_)) {
    if (!(p > 1.0)) throw DomainViolation("norm params: p must satisfy p > 1");
    const double cap = level_cap();
    if (!(1.0 < xi1)) throw DomainViolation("norm params: levels must satisfy 1 < xi1");
    if (!(xi1 < xi2)) throw DomainViolation("norm params: levels must satisfy xi1 < xi2");
    if (!(xi2 < cap))
      throw DomainViolation("norm params: levels must satisfy xi2 < 2^(1-1/p)");
  }

  /// Levels spaced evenly inside the admissible open interval.
  static NormParams with_default_levels(double p_, SierpinskiGraph graph_) {
    if (!(p_ > 1.0)) throw DomainViolation("norm params: p must satisfy p > 1");
    const double cap = std::pow(2.0, 1.0 - 1.0 / p_);
    return NormParams(p_, 1.0 + (cap - 1.0) / 3.0, 1.0 + 2.0 * (cap - 1.0) / 3.0,
                      std::move(graph_));
  }

  double level_cap() const { return std::pow(2.0, 1.0 - 1.0 / p); }
};

/// sup of ||x||_p, ||y||_p and |x_a| + |y_b| over the edges (a,b). Zero
/// coordinates never attain the sup beyond the lp terms, so scanning the
/// supports is exact; indices outside the graph contribute lp terms only.
inline double prime_norm(const PairVector& v, const NormParams& params) {
  double best = std::max(lp_norm(v.x, params.p), lp_norm(v.y, params.p));
  const int n = params.graph.size();
  for (const auto& [a, xa] : v.x) {
    if (a >= n) continue;
    for (const auto& [b, yb] : v.y) {
      if (b >= n || !params.graph.edge(a, b)) continue;
      best = std::max(best, std::fabs(xa) + std::fabs(yb));
    }
  }
  return best;
}

inline bool ball_membership(const PairVector& v, const NormParams& params) {
  return prime_norm(v, params) <= 1.0 + kNormTolerance;
}

/// |x_a| + |y_a| > level, for points of the unit ball.
inline bool uv_membership(const PairVector& v, int alpha, double level,
                          const NormParams& params) {
  if (!ball_membership(v, params)) throw DomainViolation("uv: point outside the unit ball");
  return std::fabs(sparse_at(v.x, alpha)) + std::fabs(sparse_at(v.y, alpha)) > level;
}

/// The four-coordinate point x_a = x_b = y_a = y_b = 2^(-1/p). Off edges it
/// has norm exactly 1 and lands in both level sets at xi2, because
/// |x_a| + |y_a| = 2^(1-1/p) > xi2.
inline PairVector witness_point(int alpha, int beta, const NormParams& params) {
  if (alpha == beta) throw DomainViolation("witness: indices must differ");
  if (params.graph.edge(alpha, beta))
    throw DomainViolation("witness: none exists on an edge, the level sets are disjoint there");
  const double c = std::pow(2.0, -1.0 / params.p);
  const SparseVector v = make_sparse({{alpha, c}, {beta, c}});
  return PairVector{v, v};
}

struct DisjointnessReport {
  bool disjoint = false;
  std::optional<PairVector> witness;  // present when the level sets meet
  std::string certificate;            // analytic reason when disjoint
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
};

/// Off an edge: produces the witness. On an edge: emits the analytic
/// certificate and additionally runs a budgeted random search for points of
/// the xi1 level sets' intersection (none can exist; hits stays 0).
inline DisjointnessReport disjointness_check(int alpha, int beta, const NormParams& params,
                                             std::uint64_t budget, std::uint64_t seed) {
  if (alpha == beta)
    throw DomainViolation("disjointness: the diagonal is never an edge, pick distinct indices");
  DisjointnessReport report;
  if (!params.graph.edge(alpha, beta)) {
    report.disjoint = false;
    report.witness = witness_point(alpha, beta, params);
    return report;
  }
  report.disjoint = true;
  report.certificate =
      "any point of both xi1 level sets needs |x_a|+|y_a|+|x_b|+|y_b| > 2*xi1 > 2, while the "
      "edge terms force |x_a|+|y_b| <= 1 and |x_b|+|y_a| <= 1, which cap that sum at 2";
  Rng rng(seed);
  const int n = params.graph.size();
  const int lo = std::min(alpha, beta);
  const int hi = std::max(alpha, beta);
  // The sample buffers are rebuilt in place; the loop never allocates.
  PairVector v;
  v.x.reserve(3);
  v.y.reserve(3);
  const auto rebuild = [&](SparseVector& out, double at_lo, double at_hi, int extra,
                           double at_extra) {
    out.clear();
    bool placed = false;
    const auto push = [&](int index, double value) {
      if (extra >= 0 && !placed && extra < index) {
        if (at_extra != 0.0) out.emplace_back(extra, at_extra);
        placed = true;
      }
      if (value != 0.0) out.emplace_back(index, value);
    };
    push(lo, at_lo);
    push(hi, at_hi);
    if (extra >= 0 && !placed && at_extra != 0.0) out.emplace_back(extra, at_extra);
  };
  for (std::uint64_t trial = 0; trial < budget; ++trial) {
    ++report.samples;
    // Aggressive corner samples concentrated on {alpha, beta}, occasionally
    // with one extra coordinate.
    int extra = -1;
    if (rng.chance(0.2)) {
      extra = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      if (extra == lo || extra == hi) extra = -1;
    }
    rebuild(v.x, rng.symmetric(), rng.symmetric(), extra, extra >= 0 ? rng.symmetric() : 0.0);
    rebuild(v.y, rng.symmetric(), rng.symmetric(), extra, extra >= 0 ? rng.symmetric() : 0.0);
    const double norm = prime_norm(v, params);
    if (norm > 1.0) {
      // Project onto the unit sphere; the norm is absolutely homogeneous.
      const double inv = 1.0 / norm;
      for (auto& entry : v.x) entry.second *= inv;
      for (auto& entry : v.y) entry.second *= inv;
    }
    // Level sums directly; the point is in the ball by construction.
    const double sum_a = std::fabs(sparse_at(v.x, alpha)) + std::fabs(sparse_at(v.y, alpha));
    const double sum_b = std::fabs(sparse_at(v.x, beta)) + std::fabs(sparse_at(v.y, beta));
    if (sum_a > params.xi1 && sum_b > params.xi1) ++report.hits;
  }
  return report;
}

}  // namespace polyball
