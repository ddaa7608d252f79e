#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "polyball/maps.hpp"
#include "polyball/model.hpp"
#include "polyball/norms.hpp"
#include "polyball/rng.hpp"

namespace polyball {

// Reproducible generators for the randomized suites. Densities vary per draw
// so membership predicates see both sides of their boundary.

inline BitPoint random_bit_point(const IndexSet& index_set, int depth, double density, Rng& rng) {
  std::vector<std::pair<int, int>> bits;
  for (int g = 0; g < index_set.size; ++g)
    for (int n = 0; n < depth; ++n)
      if (rng.chance(density)) bits.emplace_back(g, n);
  return BitPoint(index_set, depth, std::move(bits));
}

inline BitPoint random_mixed_density_bit_point(const IndexSet& index_set, int depth, Rng& rng) {
  const double density = 1.0 / static_cast<double>(1 + rng.below(8));
  return random_bit_point(index_set, depth, density, rng);
}

inline BitPoint random_excluded_bit_point(const IndexSet& index_set, int depth,
                                          const WeightFamily& weights, Rng& rng) {
  for (;;) {
    const BitPoint x = random_bit_point(index_set, depth, 0.5 + 0.5 * rng.unit(), rng);
    if (!k_membership(x, weights)) return x;
  }
}

/// Random point whose bits dominate x on the given levels.
inline BitPoint random_dominating_extension(const BitPoint& x, const std::vector<int>& levels,
                                            Rng& rng) {
  std::vector<std::pair<int, int>> bits;
  for (const auto& [g, n] : x.bits())
    for (const int level : levels)
      if (n == level) bits.emplace_back(g, n);
  for (int g = 0; g < x.index_set().size; ++g)
    for (int n = 0; n < x.depth(); ++n)
      if (rng.chance(0.4)) bits.emplace_back(g, n);
  return BitPoint(x.index_set(), x.depth(), std::move(bits));
}

inline SourcePoint random_source(const ChainConfig& config, Rng& rng) {
  const double fill = 0.15 + 0.7 * rng.unit();
  SourcePoint s;
  s.blocks.reserve(static_cast<std::size_t>(config.total_blocks()));
  for (int j = 0; j < config.total_blocks(); ++j) {
    if (rng.chance(fill)) {
      const int member = static_cast<int>(rng.below(
          static_cast<std::uint64_t>(config.gamma_doubled().size)));
      s.blocks.push_back(SigmaSet::singleton(config.gamma_doubled(), member));
    } else {
      s.blocks.push_back(SigmaSet::empty(config.gamma_doubled(), 1));
    }
  }
  return s;
}

inline SparseVector random_sparse_vector(int index_limit, int max_support, Rng& rng) {
  std::vector<std::pair<int, double>> entries;
  const int support = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_support + 1)));
  for (int k = 0; k < support; ++k) {
    const int index = static_cast<int>(rng.below(static_cast<std::uint64_t>(index_limit)));
    double value = rng.symmetric();
    if (value == 0.0) value = 0.5;
    entries.emplace_back(index, value);
  }
  return make_sparse(std::move(entries));
}

/// Pair with supports mostly inside the graph range, occasionally outside it.
inline PairVector random_pair_vector(int graph_n, Rng& rng) {
  const int limit = graph_n + (rng.chance(0.25) ? 5 : 0);
  return PairVector{random_sparse_vector(limit, 6, rng), random_sparse_vector(limit, 6, rng)};
}

inline std::vector<double> random_injection(int n, Rng& rng) {
  std::vector<double> values(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = static_cast<double>(i);
  rng.shuffle(values);
  return values;
}

}  // namespace polyball
