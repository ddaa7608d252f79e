#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "polyball/errors.hpp"
#include "polyball/model.hpp"

namespace polyball {

// Every map here comes in a forward direction and, where meaningful, a
// section: a right inverse that rebuilds an exact preimage for any dyadic
// grid target. Forward evaluation is exact except for h, which lives in
// floating point because p-th powers of dyadics are irrational.

// ---------------------------------------------------------------------------
// h: coordinatewise signed p-th power between the lp ball and B.
// ---------------------------------------------------------------------------

inline void require_p(double p, const char* stage) {
  if (!(p > 1.0)) throw DomainViolation(std::string(stage) + ": requires p > 1");
}

/// h(x)_g = sign(x_g) * |x_g|^p.
inline std::vector<double> h_forward(const std::vector<double>& x, double p) {
  require_p(p, "h");
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    y[i] = (x[i] < 0 ? -1.0 : 1.0) * std::pow(std::fabs(x[i]), p);
  return y;
}

inline std::vector<double> h_inverse(const std::vector<double>& y, double p) {
  require_p(p, "h");
  std::vector<double> x(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    x[i] = (y[i] < 0 ? -1.0 : 1.0) * std::pow(std::fabs(y[i]), 1.0 / p);
  return x;
}

// ---------------------------------------------------------------------------
// psi: collapses a doubled positive point onto signed coordinates,
// psi(x)_g = x_(g,a) - x_(g,b).
// ---------------------------------------------------------------------------

inline GridVector psi_forward(const GridVector& x) {
  if (!x.index_set().doubled) throw DomainViolation("psi: input index set is not doubled");
  if (!b_membership(x, true)) throw DomainViolation("psi: input outside B+ of the doubled set");
  const int gamma_count = x.index_set().pair_count();
  std::vector<std::pair<int, Dyadic>> coords;
  for (int g = 0; g < gamma_count; ++g) {
    const Dyadic v = x.at(pair_a(g)) - x.at(pair_b(g));
    if (!v.is_zero()) coords.emplace_back(g, v);
  }
  return GridVector(IndexSet::plain(gamma_count), std::move(coords));
}

/// Positive/negative part split: the a-slot takes max(t_g, 0), the b-slot
/// max(-t_g, 0), so psi_forward recovers t exactly.
inline GridVector psi_section(const GridVector& t) {
  if (t.index_set().doubled) throw DomainViolation("psi: section expects a plain index set");
  if (!b_membership(t, false)) throw DomainViolation("psi: input outside B");
  std::vector<std::pair<int, Dyadic>> coords;
  for (const auto& [g, v] : t.coords())
    coords.emplace_back(v.negative() ? pair_b(g) : pair_a(g), abs(v));
  return GridVector(IndexSet::paired(t.index_set().size), std::move(coords));
}

// ---------------------------------------------------------------------------
// phi: weighted binary expansion of one coordinate row.
// ---------------------------------------------------------------------------

/// phi(bits) = sum_n r_n * bits_n.
inline Dyadic phi_forward(const std::vector<int>& bits, const WeightFamily& weights) {
  if (static_cast<int>(bits.size()) > weights.depth())
    throw DomainViolation("phi: more bits than weights");
  Dyadic total;
  for (std::size_t n = 0; n < bits.size(); ++n) {
    if (bits[n] != 0 && bits[n] != 1) throw DomainViolation("phi: bits must be 0 or 1");
    if (bits[n]) total += weights.at(static_cast<int>(n));
  }
  return total;
}

/// Binary expansion of t = k/2^depth, 0 <= k < 2^depth. Only the standard
/// weight family admits this closed form; the value 1 needs the infinite
/// all-ones tail and is rejected as unreachable at finite depth.
inline std::vector<int> phi_section(const Dyadic& t, int depth, const WeightFamily& weights) {
  if (weights.depth() < depth) throw DomainViolation("phi: weight family shorter than depth");
  for (int n = 0; n < depth; ++n)
    if (weights.at(n) != Dyadic::half_power(n + 1))
      throw DomainViolation("phi: section is only available for the standard weight family");
  if (t == dyadic_int(1))
    throw DomainViolation("phi: target 1 is unreachable at finite depth");
  if (t.negative() || dyadic_int(1) < t) throw DomainViolation("phi: target outside [0,1)");
  if (t.exp() > depth)
    throw DomainViolation("phi: target denominator exponent exceeds the depth");
  const std::int64_t k = t.num() << (depth - t.exp());
  std::vector<int> bits(static_cast<std::size_t>(depth));
  for (int n = 0; n < depth; ++n)
    bits[static_cast<std::size_t>(n)] = static_cast<int>((k >> (depth - 1 - n)) & 1);
  return bits;
}

// ---------------------------------------------------------------------------
// The coordinatewise power of phi, and its restriction f to K(Z0).
// ---------------------------------------------------------------------------

inline GridVector phi_power_forward(const BitPoint& x, const WeightFamily& weights) {
  if (weights.depth() < x.depth()) throw DomainViolation("phi^: weight family shorter than depth");
  std::vector<std::pair<int, Dyadic>> coords;
  int current = -1;
  Dyadic acc;
  for (const auto& [g, n] : x.bits()) {
    if (g != current) {
      if (current >= 0 && !acc.is_zero()) coords.emplace_back(current, acc);
      current = g;
      acc = Dyadic();
    }
    acc += weights.at(n);
  }
  if (current >= 0 && !acc.is_zero()) coords.emplace_back(current, acc);
  return GridVector(x.index_set(), std::move(coords));
}

inline GridVector f_forward(const BitPoint& x, const WeightFamily& weights) {
  if (!k_membership(x, weights))
    throw DomainViolation("f: input outside L0 (weighted level counts exceed 1)");
  return phi_power_forward(x, weights);
}

/// Row-by-row binary expansion. The input's magnitude sum <= 1 reorders into
/// the weighted level-count sum <= 1, so the result lands in L0 by itself.
inline BitPoint f_section(const GridVector& t, int depth, const WeightFamily& weights) {
  if (!b_membership(t, true)) throw DomainViolation("f: input outside B+");
  std::vector<std::pair<int, int>> bits;
  for (const auto& [g, v] : t.coords()) {
    const std::vector<int> row = phi_section(v, depth, weights);
    for (int n = 0; n < depth; ++n)
      if (row[static_cast<std::size_t>(n)]) bits.emplace_back(g, n);
  }
  return BitPoint(t.index_set(), depth, std::move(bits));
}

// ---------------------------------------------------------------------------
// union: glues cap-1 sets into one sigma_i set.
// ---------------------------------------------------------------------------

inline SigmaSet union_map(const std::vector<SigmaSet>& parts) {
  if (parts.empty()) throw DomainViolation("union: needs at least one part");
  const IndexSet& is = parts.front().index_set();
  std::vector<int> members;
  for (const auto& part : parts) {
    if (part.index_set() != is) throw DomainViolation("union: mixed index sets");
    if (part.cap() > 1) throw DomainViolation("union: parts must have cap 1");
    for (const int m : part.members()) members.push_back(m);
  }
  return SigmaSet(is, static_cast<int>(parts.size()), std::move(members));
}

/// Distributes the members one per part and pads with empties.
inline std::vector<SigmaSet> union_section(const SigmaSet& s, int part_count) {
  if (s.size() > part_count) throw DomainViolation("union: set larger than the part count");
  std::vector<SigmaSet> parts;
  parts.reserve(static_cast<std::size_t>(part_count));
  for (const int m : s.members()) parts.push_back(SigmaSet::singleton(s.index_set(), m));
  while (static_cast<int>(parts.size()) < part_count)
    parts.push_back(SigmaSet::empty(s.index_set(), 1));
  return parts;
}

// ---------------------------------------------------------------------------
// g: reads, per level m, the set selected by the count z(m),
// g(z,x)_(g,m) = 1 iff g lies in x^{m,z(m)}.
// ---------------------------------------------------------------------------

inline BitPoint g_forward(const BlockPoint& e, const WeightFamily& weights) {
  if (e.blocks.empty() || e.blocks.front().empty())
    throw DomainViolation("g: empty block table");
  const IndexSet is = e.blocks.front().front().index_set();
  validate_block_point(e, weights, is);
  std::vector<std::pair<int, int>> bits;
  for (int m = 0; m < e.counts.depth(); ++m) {
    const SigmaSet& selected =
        e.blocks[static_cast<std::size_t>(m)][static_cast<std::size_t>(e.counts.at(m))];
    for (const int g : selected.members()) bits.emplace_back(g, m);
  }
  return BitPoint(is, e.counts.depth(), std::move(bits));
}

/// z(m) = N_m(y) and the selected set is y's level-m support, whose size is
/// exactly z(m); all other tuple entries stay empty.
inline BlockPoint g_section(const BitPoint& y, const WeightFamily& weights) {
  if (weights.depth() < y.depth()) throw DomainViolation("g: weight family shorter than depth");
  const CountVector counts = count_vector(y);
  if (!z0_membership(counts, weights))
    throw DomainViolation("g: input outside K(Z0)");
  std::uint64_t table = 0;
  for (int m = 0; m < y.depth(); ++m) table += static_cast<std::uint64_t>(weights.bound(m)) + 1;
  if (table > kBlockTableGuard)
    throw GuardExceeded("g: block table size exceeds " + std::to_string(kBlockTableGuard));
  BlockPoint e;
  e.counts = counts;
  e.blocks.resize(static_cast<std::size_t>(y.depth()));
  for (int m = 0; m < y.depth(); ++m) {
    auto& tuple = e.blocks[static_cast<std::size_t>(m)];
    const std::int64_t bound = weights.bound(m);
    tuple.reserve(static_cast<std::size_t>(bound) + 1);
    for (std::int64_t i = 0; i <= bound; ++i)
      tuple.push_back(SigmaSet::empty(y.index_set(), static_cast<int>(i)));
    const std::int64_t z = counts.at(m);
    tuple[static_cast<std::size_t>(z)] =
        SigmaSet(y.index_set(), static_cast<int>(z), y.level_support(m));
  }
  return e;
}

// ---------------------------------------------------------------------------
// The composed chain: cap-1 source blocks -> block point -> K(Z0) -> B+ -> B.
// ---------------------------------------------------------------------------

/// Fixed layout of the cap-1 source blocks over the doubled index set:
/// first a z-decoding run of ceil(log2 |Z0|) blocks whose is-nonempty bits
/// select a state by index modulo |Z0| (bit j comes from block j), then for
/// each level m and size 1 <= i <= M_m a run of i blocks feeding union_map.
/// The i = 0 factors need no source blocks; they are constant.
class ChainConfig {
 public:
  struct Factor {
    int level = 0;
    int cap = 0;
    int first_block = 0;
  };

  ChainConfig(int gamma_size, int depth, WeightFamily weights)
      : gamma_size_(gamma_size), depth_(depth), weights_(std::move(weights)) {
    if (gamma_size_ < 1) throw DomainViolation("chain: gamma size must be positive");
    if (depth_ < 1) throw DomainViolation("chain: depth must be positive");
    if (weights_.depth() != depth_) throw DomainViolation("chain: weights depth mismatch");
    z_states_ = enumerate_z0(weights_);
    z_block_count_ = 0;
    while ((std::uint64_t(1) << z_block_count_) < z_states_.size()) ++z_block_count_;
    std::uint64_t blocks = static_cast<std::uint64_t>(z_block_count_);
    for (int m = 0; m < depth_; ++m) {
      for (std::int64_t i = 1; i <= weights_.bound(m); ++i) {
        factors_.push_back({m, static_cast<int>(i), static_cast<int>(blocks)});
        blocks += static_cast<std::uint64_t>(i);
        if (blocks > kBlockTableGuard)
          throw GuardExceeded("chain: source block count exceeds " +
                              std::to_string(kBlockTableGuard));
      }
    }
    total_blocks_ = static_cast<int>(blocks);
  }

  static ChainConfig standard(int gamma_size, int depth) {
    return ChainConfig(gamma_size, depth, WeightFamily::standard(depth));
  }

  int gamma_size() const { return gamma_size_; }
  int depth() const { return depth_; }
  const WeightFamily& weights() const { return weights_; }
  IndexSet gamma() const { return IndexSet::plain(gamma_size_); }
  IndexSet gamma_doubled() const { return IndexSet::paired(gamma_size_); }
  const std::vector<CountVector>& z_states() const { return z_states_; }
  int z_block_count() const { return z_block_count_; }
  const std::vector<Factor>& factors() const { return factors_; }
  int total_blocks() const { return total_blocks_; }

  int z_index_of(const CountVector& z) const {
    const auto it = std::lower_bound(
        z_states_.begin(), z_states_.end(), z, [](const CountVector& a, const CountVector& b) {
          return std::lexicographical_compare(a.entries.begin(), a.entries.end(),
                                              b.entries.begin(), b.entries.end());
        });
    if (it == z_states_.end() || !(*it == z))
      throw DomainViolation("chain: count vector is not a Z0 state");
    return static_cast<int>(it - z_states_.begin());
  }

 private:
  int gamma_size_;
  int depth_;
  WeightFamily weights_;
  std::vector<CountVector> z_states_;
  int z_block_count_ = 0;
  std::vector<Factor> factors_;
  int total_blocks_ = 0;
};

/// Truncated point of the countable power of cap-1 sets, laid out per
/// ChainConfig.
struct SourcePoint {
  std::vector<SigmaSet> blocks;

  bool operator==(const SourcePoint&) const = default;
};

inline void validate_source(const SourcePoint& s, const ChainConfig& config) {
  if (static_cast<int>(s.blocks.size()) != config.total_blocks())
    throw DomainViolation("compose: source has " + std::to_string(s.blocks.size()) +
                          " blocks, layout needs " + std::to_string(config.total_blocks()));
  for (const auto& block : s.blocks) {
    if (block.cap() != 1) throw DomainViolation("compose: source blocks must have cap 1");
    if (block.index_set() != config.gamma_doubled())
      throw DomainViolation("compose: source block over the wrong index set");
  }
}

/// Rebuilds the block point: the z state is the decoded block-occupancy
/// integer reduced modulo |Z0| (the reduction keeps the decode total and
/// surjective while it still depends on finitely many coordinates), and each
/// sigma_i factor is the union of its run of cap-1 blocks.
inline BlockPoint decode_source(const SourcePoint& s, const ChainConfig& config) {
  validate_source(s, config);
  std::uint64_t v = 0;
  for (int j = 0; j < config.z_block_count(); ++j)
    if (!s.blocks[static_cast<std::size_t>(j)].is_empty()) v |= std::uint64_t(1) << j;
  BlockPoint e;
  e.counts = config.z_states()[static_cast<std::size_t>(v % config.z_states().size())];
  e.blocks.resize(static_cast<std::size_t>(config.depth()));
  for (int m = 0; m < config.depth(); ++m) {
    auto& tuple = e.blocks[static_cast<std::size_t>(m)];
    tuple.reserve(static_cast<std::size_t>(config.weights().bound(m)) + 1);
    tuple.push_back(SigmaSet::empty(config.gamma_doubled(), 0));
  }
  for (const auto& factor : config.factors()) {
    std::vector<SigmaSet> parts(
        s.blocks.begin() + factor.first_block,
        s.blocks.begin() + factor.first_block + factor.cap);
    e.blocks[static_cast<std::size_t>(factor.level)].push_back(union_map(parts));
  }
  return e;
}

inline SourcePoint encode_block_point(const BlockPoint& e, const ChainConfig& config) {
  validate_block_point(e, config.weights(), config.gamma_doubled());
  SourcePoint s;
  s.blocks.reserve(static_cast<std::size_t>(config.total_blocks()));
  const std::uint64_t v = static_cast<std::uint64_t>(config.z_index_of(e.counts));
  for (int j = 0; j < config.z_block_count(); ++j)
    s.blocks.push_back((v >> j) & 1 ? SigmaSet::singleton(config.gamma_doubled(), 0)
                                    : SigmaSet::empty(config.gamma_doubled(), 1));
  for (const auto& factor : config.factors()) {
    const SigmaSet& value =
        e.blocks[static_cast<std::size_t>(factor.level)][static_cast<std::size_t>(factor.cap)];
    for (auto& part : union_section(value, factor.cap)) s.blocks.push_back(std::move(part));
  }
  return s;
}

inline GridVector compose_forward(const SourcePoint& s, const ChainConfig& config) {
  const BlockPoint e = decode_source(s, config);
  return psi_forward(f_forward(g_forward(e, config.weights()), config.weights()));
}

inline SourcePoint compose_section(const GridVector& t, const ChainConfig& config) {
  if (t.index_set() != config.gamma())
    throw DomainViolation("compose: target is not over the configured index set");
  const GridVector positive = psi_section(t);
  const BitPoint y = f_section(positive, config.depth(), config.weights());
  const BlockPoint e = g_section(y, config.weights());
  return encode_block_point(e, config);
}

// ---------------------------------------------------------------------------
// Locality: the exact input-coordinate dependency set of one output
// coordinate, the finite stand-in for continuity of each map.
// ---------------------------------------------------------------------------

/// psi output g reads the doubled slots (g,a) and (g,b).
inline std::vector<int> psi_dependencies(int gamma, const IndexSet& doubled) {
  if (!doubled.doubled || gamma < 0 || gamma >= doubled.pair_count())
    throw DomainViolation("locality: coordinate outside the psi range");
  return {pair_a(gamma), pair_b(gamma)};
}

/// phi^ output g reads the whole row g.
inline std::vector<std::pair<int, int>> phi_power_dependencies(int gamma, int depth) {
  std::vector<std::pair<int, int>> deps;
  for (int n = 0; n < depth; ++n) deps.emplace_back(gamma, n);
  return deps;
}

/// Input coordinate of g: either the count entry at `level`, or the bit of
/// index `index` inside the tuple entry (level, cap).
struct GInputCoord {
  bool is_count = false;
  int level = 0;
  int cap = 0;
  int index = 0;

  bool operator==(const GInputCoord&) const = default;
};

/// g output (gamma, m) reads z(m) plus the gamma-bit of every tuple entry at
/// level m.
inline std::vector<GInputCoord> g_dependencies(int gamma, int level, const WeightFamily& weights) {
  if (level < 0 || level >= weights.depth())
    throw DomainViolation("locality: level outside the g range");
  std::vector<GInputCoord> deps;
  deps.push_back({true, level, 0, 0});
  for (std::int64_t i = 0; i <= weights.bound(level); ++i)
    deps.push_back({false, level, static_cast<int>(i), gamma});
  return deps;
}

/// Bit coordinate of the source product: the presence of `index` in block
/// `block`.
struct SourceBitCoord {
  int block = 0;
  int index = 0;

  bool operator==(const SourceBitCoord&) const = default;
};

/// compose output g reads every bit of the z-decoding blocks (their
/// occupancy steers every level) and, from each factor block, exactly the
/// two doubled slots that psi folds into g.
inline std::vector<SourceBitCoord> compose_dependencies(int gamma, const ChainConfig& config) {
  if (gamma < 0 || gamma >= config.gamma_size())
    throw DomainViolation("locality: coordinate outside the compose range");
  std::vector<SourceBitCoord> deps;
  for (int j = 0; j < config.z_block_count(); ++j)
    for (int idx = 0; idx < config.gamma_doubled().size; ++idx) deps.push_back({j, idx});
  for (int j = config.z_block_count(); j < config.total_blocks(); ++j) {
    deps.push_back({j, pair_a(gamma)});
    deps.push_back({j, pair_b(gamma)});
  }
  return deps;
}

/// Labeled input coordinate for the string-keyed locality entry point.
struct InputCoordinate {
  std::string kind;  // "slot", "bit", "count", "tuple_bit" or "block_bit"
  int a = 0;
  int b = 0;
  int c = 0;

  bool operator==(const InputCoordinate&) const = default;
};

/// Dependency set of one output coordinate of the named map. Output
/// coordinates are {gamma} for "psi", "phi_power" and "compose" and
/// {gamma, level} for "g".
inline std::vector<InputCoordinate> locality_report(const std::string& map_id,
                                                    const std::vector<int>& output_coord,
                                                    const ChainConfig& config) {
  std::vector<InputCoordinate> out;
  if (map_id == "psi") {
    if (output_coord.size() != 1) throw DomainViolation("locality: psi takes {gamma}");
    for (const int slot : psi_dependencies(output_coord[0], config.gamma_doubled()))
      out.push_back({"slot", slot, 0, 0});
  } else if (map_id == "phi_power") {
    if (output_coord.size() != 1) throw DomainViolation("locality: phi_power takes {gamma}");
    if (!config.gamma_doubled().contains(output_coord[0]))
      throw DomainViolation("locality: coordinate outside the phi_power range");
    for (const auto& [g, n] : phi_power_dependencies(output_coord[0], config.depth()))
      out.push_back({"bit", g, n, 0});
  } else if (map_id == "g") {
    if (output_coord.size() != 2) throw DomainViolation("locality: g takes {gamma, level}");
    if (!config.gamma_doubled().contains(output_coord[0]))
      throw DomainViolation("locality: coordinate outside the g range");
    for (const auto& dep : g_dependencies(output_coord[0], output_coord[1], config.weights()))
      out.push_back(dep.is_count ? InputCoordinate{"count", dep.level, 0, 0}
                                 : InputCoordinate{"tuple_bit", dep.level, dep.cap, dep.index});
  } else if (map_id == "compose") {
    if (output_coord.size() != 1) throw DomainViolation("locality: compose takes {gamma}");
    for (const auto& dep : compose_dependencies(output_coord[0], config))
      out.push_back({"block_bit", dep.block, dep.index, 0});
  } else {
    throw DomainViolation("locality: unknown map id '" + map_id + "'");
  }
  return out;
}

}  // namespace polyball
