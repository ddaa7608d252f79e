#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polyball/json_io.hpp"
#include "polyball/maps.hpp"
#include "polyball/model.hpp"
#include "polyball/norms.hpp"
#include "polyball/ramsey.hpp"
#include "polyball/sampling.hpp"

namespace polyball {

/// Run configuration shared by all subcommands. Every constraint the types
/// depend on is re-validated on load, with the violated inequality named.
struct Config {
  int gamma_size = 2;
  int depth = 3;
  double p = 2.0;
  std::optional<double> xi1;  // defaults derived from p when unset
  std::optional<double> xi2;
  int graph_n = 100;
  std::uint64_t seed = 12345;
  std::string output_format = "csv";  // csv | json
  std::string output_path;            // empty writes to stdout

  void validate() const {
    if (gamma_size < 1) throw DomainViolation("config: gamma_size must satisfy gamma_size >= 1");
    if (depth < 1) throw DomainViolation("config: depth must satisfy depth >= 1");
    if (!(p > 1.0)) throw DomainViolation("config: p must satisfy p > 1");
    if (graph_n < 1) throw DomainViolation("config: graph_n must satisfy graph_n >= 1");
    const double cap = std::pow(2.0, 1.0 - 1.0 / p);
    const double x1 = xi1.value_or(1.0 + (cap - 1.0) / 3.0);
    const double x2 = xi2.value_or(1.0 + 2.0 * (cap - 1.0) / 3.0);
    if (!(1.0 < x1)) throw DomainViolation("config: levels must satisfy 1 < xi1");
    if (!(x1 < x2)) throw DomainViolation("config: levels must satisfy xi1 < xi2");
    if (!(x2 < cap)) throw DomainViolation("config: levels must satisfy xi2 < 2^(1-1/p)");
    if (output_format != "csv" && output_format != "json")
      throw DomainViolation("config: output_format must be csv or json");
  }

  ChainConfig chain() const { return ChainConfig::standard(gamma_size, depth); }

  std::uint64_t graph_seed() const { return derive_seed(seed, 0x67726170); }

  NormParams norm_params() const {
    SierpinskiGraph graph = SierpinskiGraph::random(graph_n, graph_seed());
    const double cap = std::pow(2.0, 1.0 - 1.0 / p);
    return NormParams(p, xi1.value_or(1.0 + (cap - 1.0) / 3.0),
                      xi2.value_or(1.0 + 2.0 * (cap - 1.0) / 3.0), std::move(graph));
  }

  static Config from_json(const json& j) {
    Config c;
    c.gamma_size = j.value("gamma_size", c.gamma_size);
    c.depth = j.value("depth", c.depth);
    c.p = j.value("p", c.p);
    if (j.contains("xi1") && !j.at("xi1").is_null()) c.xi1 = j.at("xi1").get<double>();
    if (j.contains("xi2") && !j.at("xi2").is_null()) c.xi2 = j.at("xi2").get<double>();
    c.graph_n = j.value("graph_n", c.graph_n);
    c.seed = j.value("seed", c.seed);
    c.output_format = j.value("output_format", c.output_format);
    c.output_path = j.value("output_path", c.output_path);
    c.validate();
    return c;
  }

  json to_json() const {
    json j{{"gamma_size", gamma_size}, {"depth", depth},   {"p", p},
           {"graph_n", graph_n},       {"seed", seed},     {"output_format", output_format},
           {"output_path", output_path}};
    if (xi1) j["xi1"] = *xi1;
    if (xi2) j["xi2"] = *xi2;
    return j;
  }
};

// ---------------------------------------------------------------------------
// map / lift: one forward or section application per stable map id.
// ---------------------------------------------------------------------------

inline WeightFamily weights_for_depth(int depth) { return WeightFamily::standard(depth); }

inline json run_map(const Config& config, const std::string& map_id, const json& input) {
  if (map_id == "h") {
    const double p = input.value("p", config.p);
    return json{{"y", h_forward(input.at("x").get<std::vector<double>>(), p)}};
  }
  if (map_id == "psi") return to_json(psi_forward(grid_vector_from_json(input)));
  if (map_id == "phi") {
    const auto bits = input.at("bits").get<std::vector<int>>();
    const Dyadic value = phi_forward(bits, weights_for_depth(static_cast<int>(bits.size())));
    json out = to_json(value);
    out["fraction"] = value.to_fraction();
    return out;
  }
  if (map_id == "phi_power" || map_id == "f") {
    const BitPoint x = bit_point_from_json(input);
    const WeightFamily w = weights_for_depth(x.depth());
    return to_json(map_id == "f" ? f_forward(x, w) : phi_power_forward(x, w));
  }
  if (map_id == "union") {
    const IndexSet is = index_set_from_json(input);
    std::vector<SigmaSet> parts;
    for (const auto& part : input.at("parts"))
      parts.push_back(SigmaSet(is, 1, part.get<std::vector<int>>()));
    return to_json(union_map(parts));
  }
  if (map_id == "g") {
    const BlockPoint e = block_point_from_json(input);
    return to_json(g_forward(e, weights_for_depth(e.counts.depth())));
  }
  if (map_id == "compose") {
    const ChainConfig chain = config.chain();
    return to_json(compose_forward(source_point_from_json(input), chain));
  }
  throw DomainViolation("map: unknown map id '" + map_id + "'");
}

inline json run_lift(const Config& config, const std::string& map_id, const json& input) {
  if (map_id == "h") {
    const double p = input.value("p", config.p);
    return json{{"x", h_inverse(input.at("y").get<std::vector<double>>(), p)}};
  }
  if (map_id == "psi") return to_json(psi_section(grid_vector_from_json(input)));
  if (map_id == "phi") {
    const int depth = input.value("depth", config.depth);
    return json{{"bits", phi_section(dyadic_from_json(input), depth, weights_for_depth(depth))}};
  }
  if (map_id == "f") {
    const int depth = input.value("depth", config.depth);
    return to_json(f_section(grid_vector_from_json(input), depth, weights_for_depth(depth)));
  }
  if (map_id == "union") {
    const SigmaSet s = sigma_set_from_json(input);
    json parts = json::array();
    for (const auto& part : union_section(s, input.value("parts", s.cap())))
      parts.push_back(part.members());
    return json{{"parts", std::move(parts)}};
  }
  if (map_id == "g") {
    const BitPoint y = bit_point_from_json(input);
    return to_json(g_section(y, weights_for_depth(y.depth())), y.index_set());
  }
  if (map_id == "compose") {
    const ChainConfig chain = config.chain();
    return to_json(compose_section(grid_vector_from_json(input), chain),
                   chain.gamma_doubled());
  }
  throw DomainViolation("lift: unknown lift id '" + map_id + "'");
}

// ---------------------------------------------------------------------------
// coverage: exact round-trip surjectivity over the whole dyadic grid.
// ---------------------------------------------------------------------------

inline json run_coverage(const Config& config) {
  const ChainConfig chain = config.chain();
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t grid_size = grid_count(chain.gamma(), config.depth, false);
  std::uint64_t hits = 0;
  json first_miss;
  for_each_grid_vector(chain.gamma(), config.depth, false, [&](const GridVector& t) {
    const SourcePoint s = compose_section(t, chain);
    if (compose_forward(s, chain) == t)
      ++hits;
    else if (first_miss.is_null())
      first_miss = to_json(t);
  });
  const auto elapsed = std::chrono::steady_clock::now() - start;
  json out{{"gamma_size", config.gamma_size},
           {"depth", config.depth},
           {"grid_size", grid_size},
           {"hits", hits},
           {"coverage", grid_size == 0 ? 1.0
                                       : static_cast<double>(hits) / static_cast<double>(grid_size)},
           {"complete", hits == grid_size},
           {"elapsed_ms",
            std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count()}};
  if (!first_miss.is_null()) out["first_miss"] = first_miss;
  return out;
}

// ---------------------------------------------------------------------------
// norm: norms and level-set memberships of one point.
// ---------------------------------------------------------------------------

inline json run_norm(const Config& config, const json& point, std::vector<int> alphas,
                     std::optional<SierpinskiGraph> graph = std::nullopt) {
  const NormParams base = config.norm_params();
  const NormParams params = graph ? NormParams(base.p, base.xi1, base.xi2, std::move(*graph))
                                  : std::move(base);
  const PairVector v = pair_vector_from_json(point);
  const double prime = prime_norm(v, params);
  const bool in_ball = prime <= 1.0 + kNormTolerance;
  if (alphas.empty()) {
    // Default to the support inside the graph range.
    for (const auto& [index, value] : v.x)
      if (index < params.graph.size()) alphas.push_back(index);
    for (const auto& [index, value] : v.y)
      if (index < params.graph.size()) alphas.push_back(index);
    std::sort(alphas.begin(), alphas.end());
    alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
  }
  json levels = json::array();
  for (const int alpha : alphas) {
    json row{{"alpha", alpha}};
    if (in_ball) {
      row["in_U"] = uv_membership(v, alpha, params.xi2, params);
      row["in_V"] = uv_membership(v, alpha, params.xi1, params);
    }
    levels.push_back(std::move(row));
  }
  return json{{"lp_x", lp_norm(v.x, params.p)},
              {"lp_y", lp_norm(v.y, params.p)},
              {"prime_norm", prime},
              {"in_ball", in_ball},
              {"xi1", params.xi1},
              {"xi2", params.xi2},
              {"levels", std::move(levels)}};
}

// ---------------------------------------------------------------------------
// propq: the scaling experiment and the pigeonhole check.
// ---------------------------------------------------------------------------

inline std::string format_fixed(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", v);
  return buffer;
}

inline std::string scaling_csv(const std::vector<ScalingRow>& rows) {
  std::string out = "n,trial,seed,lis,lds,m,m_over_n,m_over_sqrt_n\n";
  for (const auto& row : rows) {
    out += std::to_string(row.n) + ',' + std::to_string(row.trial) + ',' +
           std::to_string(row.seed) + ',' + std::to_string(row.lis) + ',' +
           std::to_string(row.lds) + ',' + std::to_string(row.m) + ',' +
           format_fixed(row.m_over_n) + ',' + format_fixed(row.m_over_sqrt_n) + '\n';
  }
  return out;
}

inline json scaling_json(const std::vector<ScalingRow>& rows) {
  json out = json::array();
  for (const auto& row : rows)
    out.push_back(json{{"n", row.n},
                       {"trial", row.trial},
                       {"seed", row.seed},
                       {"lis", row.lis},
                       {"lds", row.lds},
                       {"m", row.m},
                       {"m_over_n", row.m_over_n},
                       {"m_over_sqrt_n", row.m_over_sqrt_n}});
  return out;
}

inline json run_es(int r, int s, EsMode mode, std::uint64_t trials, std::uint64_t seed) {
  const EsReport report = erdos_szekeres_check(r, s, mode, trials, seed);
  return json{{"r", report.r},
              {"s", report.s},
              {"length", report.length},
              {"mode", mode == EsMode::kExhaustive ? "exhaustive" : "random"},
              {"checked", report.checked},
              {"violations", report.violations}};
}

// ---------------------------------------------------------------------------
// check: the invariant battery behind the `check` subcommand.
// ---------------------------------------------------------------------------

struct CheckLine {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct CheckResult {
  std::vector<CheckLine> lines;
  bool all_ok = true;
};

namespace detail {

template <class Fn>
void run_check_line(CheckResult& result, const std::string& name, Fn&& fn) {
  CheckLine line;
  line.name = name;
  try {
    line.detail = fn();
    line.ok = true;
  } catch (const std::exception& e) {
    line.ok = false;
    line.detail = e.what();
  }
  result.all_ok = result.all_ok && line.ok;
  result.lines.push_back(std::move(line));
}

inline void expect(bool condition, const std::string& message) {
  if (!condition) throw InvariantFailure(message);
}

}  // namespace detail

/// Runs every invariant category at reduced scale; `thorough` multiplies the
/// randomized trial counts by ten.
inline CheckResult run_check(const Config& config, bool thorough) {
  CheckResult result;
  const int mult = thorough ? 10 : 1;
  const std::uint64_t seed = config.seed;
  using detail::expect;
  using detail::run_check_line;

  run_check_line(result, "dyadic_exact_arithmetic", [&] {
    Rng rng(derive_seed(seed, 1));
    for (int t = 0; t < 2000 * mult; ++t) {
      const Dyadic a(static_cast<std::int64_t>(rng.below(1 << 20)) - (1 << 19),
                     static_cast<int>(rng.below(20)));
      const Dyadic b(static_cast<std::int64_t>(rng.below(1 << 20)) - (1 << 19),
                     static_cast<int>(rng.below(20)));
      expect((a + b) - b == a, "dyadic: (a + b) - b differs from a");
      const __int128 lhs = static_cast<__int128>(a.num()) << b.exp();
      const __int128 rhs = static_cast<__int128>(b.num()) << a.exp();
      expect((a < b) == (lhs < rhs), "dyadic: comparison disagrees with cross-multiplication");
    }
    return std::to_string(2000 * mult) + " samples";
  });

  run_check_line(result, "membership_chain_equivalence", [&] {
    for (int n = 1; n <= 3; ++n)
      for (int d = 1; d <= 3; ++d) {
        const WeightFamily w = WeightFamily::standard(d);
        const IndexSet is = IndexSet::plain(n);
        for (std::uint32_t mask = 0; mask < (1u << (n * d)); ++mask) {
          std::vector<std::pair<int, int>> bits;
          for (int c = 0; c < n * d; ++c)
            if (mask & (1u << c)) bits.emplace_back(c / d, c % d);
          const BitPoint x(is, d, std::move(bits));
          expect(k_membership(x, w) == b_membership(phi_power_forward(x, w), true),
                 "chain: count route and coordinate route disagree");
        }
      }
    Rng rng(derive_seed(seed, 2));
    const IndexSet is = IndexSet::plain(8);
    const WeightFamily w = WeightFamily::standard(8);
    for (int t = 0; t < 2000 * mult; ++t) {
      const BitPoint x = random_mixed_density_bit_point(is, 8, rng);
      expect(k_membership(x, w) == b_membership(phi_power_forward(x, w), true),
             "chain: count route and coordinate route disagree");
    }
    return "exhaustive to 3x3, " + std::to_string(2000 * mult) + " random samples at 8x8";
  });

  run_check_line(result, "downward_closure", [&] {
    Rng rng(derive_seed(seed, 3));
    const IndexSet is = IndexSet::plain(6);
    const WeightFamily w = WeightFamily::standard(5);
    int members = 0;
    for (int t = 0; t < 4000 * mult && members < 600 * mult; ++t) {
      const BitPoint x = random_bit_point(is, 5, 0.25, rng);
      if (!k_membership(x, w)) continue;
      ++members;
      std::vector<std::pair<int, int>> subset;
      for (const auto& b : x.bits())
        if (rng.chance(0.6)) subset.push_back(b);
      expect(k_membership(BitPoint(is, 5, std::move(subset)), w),
             "closure: removing bits pushed a member outside");
    }
    return std::to_string(members) + " members shrunk";
  });

  run_check_line(result, "certificate_soundness", [&] {
    Rng rng(derive_seed(seed, 4));
    const IndexSet is = IndexSet::plain(8);
    const WeightFamily w = WeightFamily::standard(8);
    for (int t = 0; t < 300 * mult; ++t) {
      const BitPoint x = random_excluded_bit_point(is, 8, w, rng);
      const auto certificate = exclusion_certificate(x, w);
      expect(certificate.has_value(), "certificate: missing for an excluded point");
      for (int e = 0; e < 20; ++e)
        expect(!k_membership(random_dominating_extension(x, *certificate, rng), w),
               "certificate: a dominating extension slipped back in");
    }
    return std::to_string(300 * mult) + " certificates x 20 extensions";
  });

  run_check_line(result, "level_bounds", [&] {
    Rng rng(derive_seed(seed, 5));
    const WeightFamily w = WeightFamily::standard(6);
    for (int t = 0; t < 3000 * mult; ++t) {
      std::vector<std::int64_t> entries(6);
      for (auto& s : entries) s = static_cast<std::int64_t>(rng.below(80));
      const CountVector cv(entries);
      if (!z0_membership(cv, w)) continue;
      for (int n = 0; n < 6; ++n)
        expect(cv.at(n) <= w.bound(n), "bounds: accepted count above floor(1/r_n)");
    }
    return "bounds respected";
  });

  run_check_line(result, "map_round_trips", [&] {
    const ChainConfig chain = ChainConfig::standard(2, 3);
    std::uint64_t count = 0;
    for_each_grid_vector(chain.gamma(), 3, false, [&](const GridVector& t) {
      ++count;
      expect(compose_forward(compose_section(t, chain), chain) == t,
             "roundtrip: compose section failed on " + to_json(t).dump());
    });
    Rng rng(derive_seed(seed, 6));
    const ChainConfig wide = ChainConfig::standard(5, 5);
    for (int t = 0; t < 200 * mult; ++t) {
      std::vector<std::pair<int, Dyadic>> coords;
      std::int64_t budget = 31;
      for (int g = 0; g < 5 && budget > 0; ++g) {
        const std::int64_t k =
            static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(budget + 1)));
        budget -= k;
        if (k != 0) coords.emplace_back(g, Dyadic(rng.chance(0.5) ? k : -k, 5));
      }
      const GridVector target(wide.gamma(), std::move(coords));
      expect(compose_forward(compose_section(target, wide), wide) == target,
             "roundtrip: compose section failed at gamma 5 depth 5");
    }
    return std::to_string(count) + " grid targets + " + std::to_string(200 * mult) + " random";
  });

  run_check_line(result, "range_containment", [&] {
    Rng rng(derive_seed(seed, 7));
    const ChainConfig chain = ChainConfig::standard(4, 4);
    for (int t = 0; t < 1000 * mult; ++t) {
      const SourcePoint s = random_source(chain, rng);
      const BlockPoint e = decode_source(s, chain);
      const BitPoint y = g_forward(e, chain.weights());
      expect(k_membership(y, chain.weights()), "range: g image left K(Z0)");
      const GridVector positive = f_forward(y, chain.weights());
      expect(b_membership(positive, true), "range: f image left B+");
      expect(b_membership(psi_forward(positive), false), "range: psi image left B");
    }
    return std::to_string(1000 * mult) + " sources";
  });

  run_check_line(result, "g_respects_counts", [&] {
    Rng rng(derive_seed(seed, 8));
    const ChainConfig chain = ChainConfig::standard(3, 4);
    for (int t = 0; t < 1000 * mult; ++t) {
      const BlockPoint e = decode_source(random_source(chain, rng), chain);
      const CountVector counts = count_vector(g_forward(e, chain.weights()));
      for (int m = 0; m < chain.depth(); ++m)
        expect(counts.at(m) <= e.counts.at(m), "counts: N_m exceeded z(m)");
    }
    return std::to_string(1000 * mult) + " sources";
  });

  run_check_line(result, "locality_dependency_sets", [&] {
    Rng rng(derive_seed(seed, 9));
    const ChainConfig chain = ChainConfig::standard(2, 3);
    int done = 0;
    for (int t = 0; t < 500 * mult; ++t) {
      const SourcePoint s = random_source(chain, rng);
      const int gamma = static_cast<int>(rng.below(2));
      const Dyadic before = compose_forward(s, chain).at(gamma);
      const int block =
          chain.z_block_count() + static_cast<int>(rng.below(static_cast<std::uint64_t>(
                                      chain.total_blocks() - chain.z_block_count())));
      int slot = static_cast<int>(rng.below(4));
      while (slot == pair_a(gamma) || slot == pair_b(gamma))
        slot = static_cast<int>(rng.below(4));
      SourcePoint perturbed = s;
      SigmaSet& cell = perturbed.blocks[static_cast<std::size_t>(block)];
      if (cell.is_empty())
        cell = SigmaSet::singleton(chain.gamma_doubled(), slot);
      else if (cell.contains(slot))
        cell = SigmaSet::empty(chain.gamma_doubled(), 1);
      else
        continue;
      ++done;
      expect(compose_forward(perturbed, chain).at(gamma) == before,
             "locality: foreign block slot changed a compose output");
    }
    expect(locality_report("psi", {0}, chain).size() == 2, "locality: psi set size");
    expect(locality_report("phi_power", {1}, chain).size() == 3, "locality: phi_power set size");
    bool rejected = false;
    try {
      locality_report("nope", {0}, chain);
    } catch (const DomainViolation&) {
      rejected = true;
    }
    expect(rejected, "locality: unknown map id accepted");
    return std::to_string(done) + " perturbations";
  });

  run_check_line(result, "phi_depth_agreement", [&] {
    Rng rng(derive_seed(seed, 10));
    const WeightFamily w = WeightFamily::standard(8);
    for (int t = 0; t < 2000 * mult; ++t) {
      const int agree = static_cast<int>(rng.below(9));
      std::vector<int> a(8), b(8);
      for (int n = 0; n < 8; ++n) {
        a[static_cast<std::size_t>(n)] = rng.chance(0.5) ? 1 : 0;
        b[static_cast<std::size_t>(n)] =
            n < agree ? a[static_cast<std::size_t>(n)] : (rng.chance(0.5) ? 1 : 0);
      }
      expect(!(Dyadic::half_power(agree) < abs(phi_forward(a, w) - phi_forward(b, w))),
             "phi: depth-agreement bound violated");
    }
    return std::to_string(2000 * mult) + " pairs";
  });

  run_check_line(result, "h_round_trip", [&] {
    Rng rng(derive_seed(seed, 11));
    for (const double p : {1.5, 2.0, 3.0}) {
      for (int t = 0; t < 700 * mult; ++t) {
        std::vector<double> x(4);
        for (auto& v : x) v = rng.symmetric();
        double norm_p = 0.0;
        for (const double v : x) norm_p += std::pow(std::fabs(v), p);
        norm_p = std::pow(norm_p, 1.0 / p);
        if (norm_p > 1.0)
          for (auto& v : x) v /= norm_p;
        const auto image = h_forward(x, p);
        double image_sum = 0.0;
        for (const double v : image) image_sum += std::fabs(v);
        expect(image_sum <= 1.0 + kNormTolerance, "h: image left the ball");
        const auto back = h_inverse(image, p);
        for (std::size_t i = 0; i < x.size(); ++i)
          expect(std::fabs(back[i] - x[i]) <= kNormTolerance, "h: round trip drifted");
      }
    }
    return "p in {1.5, 2, 3}";
  });

  run_check_line(result, "norm_axioms_and_equivalence", [&] {
    const NormParams params = config.norm_params();
    Rng rng(derive_seed(seed, 12));
    for (int t = 0; t < 1000 * mult; ++t) {
      const PairVector u = random_pair_vector(params.graph.size(), rng);
      const PairVector v = random_pair_vector(params.graph.size(), rng);
      const double c = 4.0 * rng.symmetric();
      const PairVector cu{sparse_scale(u.x, c), sparse_scale(u.y, c)};
      expect(std::fabs(prime_norm(cu, params) - std::fabs(c) * prime_norm(u, params)) <=
                 kNormTolerance,
             "norm: homogeneity failed");
      const PairVector sum{sparse_add(u.x, v.x), sparse_add(u.y, v.y)};
      expect(prime_norm(sum, params) <=
                 prime_norm(u, params) + prime_norm(v, params) + kNormTolerance,
             "norm: triangle inequality failed");
      const double base = std::max(lp_norm(u.x, params.p), lp_norm(u.y, params.p));
      expect(base <= prime_norm(u, params) + kNormTolerance &&
                 prime_norm(u, params) <= 2.0 * base + kNormTolerance,
             "norm: equivalence bounds failed");
    }
    return std::to_string(1000 * mult) + " samples";
  });

  run_check_line(result, "graph_symmetry_irreflexivity", [&] {
    const SierpinskiGraph g = SierpinskiGraph::random(200, derive_seed(seed, 13));
    for (int a = 0; a < 200; ++a) {
      expect(!g.edge(a, a), "graph: diagonal edge");
      for (int b = a + 1; b < 200; ++b)
        expect(g.edge(a, b) == g.edge(b, a), "graph: asymmetric edge");
    }
    return "n = 200 exhaustive";
  });

  run_check_line(result, "level_set_nesting", [&] {
    const NormParams params = config.norm_params();
    Rng rng(derive_seed(seed, 14));
    for (int t = 0; t < 1500 * mult; ++t) {
      PairVector v = random_pair_vector(params.graph.size(), rng);
      const double norm = prime_norm(v, params);
      if (norm > 1.0) {
        v.x = sparse_scale(v.x, 1.0 / norm);
        v.y = sparse_scale(v.y, 1.0 / norm);
      }
      const int alpha = static_cast<int>(rng.below(
          static_cast<std::uint64_t>(params.graph.size())));
      if (uv_membership(v, alpha, params.xi2, params))
        expect(uv_membership(v, alpha, params.xi1, params),
               "nesting: xi2 membership without xi1 membership");
    }
    return std::to_string(1500 * mult) + " samples";
  });

  run_check_line(result, "witness_dichotomy", [&] {
    const SierpinskiGraph g = SierpinskiGraph::random(40, derive_seed(seed, 15));
    const NormParams params(config.p, config.norm_params().xi1, config.norm_params().xi2, g);
    std::uint64_t searched = 0;
    for (int a = 0; a < 40; ++a) {
      for (int b = a + 1; b < 40; ++b) {
        const auto report =
            disjointness_check(a, b, params, 50 * static_cast<std::uint64_t>(mult),
                               derive_seed(seed, static_cast<std::uint64_t>(a),
                                           static_cast<std::uint64_t>(b)));
        if (report.disjoint) {
          searched += report.samples;
          expect(report.hits == 0, "dichotomy: sampler found a point on a disjoint pair");
        } else {
          expect(report.witness.has_value(), "dichotomy: missing witness");
          expect(ball_membership(*report.witness, params), "dichotomy: witness left the ball");
          expect(uv_membership(*report.witness, a, params.xi2, params) &&
                     uv_membership(*report.witness, b, params.xi2, params),
                 "dichotomy: witness misses a level set");
        }
      }
    }
    return "all pairs at n = 40, " + std::to_string(searched) + " refutation samples";
  });

  run_check_line(result, "discretized_corner_search", [&] {
    const NormParams params = config.norm_params();
    const int n = std::min(30, params.graph.size());
    const double c = std::pow(2.0, -1.0 / params.p);
    const std::vector<double> palette = {0.0,  c,   -c,   params.xi1 / 2.0,
                                         -params.xi1 / 2.0, 1.0, -1.0};
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        if (!params.graph.edge(a, b)) continue;
        for (const double xa : palette)
          for (const double xb : palette)
            for (const double ya : palette)
              for (const double yb : palette) {
                const PairVector v{make_sparse({{a, xa}, {b, xb}}),
                                   make_sparse({{a, ya}, {b, yb}})};
                if (prime_norm(v, params) > 1.0 + kNormTolerance) continue;
                expect(!(uv_membership(v, a, params.xi1, params) &&
                         uv_membership(v, b, params.xi1, params)),
                       "corner search: found a point on an edge pair");
              }
      }
    return "palette^4 over all edges, n = " + std::to_string(n);
  });

  run_check_line(result, "homogeneous_oracle_agreement", [&] {
    for (int n = 1; n <= 6; ++n) {
      std::vector<double> values(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = i;
      do {
        const FamilyRelations rel = relations_from_graph(SierpinskiGraph(values));
        for (const auto mode : {HomogeneousMode::kDisjoint, HomogeneousMode::kMeeting}) {
          const auto a = max_homogeneous(rel, mode, SearchMethod::kExhaustive);
          const auto b = max_homogeneous(rel, mode, SearchMethod::kDp);
          const auto c = max_homogeneous(rel, mode, SearchMethod::kFast);
          expect(a.size() == b.size() && b.size() == c.size(),
                 "homogeneous: methods disagree");
        }
      } while (std::next_permutation(values.begin(), values.end()));
    }
    Rng rng(derive_seed(seed, 16));
    for (int t = 0; t < 100 * mult; ++t) {
      const FamilyRelations rel =
          relations_from_graph(SierpinskiGraph(random_injection(300, rng)));
      for (const auto mode : {HomogeneousMode::kDisjoint, HomogeneousMode::kMeeting})
        expect(max_homogeneous(rel, mode, SearchMethod::kDp).size() ==
                   max_homogeneous(rel, mode, SearchMethod::kFast).size(),
               "homogeneous: dp and fast disagree");
    }
    return "all permutations to n = 6, random n = 300";
  });

  run_check_line(result, "erdos_szekeres", [&] {
    const EsReport report = erdos_szekeres_check(3, 3, EsMode::kExhaustive, 0, 0);
    expect(report.violations == 0, "erdos-szekeres: found a violation");
    return "violations: 0 over " + std::to_string(report.checked) + " permutations";
  });

  run_check_line(result, "scaling_bounds", [&] {
    const auto rows = scaling_experiment({100, 1600}, 5 * mult, seed);
    for (const auto& row : rows) {
      expect(row.m >= isqrt_ceil(row.n), "scaling: below the pigeonhole bound");
      // The vanishing-fraction bound only separates from sqrt(n) once
      // 2*sqrt(n) clears n/10, i.e. from n = 1600 up.
      if (row.n >= 1600)
        expect(row.m < row.n / 10, "scaling: homogeneous set suspiciously large");
    }
    return std::to_string(rows.size()) + " rows";
  });

  run_check_line(result, "output_determinism", [&] {
    const auto rows = scaling_experiment({100}, 2, seed);
    const auto rerun = scaling_experiment({100}, 2, seed);
    expect(scaling_csv(rows) == scaling_csv(rerun), "determinism: CSV bytes differ on rerun");
    return "byte-identical rerun";
  });

  return result;
}

}  // namespace polyball
