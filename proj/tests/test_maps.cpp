#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "polyball/maps.hpp"
#include "polyball/sampling.hpp"

using namespace polyball;

TEST_CASE("h round trips through the signed power map") {
  const std::vector<double> unit = {0.0, 1.0, 0.0};
  CHECK(h_forward(unit, 2.0) == unit);
  CHECK(h_forward({}, 1.5).empty());

  const double r = std::sqrt(0.5);
  const auto image = h_forward({r, -r}, 2.0);
  CHECK(std::fabs(image[0] - 0.5) < 1e-12);
  CHECK(std::fabs(image[1] + 0.5) < 1e-12);
  CHECK(std::fabs(std::fabs(image[0]) + std::fabs(image[1]) - 1.0) < 1e-12);

  CHECK_THROWS_AS(h_forward({0.5}, 1.0), DomainViolation);
  CHECK_THROWS_AS(h_inverse({0.5}, 0.5), DomainViolation);

  Rng rng(0x5eed0201);
  for (const double p : {1.5, 2.0, 3.0}) {
    for (int trial = 0; trial < 4000; ++trial) {
      // Random point of the lp ball: sample and normalize when outside.
      std::vector<double> x(4);
      for (auto& v : x) v = rng.symmetric();
      double norm_p = 0.0;
      for (const double v : x) norm_p += std::pow(std::fabs(v), p);
      norm_p = std::pow(norm_p, 1.0 / p);
      if (norm_p > 1.0)
        for (auto& v : x) v /= norm_p;
      const auto there = h_forward(x, p);
      double image_sum = 0.0;
      for (const double v : there) image_sum += std::fabs(v);
      CHECK(image_sum <= 1.0 + 1e-9);
      const auto back = h_inverse(there, p);
      for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::fabs(back[i] - x[i]) <= 1e-9);
    }
  }
}

TEST_CASE("psi_forward unwinds the doubled layout") {
  const IndexSet doubled = IndexSet::paired(2);
  const GridVector x(doubled, {{0, Dyadic(1, 1)}, {1, Dyadic(1, 2)}, {3, Dyadic(1, 2)}});
  const GridVector expected(IndexSet::plain(2), {{0, Dyadic(1, 2)}, {1, Dyadic(-1, 2)}});
  CHECK(psi_forward(x) == expected);

  CHECK(psi_forward(GridVector(doubled, {})).is_zero());
  CHECK(psi_forward(GridVector(doubled, {{0, Dyadic(1, 1)}, {1, Dyadic(1, 1)}})).is_zero());

  // Signed input is outside B+.
  CHECK_THROWS_AS(psi_forward(GridVector(doubled, {{0, Dyadic(-1, 1)}})), DomainViolation);
  CHECK_THROWS_AS(psi_forward(GridVector(IndexSet::plain(2), {})), DomainViolation);
}

TEST_CASE("psi_section splits into positive and negative parts") {
  const GridVector t(IndexSet::plain(2), {{0, Dyadic(1, 2)}, {1, Dyadic(-1, 2)}});
  const GridVector lifted = psi_section(t);
  CHECK(lifted ==
        GridVector(IndexSet::paired(2), {{0, Dyadic(1, 2)}, {3, Dyadic(1, 2)}}));
  CHECK(psi_forward(lifted) == t);

  CHECK(psi_section(GridVector(IndexSet::plain(2), {})).is_zero());

  const GridVector neg(IndexSet::plain(1), {{0, Dyadic(-1, 1)}});
  CHECK(psi_section(neg) == GridVector(IndexSet::paired(1), {{1, Dyadic(1, 1)}}));

  Rng rng(0x5eed0202);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(8));
    const int d = 1 + static_cast<int>(rng.below(8));
    // Random member of B: dyadic numerators over one denominator, sum <= 2^d.
    std::vector<std::pair<int, Dyadic>> coords;
    std::int64_t budget = std::int64_t(1) << d;
    for (int g = 0; g < n && budget > 0; ++g) {
      const std::int64_t k = static_cast<std::int64_t>(rng.below(
          static_cast<std::uint64_t>(budget + 1)));
      budget -= k;
      if (k != 0) coords.emplace_back(g, Dyadic(rng.chance(0.5) ? k : -k, d));
    }
    const GridVector target(IndexSet::plain(n), std::move(coords));
    CHECK(psi_forward(psi_section(target)) == target);
  }
}

TEST_CASE("phi_forward evaluates the weighted expansion") {
  const WeightFamily w6 = WeightFamily::standard(6);
  CHECK(phi_forward({1, 0, 1, 0, 0, 0}, w6) == Dyadic(5, 3));
  CHECK(phi_forward({0, 0, 0, 0, 0, 0}, w6) == Dyadic());
  CHECK(phi_forward({1, 1, 1, 1}, WeightFamily::standard(4)) == Dyadic(15, 4));
  CHECK_THROWS_AS(phi_forward({2}, w6), DomainViolation);
}

TEST_CASE("phi_section is the binary expansion") {
  const WeightFamily w3 = WeightFamily::standard(3);
  CHECK(phi_section(Dyadic(5, 3), 3, w3) == std::vector<int>{1, 0, 1});
  CHECK(phi_section(Dyadic(), 3, w3) == std::vector<int>{0, 0, 0});
  CHECK_THROWS_WITH(phi_section(dyadic_int(1), 3, w3),
                    Catch::Matchers::ContainsSubstring("unreachable at finite depth"));
  CHECK_THROWS_AS(phi_section(Dyadic(-1, 2), 3, w3), DomainViolation);
  CHECK_THROWS_AS(phi_section(Dyadic(1, 4), 3, w3), DomainViolation);  // exponent too deep
  // Non-standard weights have no closed-form section.
  const WeightFamily skew(std::vector<Dyadic>{Dyadic(1, 2), Dyadic(1, 2)});
  CHECK_THROWS_AS(phi_section(Dyadic(1, 2), 2, skew), DomainViolation);

  for (std::int64_t k = 0; k < 16; ++k) {
    const WeightFamily w4 = WeightFamily::standard(4);
    CHECK(phi_forward(phi_section(Dyadic(k, 4), 4, w4), w4) == Dyadic(k, 4));
  }

  const WeightFamily w8 = WeightFamily::standard(8);
  Rng rng(0x5eed020e);
  for (int trial = 0; trial < 10000; ++trial) {
    const Dyadic t(static_cast<std::int64_t>(rng.below(256)), 8);
    CHECK(phi_forward(phi_section(t, 8, w8), w8) == t);
  }
}

TEST_CASE("phi_power applies phi row by row and f restricts it") {
  const WeightFamily w2 = WeightFamily::standard(2);
  const IndexSet d2 = IndexSet::plain(2);
  const BitPoint x(d2, 2, {{0, 0}, {1, 1}});
  const GridVector expected(d2, {{0, Dyadic(1, 1)}, {1, Dyadic(1, 2)}});
  CHECK(phi_power_forward(x, w2) == expected);
  CHECK(f_forward(x, w2) == expected);

  CHECK(phi_power_forward(BitPoint(d2, 2, {}), w2).is_zero());

  // N = (2,1) fails the level-count bound, so f rejects what phi^ accepts.
  const BitPoint outside(IndexSet::plain(3), 2, {{0, 0}, {1, 0}, {2, 1}});
  CHECK_NOTHROW(phi_power_forward(outside, w2));
  CHECK_THROWS_AS(f_forward(outside, w2), DomainViolation);
}

TEST_CASE("f_section rebuilds rows and lands in L0 automatically") {
  const WeightFamily w2 = WeightFamily::standard(2);
  const GridVector t(IndexSet::plain(2), {{0, Dyadic(1, 1)}, {1, Dyadic(1, 2)}});
  const BitPoint lifted = f_section(t, 2, w2);
  CHECK(lifted == BitPoint(IndexSet::plain(2), 2, {{0, 0}, {1, 1}}));
  CHECK(count_vector(lifted) == CountVector({1, 1}));
  CHECK(k_membership(lifted, w2));
  CHECK(f_forward(lifted, w2) == t);

  CHECK(f_section(GridVector(IndexSet::plain(2), {}), 2, w2).bits().empty());

  // Boundary case: sum exactly 1 stays inside.
  const GridVector edge(IndexSet::plain(2), {{0, Dyadic(1, 1)}, {1, Dyadic(1, 1)}});
  const BitPoint edge_lift = f_section(edge, 2, w2);
  CHECK(count_vector(edge_lift) == CountVector({2, 0}));
  CHECK(k_membership(edge_lift, w2));

  CHECK_THROWS_AS(f_section(GridVector(IndexSet::plain(1), {{0, Dyadic(-1, 1)}}), 2, w2),
                  DomainViolation);

  Rng rng(0x5eed0203);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(8));
    const int d = 1 + static_cast<int>(rng.below(8));
    const WeightFamily w = WeightFamily::standard(d);
    std::vector<std::pair<int, Dyadic>> coords;
    std::int64_t budget = std::int64_t(1) << d;
    for (int g = 0; g < n && budget > 0; ++g) {
      std::int64_t k = static_cast<std::int64_t>(rng.below(
          static_cast<std::uint64_t>(budget + 1)));
      if (k == (std::int64_t(1) << d)) --k;  // magnitude-1 coordinates stay out of the domain
      budget -= k;
      if (k != 0) coords.emplace_back(g, Dyadic(k, d));
    }
    const GridVector target(IndexSet::plain(n), std::move(coords));
    const BitPoint lift = f_section(target, d, w);
    CHECK(k_membership(lift, w));
    CHECK(f_forward(lift, w) == target);
  }
}

TEST_CASE("union_map glues cap-1 parts") {
  const IndexSet is = IndexSet::plain(6);
  const std::vector<SigmaSet> parts = {SigmaSet::singleton(is, 0), SigmaSet::empty(is, 1),
                                       SigmaSet::singleton(is, 2)};
  const SigmaSet joined = union_map(parts);
  CHECK(joined == SigmaSet(is, 3, {0, 2}));

  const std::vector<SigmaSet> same = {SigmaSet::singleton(is, 5), SigmaSet::singleton(is, 5),
                                      SigmaSet::singleton(is, 5)};
  CHECK(union_map(same) == SigmaSet(is, 3, {5}));

  const std::vector<SigmaSet> empties(4, SigmaSet::empty(is, 1));
  CHECK(union_map(empties) == SigmaSet(is, 4, {}));

  // Every set with at most i members arises from distributing its members.
  for (int i = 2; i <= 4; ++i) {
    const SigmaSet s(is, i, {1, 3});
    CHECK(union_map(union_section(s, i)) == SigmaSet(is, i, {1, 3}));
  }
  CHECK_THROWS_AS(union_section(SigmaSet(is, 3, {0, 1, 2}), 2), DomainViolation);
}

TEST_CASE("g_forward reads the selected tuple entries") {
  const WeightFamily w1 = WeightFamily::standard(1);
  const IndexSet d3 = IndexSet::plain(3);
  BlockPoint e;
  e.counts = CountVector({2});
  e.blocks = {{SigmaSet::empty(d3, 0), SigmaSet::empty(d3, 1), SigmaSet(d3, 2, {0, 2})}};
  CHECK(g_forward(e, w1) == BitPoint(d3, 1, {{0, 0}, {2, 0}}));

  // All-zero counts select the constant empty sigma_0 factors.
  const WeightFamily w2 = WeightFamily::standard(2);
  BlockPoint zero;
  zero.counts = CountVector({0, 0});
  zero.blocks.resize(2);
  for (int m = 0; m < 2; ++m)
    for (std::int64_t i = 0; i <= w2.bound(m); ++i)
      zero.blocks[static_cast<std::size_t>(m)].push_back(
          SigmaSet::empty(d3, static_cast<int>(i)));
  CHECK(g_forward(zero, w2).bits().empty());

  BlockPoint ones = zero;
  ones.counts = CountVector({1, 1});
  ones.blocks[0][1] = SigmaSet::singleton(d3, 1);
  ones.blocks[1][1] = SigmaSet::singleton(d3, 1);
  CHECK(g_forward(ones, w2) == BitPoint(d3, 2, {{1, 0}, {1, 1}}));

  // Malformed tuples are rejected.
  BlockPoint bad = zero;
  bad.blocks[0].pop_back();
  CHECK_THROWS_AS(g_forward(bad, w2), DomainViolation);
}

TEST_CASE("g_section inverts g_forward on K(Z0)") {
  const WeightFamily w2 = WeightFamily::standard(2);
  const IndexSet d3 = IndexSet::plain(3);

  const BitPoint y(d3, 2, {{0, 0}, {2, 0}});
  const BlockPoint e = g_section(y, w2);
  CHECK(e.counts == CountVector({2, 0}));
  CHECK(e.blocks[0][2] == SigmaSet(d3, 2, {0, 2}));
  CHECK(g_forward(e, w2) == y);

  const BlockPoint zero = g_section(BitPoint(d3, 2, {}), w2);
  CHECK(zero.counts == CountVector({0, 0}));
  for (const auto& tuple : zero.blocks)
    for (const auto& s : tuple) CHECK(s.is_empty());

  const BitPoint single(d3, 2, {{1, 1}});
  const BlockPoint lifted = g_section(single, w2);
  CHECK(lifted.counts == CountVector({0, 1}));
  CHECK(lifted.blocks[1][1] == SigmaSet::singleton(d3, 1));
  CHECK(g_forward(lifted, w2) == single);

  CHECK_THROWS_AS(g_section(BitPoint(d3, 1, {{0, 0}, {1, 0}, {2, 0}}), WeightFamily::standard(1)),
                  DomainViolation);

  Rng rng(0x5eed0204);
  int members = 0;
  while (members < 10000) {
    const IndexSet is = IndexSet::plain(8);
    const BitPoint candidate = random_mixed_density_bit_point(is, 8, rng);
    const WeightFamily w8 = WeightFamily::standard(8);
    if (!k_membership(candidate, w8)) continue;
    ++members;
    const BlockPoint lift = g_section(candidate, w8);
    const BitPoint back = g_forward(lift, w8);
    CHECK(back == candidate);
    // g respects counts: N_m of the image never exceeds z(m).
    const CountVector image_counts = count_vector(back);
    for (int m = 0; m < 8; ++m) CHECK(image_counts.at(m) <= lift.counts.at(m));
  }
}

TEST_CASE("compose collapses the empty source to zero") {
  const ChainConfig config = ChainConfig::standard(2, 3);
  SourcePoint empty;
  empty.blocks.assign(static_cast<std::size_t>(config.total_blocks()),
                      SigmaSet::empty(config.gamma_doubled(), 1));
  CHECK(compose_forward(empty, config).is_zero());
}

TEST_CASE("compose_section round trips exhaustively up to gamma 2 depth 4") {
  for (int n = 1; n <= 2; ++n) {
    for (int d = 1; d <= 4; ++d) {
      const ChainConfig config = ChainConfig::standard(n, d);
      std::uint64_t visited = 0;
      for_each_grid_vector(config.gamma(), d, false, [&](const GridVector& t) {
        ++visited;
        const SourcePoint s = compose_section(t, config);
        CHECK(compose_forward(s, config) == t);
      });
      CHECK(visited == grid_count(config.gamma(), d, false));
    }
  }
}

TEST_CASE("decode and encode invert each other on the block product") {
  const ChainConfig config = ChainConfig::standard(3, 3);
  Rng rng(0x5eed020d);
  for (int trial = 0; trial < 2000; ++trial) {
    const BlockPoint e = decode_source(random_source(config, rng), config);
    CHECK(decode_source(encode_block_point(e, config), config) == e);
  }
  // Every count state is reachable through the z-decoding blocks.
  for (int index = 0; index < static_cast<int>(config.z_states().size()); ++index) {
    SourcePoint s;
    s.blocks.assign(static_cast<std::size_t>(config.total_blocks()),
                    SigmaSet::empty(config.gamma_doubled(), 1));
    for (int j = 0; j < config.z_block_count(); ++j)
      if ((index >> j) & 1)
        s.blocks[static_cast<std::size_t>(j)] = SigmaSet::singleton(config.gamma_doubled(), 0);
    CHECK(decode_source(s, config).counts ==
          config.z_states()[static_cast<std::size_t>(index)]);
  }
}

TEST_CASE("compose frozen examples") {
  const ChainConfig config = ChainConfig::standard(2, 3);
  const GridVector t(config.gamma(), {{0, Dyadic(1, 2)}, {1, Dyadic(-1, 2)}});
  CHECK(compose_forward(compose_section(t, config), config) == t);

  const GridVector zero(config.gamma(), {});
  const SourcePoint s0 = compose_section(zero, config);
  for (const auto& block : s0.blocks) CHECK(block.is_empty());
  CHECK(compose_forward(s0, config).is_zero());

  const GridVector boundary(config.gamma(), {{0, dyadic_int(1)}});
  CHECK_THROWS_WITH(compose_section(boundary, config),
                    Catch::Matchers::ContainsSubstring("phi") &&
                        Catch::Matchers::ContainsSubstring("unreachable"));
}

TEST_CASE("compose images always satisfy the ball bound") {
  const ChainConfig config = ChainConfig::standard(4, 5);
  Rng rng(0x5eed0205);
  for (int trial = 0; trial < 100000; ++trial) {
    const SourcePoint s = random_source(config, rng);
    const GridVector image = compose_forward(s, config);
    CHECK(b_membership(image, false));
  }
}

TEST_CASE("compose round trips on random targets at larger parameters") {
  for (const auto& [n, d] : std::vector<std::pair<int, int>>{{8, 5}, {4, 6}, {2, 4}}) {
    const ChainConfig config = ChainConfig::standard(n, d);
    Rng rng(derive_seed(0x5eed0206, static_cast<std::uint64_t>(n)));
    for (int trial = 0; trial < 4000; ++trial) {
      std::vector<std::pair<int, Dyadic>> coords;
      std::int64_t budget = (std::int64_t(1) << d) - 1;
      for (int g = 0; g < n && budget > 0; ++g) {
        const std::int64_t k = static_cast<std::int64_t>(rng.below(
            static_cast<std::uint64_t>(budget + 1)));
        budget -= k;
        if (k != 0) coords.emplace_back(g, Dyadic(rng.chance(0.5) ? k : -k, d));
      }
      const GridVector t(config.gamma(), std::move(coords));
      CHECK(compose_forward(compose_section(t, config), config) == t);
    }
  }
}

TEST_CASE("membership chain equivalence, exhaustive then randomized") {
  // Exhaustive over every bit point with |set| <= 3, depth <= 4.
  for (int n = 1; n <= 3; ++n) {
    for (int d = 1; d <= 4; ++d) {
      const IndexSet is = IndexSet::plain(n);
      const WeightFamily w = WeightFamily::standard(d);
      const int cells = n * d;
      for (std::uint32_t mask = 0; mask < (1u << cells); ++mask) {
        std::vector<std::pair<int, int>> bits;
        for (int c = 0; c < cells; ++c)
          if (mask & (1u << c)) bits.emplace_back(c / d, c % d);
        const BitPoint x(is, d, std::move(bits));
        CHECK(k_membership(x, w) == b_membership(phi_power_forward(x, w), true));
      }
    }
  }
  // Randomized at |set| = 8, depth = 8.
  const IndexSet is = IndexSet::plain(8);
  const WeightFamily w = WeightFamily::standard(8);
  Rng rng(0x5eed0207);
  for (int trial = 0; trial < 20000; ++trial) {
    const BitPoint x = random_mixed_density_bit_point(is, 8, rng);
    CHECK(k_membership(x, w) == b_membership(phi_power_forward(x, w), true));
  }
}

TEST_CASE("phi outputs agree to 2^-d' when inputs agree on the first d' levels") {
  const int d = 8;
  const WeightFamily w = WeightFamily::standard(d);
  Rng rng(0x5eed0208);
  for (int trial = 0; trial < 10000; ++trial) {
    const int agree = static_cast<int>(rng.below(d + 1));
    std::vector<int> a(d), b(d);
    for (int n = 0; n < d; ++n) {
      a[static_cast<std::size_t>(n)] = rng.chance(0.5) ? 1 : 0;
      b[static_cast<std::size_t>(n)] =
          n < agree ? a[static_cast<std::size_t>(n)] : (rng.chance(0.5) ? 1 : 0);
    }
    const Dyadic gap = abs(phi_forward(a, w) - phi_forward(b, w));
    CHECK(!(Dyadic::half_power(agree) < gap));
  }
}

TEST_CASE("locality: psi outputs depend on their two slots only") {
  Rng rng(0x5eed0209);
  const IndexSet doubled = IndexSet::paired(4);
  for (int trial = 0; trial < 4000; ++trial) {
    // Random positive point with slack so single-coordinate growth stays legal.
    std::vector<std::pair<int, Dyadic>> coords;
    std::int64_t budget = 7;  // of 16 sixteenths
    for (int i = 0; i < doubled.size && budget > 0; ++i) {
      const std::int64_t k = static_cast<std::int64_t>(rng.below(
          static_cast<std::uint64_t>(budget / 2 + 1)));
      budget -= k;
      if (k != 0) coords.emplace_back(i, Dyadic(k, 4));
    }
    const GridVector x(doubled, coords);
    const int gamma = static_cast<int>(rng.below(4));
    const auto deps = psi_dependencies(gamma, doubled);
    int outside = static_cast<int>(rng.below(static_cast<std::uint64_t>(doubled.size)));
    while (std::find(deps.begin(), deps.end(), outside) != deps.end())
      outside = static_cast<int>(rng.below(static_cast<std::uint64_t>(doubled.size)));
    // Replace the outside coordinate with a fresh small value.
    std::vector<std::pair<int, Dyadic>> perturbed;
    for (const auto& [i, v] : x.coords())
      if (i != outside) perturbed.emplace_back(i, v);
    const Dyadic fresh(static_cast<std::int64_t>(rng.below(3)), 4);
    if (!fresh.is_zero()) perturbed.emplace_back(outside, fresh);
    const GridVector y(doubled, std::move(perturbed));
    CHECK(psi_forward(x).at(gamma) == psi_forward(y).at(gamma));
  }
}

TEST_CASE("locality: phi_power outputs depend on their row only") {
  const IndexSet is = IndexSet::plain(5);
  const int d = 6;
  const WeightFamily w = WeightFamily::standard(d);
  Rng rng(0x5eed020a);
  for (int trial = 0; trial < 4000; ++trial) {
    const BitPoint x = random_mixed_density_bit_point(is, d, rng);
    const int gamma = static_cast<int>(rng.below(5));
    int other = static_cast<int>(rng.below(5));
    while (other == gamma) other = static_cast<int>(rng.below(5));
    const int level = static_cast<int>(rng.below(d));
    // Flip one bit outside row gamma.
    std::vector<std::pair<int, int>> bits = x.bits();
    const std::pair<int, int> target{other, level};
    const auto it = std::find(bits.begin(), bits.end(), target);
    if (it != bits.end())
      bits.erase(it);
    else
      bits.push_back(target);
    const BitPoint y(is, d, std::move(bits));
    CHECK(phi_power_forward(x, w).at(gamma) == phi_power_forward(y, w).at(gamma));
  }
}

TEST_CASE("locality: g outputs depend on their level and index only") {
  const IndexSet is = IndexSet::plain(4);
  const int d = 3;
  const WeightFamily w = WeightFamily::standard(d);
  Rng rng(0x5eed020b);
  for (int trial = 0; trial < 4000; ++trial) {
    BitPoint y = random_mixed_density_bit_point(is, d, rng);
    if (!k_membership(y, w)) continue;
    const BlockPoint e = g_section(y, w);
    const int gamma = static_cast<int>(rng.below(4));
    const int level = static_cast<int>(rng.below(d));
    const auto deps = g_dependencies(gamma, level, w);
    const bool before = g_forward(e, w).bit(gamma, level);

    BlockPoint perturbed = e;
    if (rng.chance(0.3)) {
      // Shrink a count at some other level; Z0 is downward closed.
      const int m = (level + 1 + static_cast<int>(rng.below(
                        static_cast<std::uint64_t>(d - 1)))) % d;
      if (perturbed.counts.entries[static_cast<std::size_t>(m)] == 0) continue;
      perturbed.counts.entries[static_cast<std::size_t>(m)] -= 1;
      CHECK(std::find(deps.begin(), deps.end(), GInputCoord{true, m, 0, 0}) == deps.end());
    } else {
      // Flip a tuple bit outside the dependency set.
      const int m = static_cast<int>(rng.below(d));
      const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(w.bound(m) + 1)));
      int idx = static_cast<int>(rng.below(4));
      if (m == level) {
        while (idx == gamma) idx = static_cast<int>(rng.below(4));
      }
      if (i == 0) continue;  // the sigma_0 factor has no free bits
      CHECK(std::find(deps.begin(), deps.end(), GInputCoord{false, m, i, idx}) == deps.end());
      SigmaSet& cell = perturbed.blocks[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)];
      std::vector<int> members = cell.members();
      const auto pos = std::find(members.begin(), members.end(), idx);
      if (pos != members.end())
        members.erase(pos);
      else if (static_cast<int>(members.size()) < i)
        members.push_back(idx);
      else
        continue;
      cell = SigmaSet(is, i, std::move(members));
    }
    CHECK(g_forward(perturbed, w).bit(gamma, level) == before);
  }
}

TEST_CASE("locality: compose outputs ignore foreign factor-block slots") {
  const ChainConfig config = ChainConfig::standard(2, 3);
  Rng rng(0x5eed020c);
  for (int trial = 0; trial < 2000; ++trial) {
    const SourcePoint s = random_source(config, rng);
    const int gamma = static_cast<int>(rng.below(2));
    const auto deps = compose_dependencies(gamma, config);
    const Dyadic before = compose_forward(s, config).at(gamma);

    // Pick a factor block and a slot outside {pair_a, pair_b} of gamma.
    const int block = config.z_block_count() +
                      static_cast<int>(rng.below(static_cast<std::uint64_t>(
                          config.total_blocks() - config.z_block_count())));
    int slot = static_cast<int>(rng.below(static_cast<std::uint64_t>(
        config.gamma_doubled().size)));
    while (slot == pair_a(gamma) || slot == pair_b(gamma))
      slot = static_cast<int>(rng.below(static_cast<std::uint64_t>(
          config.gamma_doubled().size)));
    CHECK(std::find(deps.begin(), deps.end(), SourceBitCoord{block, slot}) == deps.end());

    // Flip that slot when the cap-1 block allows a single-bit change.
    SourcePoint perturbed = s;
    SigmaSet& cell = perturbed.blocks[static_cast<std::size_t>(block)];
    if (cell.is_empty())
      cell = SigmaSet::singleton(config.gamma_doubled(), slot);
    else if (cell.contains(slot))
      cell = SigmaSet::empty(config.gamma_doubled(), 1);
    else
      continue;
    CHECK(compose_forward(perturbed, config).at(gamma) == before);
  }
}

TEST_CASE("locality reports reject unknown coordinates") {
  const ChainConfig config = ChainConfig::standard(2, 3);
  CHECK_THROWS_AS(psi_dependencies(5, config.gamma_doubled()), DomainViolation);
  CHECK_THROWS_AS(compose_dependencies(7, config), DomainViolation);
  CHECK_THROWS_AS(g_dependencies(0, 9, config.weights()), DomainViolation);
  CHECK(phi_power_dependencies(1, 3).size() == 3);
}
