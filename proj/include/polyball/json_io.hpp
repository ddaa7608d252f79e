#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "polyball/maps.hpp"
#include "polyball/model.hpp"
#include "polyball/norms.hpp"

namespace polyball {

using json = nlohmann::ordered_json;

// Wire formats. Exact rationals always travel as {"num", "exp"} pairs, never
// as decimal floats; supports travel as sparse lists.

inline json to_json(const Dyadic& d) { return json{{"num", d.num()}, {"exp", d.exp()}}; }

inline Dyadic checked_dyadic(std::int64_t num, int exp) {
  try {
    return Dyadic(num, exp);
  } catch (const std::overflow_error& e) {
    throw DomainViolation(std::string("json: ") + e.what());
  }
}

inline Dyadic dyadic_from_json(const json& j) {
  if (!j.is_object() || !j.contains("num") || !j.contains("exp"))
    throw DomainViolation("json: dyadic needs {num, exp}");
  return checked_dyadic(j.at("num").get<std::int64_t>(), j.at("exp").get<int>());
}

inline json to_json(const IndexSet& is) {
  return json{{"size", is.size}, {"doubled", is.doubled}};
}

inline IndexSet index_set_from_json(const json& j) {
  return IndexSet(j.at("size").get<int>(), j.value("doubled", false));
}

inline json to_json(const GridVector& v) {
  json coords = json::array();
  for (const auto& [gamma, value] : v.coords())
    coords.push_back(json{{"gamma", gamma}, {"num", value.num()}, {"exp", value.exp()}});
  json out = to_json(v.index_set());
  out["coords"] = std::move(coords);
  return out;
}

inline GridVector grid_vector_from_json(const json& j) {
  std::vector<std::pair<int, Dyadic>> coords;
  for (const auto& c : j.value("coords", json::array()))
    coords.emplace_back(c.at("gamma").get<int>(),
                        checked_dyadic(c.at("num").get<std::int64_t>(), c.at("exp").get<int>()));
  return GridVector(index_set_from_json(j), std::move(coords));
}

inline json to_json(const BitPoint& x) {
  json bits = json::array();
  for (const auto& [gamma, level] : x.bits()) bits.push_back(json::array({gamma, level}));
  json out = to_json(x.index_set());
  out["depth"] = x.depth();
  out["bits"] = std::move(bits);
  return out;
}

inline BitPoint bit_point_from_json(const json& j) {
  std::vector<std::pair<int, int>> bits;
  for (const auto& b : j.value("bits", json::array())) {
    if (!b.is_array() || b.size() != 2) throw DomainViolation("json: bits are [gamma, level] pairs");
    bits.emplace_back(b.at(0).get<int>(), b.at(1).get<int>());
  }
  return BitPoint(index_set_from_json(j), j.at("depth").get<int>(), std::move(bits));
}

inline json to_json(const SigmaSet& s) {
  json out = to_json(s.index_set());
  out["cap"] = s.cap();
  out["members"] = s.members();
  return out;
}

inline SigmaSet sigma_set_from_json(const json& j) {
  return SigmaSet(index_set_from_json(j), j.at("cap").get<int>(),
                  j.value("members", std::vector<int>{}));
}

inline json to_json(const SourcePoint& s, const IndexSet& index_set) {
  json blocks = json::array();
  for (const auto& block : s.blocks) blocks.push_back(block.members());
  json out = to_json(index_set);
  out["blocks"] = std::move(blocks);
  return out;
}

inline SourcePoint source_point_from_json(const json& j) {
  const IndexSet is = index_set_from_json(j);
  SourcePoint s;
  for (const auto& b : j.value("blocks", json::array()))
    s.blocks.push_back(SigmaSet(is, 1, b.get<std::vector<int>>()));
  return s;
}

inline json to_json(const BlockPoint& e, const IndexSet& index_set) {
  json blocks = json::array();
  for (const auto& tuple : e.blocks) {
    json row = json::array();
    for (const auto& s : tuple) row.push_back(s.members());
    blocks.push_back(std::move(row));
  }
  json out = to_json(index_set);
  out["counts"] = e.counts.entries;
  out["blocks"] = std::move(blocks);
  return out;
}

inline BlockPoint block_point_from_json(const json& j) {
  const IndexSet is = index_set_from_json(j);
  BlockPoint e;
  e.counts = CountVector(j.at("counts").get<std::vector<std::int64_t>>());
  for (const auto& row : j.value("blocks", json::array())) {
    std::vector<SigmaSet> tuple;
    for (std::size_t i = 0; i < row.size(); ++i)
      tuple.push_back(SigmaSet(is, static_cast<int>(i), row.at(i).get<std::vector<int>>()));
    e.blocks.push_back(std::move(tuple));
  }
  return e;
}

inline json to_json(const SparseVector& v) {
  json out = json::array();
  for (const auto& [index, value] : v) out.push_back(json::array({index, value}));
  return out;
}

inline SparseVector sparse_vector_from_json(const json& j) {
  std::vector<std::pair<int, double>> entries;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2)
      throw DomainViolation("json: sparse entries are [index, value] pairs");
    entries.emplace_back(e.at(0).get<int>(), e.at(1).get<double>());
  }
  return make_sparse(std::move(entries));
}

inline json to_json(const PairVector& v) {
  return json{{"x", to_json(v.x)}, {"y", to_json(v.y)}};
}

inline PairVector pair_vector_from_json(const json& j) {
  return PairVector{sparse_vector_from_json(j.value("x", json::array())),
                    sparse_vector_from_json(j.value("y", json::array()))};
}

inline json to_json(const SierpinskiGraph& g) {
  return json{{"n", g.size()}, {"phi_values", g.values()}};
}

inline SierpinskiGraph graph_from_json(const json& j) {
  auto values = j.at("phi_values").get<std::vector<double>>();
  if (j.contains("n") && j.at("n").get<int>() != static_cast<int>(values.size()))
    throw DomainViolation("json: graph n disagrees with phi_values length");
  return SierpinskiGraph(std::move(values));
}

}  // namespace polyball
