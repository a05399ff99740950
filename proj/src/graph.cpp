#include "ppfg/graph.hpp"

#include <algorithm>
#include <string>

namespace ppfg {

void FactorGraph::add_edge(PointId u, PointId v) {
  if (!directed && v < u) std::swap(u, v);
  edges.emplace_back(u, v);
}

void FactorGraph::normalize() {
  if (!directed) {
    for (auto& e : edges) {
      if (e.second < e.first) std::swap(e.first, e.second);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

void FactorGraph::validate() const {
  const auto limit = static_cast<PointId>(n);
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= limit || v >= limit) {
      throw ContractViolation("edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
    }
    if (u == v) throw ContractViolation("self-loop at " + std::to_string(u));
    if (!directed && u > v) throw ContractViolation("undirected edge stored with larger id first");
  }
  auto sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ContractViolation("duplicate edge");
  }
}

FactorGraph Ordering::path_graph() const {
  FactorGraph g;
  g.n = ids.size();
  for (std::size_t i = 1; i < ids.size(); ++i) g.add_edge(ids[i - 1], ids[i]);
  return g;
}

void Matching::match(PointId a, PointId b) {
  if (a == b) throw ContractViolation("a point cannot be matched to itself");
  if (is_matched(a) || is_matched(b)) throw ContractViolation("point already matched");
  partner[static_cast<std::size_t>(a)] = b;
  partner[static_cast<std::size_t>(b)] = a;
}

std::size_t Matching::unmatched() const {
  return static_cast<std::size_t>(std::count(partner.begin(), partner.end(), std::nullopt));
}

std::vector<Edge> Matching::pairs() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < partner.size(); ++i) {
    if (partner[i] && static_cast<PointId>(i) < *partner[i]) out.emplace_back(static_cast<PointId>(i), *partner[i]);
  }
  return out;
}

}  // namespace ppfg
