#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ppfg/metric.hpp"

namespace ppfg {

using Edge = std::pair<PointId, PointId>;

/// Edge list over point ids. Undirected edges are stored once, smaller id
/// first; `normalize` sorts and removes duplicates.
struct FactorGraph {
  std::size_t n = 0;
  std::vector<Edge> edges;
  bool directed = false;

  void add_edge(PointId u, PointId v);
  void normalize();
  /// Throws ContractViolation on out-of-range endpoints, self-loops or duplicates.
  void validate() const;

  friend bool operator==(const FactorGraph&, const FactorGraph&) = default;
};

/// A linear order of point ids.
struct Ordering {
  std::vector<PointId> ids;
  std::size_t components = 0;  // trees traversed; more than one means the input was a forest

  [[nodiscard]] bool disconnected() const { return components > 1; }
  /// Undirected path through consecutive ids.
  [[nodiscard]] FactorGraph path_graph() const;
};

struct Matching {
  std::vector<std::optional<PointId>> partner;

  static Matching empty(std::size_t n) { return Matching{std::vector<std::optional<PointId>>(n)}; }
  [[nodiscard]] bool is_matched(PointId id) const { return partner[static_cast<std::size_t>(id)].has_value(); }
  void match(PointId a, PointId b);
  [[nodiscard]] std::size_t unmatched() const;
  /// Matched pairs (smaller id first), ascending.
  [[nodiscard]] std::vector<Edge> pairs() const;

  friend bool operator==(const Matching&, const Matching&) = default;
};

}  // namespace ppfg
