#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "ppfg/graph.hpp"
#include "ppfg/pointgen.hpp"

namespace ppfg {

/// Outcome of repeatedly matching all mutually closest pairs.
struct MnnResult {
  Matching matching;
  /// Round in which each point was matched; 0 for unmatched or not in the subset.
  std::vector<int> round_of;
  /// Points never matched (the leftover process N), ascending.
  std::vector<PointId> leftover;
  int rounds = 0;
  /// Smallest key among active pairs at the start of each round.
  std::vector<double> round_min_key;
  Degeneracy degeneracy;

  /// Growing-ball annihilation time of a matched point: half its matched distance.
  [[nodiscard]] double annihilation_time(const PointConfiguration& cfg, PointId id) const;
};

/// Pairs (x, y), x < y, of `active` points that are each other's nearest
/// active point. Ascending by x.
[[nodiscard]] std::vector<Edge> mutually_closest_pairs(const PointConfiguration& cfg, std::span<const PointId> active,
                                                       Degeneracy* degeneracy = nullptr);

[[nodiscard]] MnnResult iterated_mnn_matching(const PointConfiguration& cfg);
/// Runs the rounds on a subset only; points outside it are ignored.
[[nodiscard]] MnnResult iterated_mnn_matching(const PointConfiguration& cfg, std::span<const PointId> subset);

struct NearestNeighborDigraph {
  FactorGraph graph;              // directed, out-degree 1 per subset member
  std::vector<Edge> two_cycles;   // mutually closest pairs within the subset
};

/// Directed edge from each subset point to its nearest subset point.
[[nodiscard]] NearestNeighborDigraph nearest_neighbor_digraph(const PointConfiguration& cfg,
                                                              std::span<const PointId> subset,
                                                              Degeneracy* degeneracy = nullptr);

/// True when no active point other than x, y lies within distance |x-y| of x or of y.
/// For distinct distances this holds exactly when x, y are mutually closest.
[[nodiscard]] bool mutual_region_empty(const PointConfiguration& cfg, std::span<const PointId> active, PointId x,
                                       PointId y);

struct ChainReport {
  /// A descending chain of distinct points; consecutive distances strictly decrease.
  std::vector<PointId> longest;
  std::size_t length = 0;  // steps, longest.size() - 1 (0 when empty)
  /// Number of points whose longest descending walk over the searched pairs has the given step count.
  std::map<std::size_t, std::size_t> histogram;
  /// Set when the pair cap or the search budget may have hidden a longer chain.
  bool lower_bound = false;
};

inline constexpr std::size_t kDefaultPairCap = 32;
inline constexpr std::size_t kExhaustiveChainLimit = 2000;

/// Longest descending chain over each point's `pair_cap` nearest neighbors
/// (pair_cap = 0 searches all pairs; allowed for n <= 2000).
[[nodiscard]] ChainReport find_descending_chains(const PointConfiguration& cfg,
                                                 std::size_t pair_cap = kDefaultPairCap);

}  // namespace ppfg
