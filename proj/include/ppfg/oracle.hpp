#pragma once

#include <cstddef>
#include <vector>

#include "ppfg/clumping.hpp"
#include "ppfg/forest.hpp"
#include "ppfg/graph.hpp"
#include "ppfg/pointgen.hpp"

// Slow reference implementations. They share only the metric with the
// production code and are meant for small inputs.
namespace ppfg::oracle {

/// clump_of[k-1][id], labels numbered by first appearance. Points are joined
/// when no cutter of level >= k has exactly one of them inside (key <= r_k key),
/// closed transitively.
[[nodiscard]] std::vector<std::vector<int>> hierarchy(const PointConfiguration& cfg, const ClumpingParams& params);

/// Relabels a partition by first appearance; equal partitions give equal vectors.
[[nodiscard]] std::vector<int> canonical_labels(const std::vector<int>& labels);

/// Leader election and star construction, recursing from the top-level clumps down.
[[nodiscard]] FactorGraph one_ended_tree(const PointConfiguration& cfg, const ClumpHierarchy& h,
                                         LeaderPool pool = LeaderPool::FullConfiguration);

/// DFS with an explicit stack of vertices; children pushed farthest first.
[[nodiscard]] std::vector<PointId> dfs(const FactorGraph& tree, const PointConfiguration& cfg, PointId root);

struct MnnOutcome {
  Matching matching;
  std::vector<int> round_of;
  int rounds = 0;
};

/// Rounds recomputed from scratch with full scans.
[[nodiscard]] MnnOutcome mnn(const PointConfiguration& cfg);

/// Repeatedly matches the closest unmatched pair of each clump, level by level, by full scans.
[[nodiscard]] Matching clump_greedy(const PointConfiguration& cfg, const ClumpHierarchy& h);

inline constexpr std::size_t kChainOracleLimit = 10;

/// Longest descending chain over all sequences of distinct points (n <= 10).
[[nodiscard]] std::size_t longest_chain(const PointConfiguration& cfg);

}  // namespace ppfg::oracle
