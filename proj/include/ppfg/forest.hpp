#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "ppfg/clumping.hpp"
#include "ppfg/graph.hpp"
#include "ppfg/pointgen.hpp"

namespace ppfg {

class NeighborIndex;

/// Where the nearest-third-point distance is measured when electing a leader.
enum class LeaderPool {
  FullConfiguration,  // every point except the closest pair
  LeaderSet,          // only the candidates being elected from
};

[[nodiscard]] std::string_view to_string(LeaderPool pool);
[[nodiscard]] LeaderPool parse_leader_pool(std::string_view text);

/// Closest pair among `ids` (size >= 2) under the PairOrder total order.
[[nodiscard]] std::pair<PointId, PointId> closest_pair(const PointConfiguration& cfg, std::span<const PointId> ids,
                                                       Degeneracy* degeneracy = nullptr);

/// Leader election: take the closest pair of candidates, then the one of the
/// two that is nearer to its nearest point outside the pair.
class LeaderElection {
 public:
  explicit LeaderElection(const PointConfiguration& cfg, LeaderPool pool = LeaderPool::FullConfiguration);
  ~LeaderElection();
  LeaderElection(const LeaderElection&) = delete;
  LeaderElection& operator=(const LeaderElection&) = delete;

  [[nodiscard]] PointId elect(std::span<const PointId> members);
  [[nodiscard]] const Degeneracy& degeneracy() const { return degeneracy_; }

 private:
  const PointConfiguration& cfg_;
  LeaderPool pool_;
  std::unique_ptr<NeighborIndex> index_;
  Degeneracy degeneracy_;
};

[[nodiscard]] PointId elect_leader(const PointConfiguration& cfg, std::span<const PointId> members,
                                   Degeneracy* degeneracy = nullptr,
                                   LeaderPool pool = LeaderPool::FullConfiguration);

struct OneEndedTree {
  FactorGraph graph;
  /// leaders[k-1][c]: leader of clump c of level k.
  std::vector<std::vector<PointId>> leaders;
  /// Leaders of the top-level clumps; one per tree component.
  std::vector<PointId> top_leaders;
  Degeneracy degeneracy;

  [[nodiscard]] PointId root() const { return top_leaders.empty() ? -1 : top_leaders.front(); }
};

/// Star each level-1 clump on its leader, then at every higher level star
/// the sub-clump leaders of each clump on the leader elected among them.
[[nodiscard]] OneEndedTree build_one_ended_tree(const PointConfiguration& cfg, const ClumpHierarchy& h,
                                                LeaderPool pool = LeaderPool::FullConfiguration);

/// Depth-first preorder from `root`; children are visited by ascending
/// distance to their parent. Remaining components follow, each rooted at
/// its smallest id, in ascending order of that id.
[[nodiscard]] Ordering dfs_order(const FactorGraph& tree, const PointConfiguration& cfg, PointId root,
                                 Degeneracy* degeneracy = nullptr);

enum class MsfMethod { Auto, AllPairs, GridCandidates };

inline constexpr std::size_t kAllPairsMsfLimit = 5000;

/// Metric minimum spanning tree of the complete graph (the minimal spanning
/// forest of a finite window).
[[nodiscard]] FactorGraph minimal_spanning_forest(const PointConfiguration& cfg, MsfMethod method = MsfMethod::Auto,
                                                  Degeneracy* degeneracy = nullptr);

inline constexpr std::size_t kCycleOracleLimit = 12;

/// Keeps edge (x, y) iff no x-y path uses only edges strictly earlier in
/// PairOrder, i.e. deletes every edge that is the longest in some cycle.
[[nodiscard]] FactorGraph msf_cycle_oracle(const PointConfiguration& cfg, Degeneracy* degeneracy = nullptr);

struct ClumpMatching {
  Matching matching;
  /// Level at which each point was matched; 0 when unmatched.
  std::vector<int> formation_level;
  Degeneracy degeneracy;
};

/// Greedy closest-pair matching of `ids`, written into `m`.
void greedy_closest_pair_matching(const PointConfiguration& cfg, std::span<const PointId> ids, Matching& m,
                                  Degeneracy* degeneracy = nullptr);

/// Level-by-level greedy matching: inside every clump of level k the points
/// still unmatched are matched greedily by increasing distance.
[[nodiscard]] ClumpMatching clump_greedy_matching(const PointConfiguration& cfg, const ClumpHierarchy& h);

}  // namespace ppfg
