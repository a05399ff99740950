#include "ppfg/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ppfg/mnn.hpp"
#include "ppfg/spatial_index.hpp"

namespace ppfg {

namespace {

constexpr std::size_t kBruteClosestPairLimit = 256;
constexpr std::size_t kSortedGreedyLimit = 2048;

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<int> rank_;
};

std::vector<std::vector<PointId>> adjacency(const FactorGraph& g) {
  std::vector<std::vector<PointId>> adj(g.n);
  for (const auto& [u, v] : g.edges) {
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }
  return adj;
}

}  // namespace

std::string_view to_string(LeaderPool pool) {
  return pool == LeaderPool::FullConfiguration ? "full" : "leaders";
}

LeaderPool parse_leader_pool(std::string_view text) {
  if (text == "full") return LeaderPool::FullConfiguration;
  if (text == "leaders") return LeaderPool::LeaderSet;
  throw ContractViolation("unknown leader pool '" + std::string(text) + "' (expected full or leaders)");
}

std::pair<PointId, PointId> closest_pair(const PointConfiguration& cfg, std::span<const PointId> ids,
                                         Degeneracy* degeneracy) {
  if (ids.size() < 2) throw ContractViolation("closest_pair needs at least two points");
  PairOrder best{std::numeric_limits<double>::infinity(), 0, 0};
  bool tied = false;
  auto offer = [&](const PairOrder& cand) {
    if (cand.key == best.key && !(cand.lo == best.lo && cand.hi == best.hi)) tied = true;
    if (cand < best) {
      if (cand.key < best.key) tied = false;
      best = cand;
    }
  };
  if (ids.size() <= kBruteClosestPairLimit) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size(); ++j) offer(cfg.pair_order(ids[i], ids[j]));
    }
  } else {
    const NeighborIndex index(cfg, ids);
    for (PointId id : ids) {
      for (const Neighbor& nb : index.k_nearest(id, 2)) offer(PairOrder::make(nb.key, id, nb.id));
    }
  }
  if (tied && degeneracy) ++degeneracy->distance_ties;
  return {best.lo, best.hi};
}

LeaderElection::LeaderElection(const PointConfiguration& cfg, LeaderPool pool) : cfg_(cfg), pool_(pool) {
  if (pool_ == LeaderPool::FullConfiguration) index_ = std::make_unique<NeighborIndex>(cfg);
}

LeaderElection::~LeaderElection() = default;

PointId LeaderElection::elect(std::span<const PointId> members) {
  if (members.empty()) throw ContractViolation("cannot elect a leader of an empty clump");
  if (members.size() == 1) return members.front();
  const auto [a, b] = closest_pair(cfg_, members, &degeneracy_);

  auto third = [&](PointId x, PointId other) -> std::optional<double> {
    if (pool_ == LeaderPool::FullConfiguration) {
      auto nb = index_->nearest(x, [other](PointId id) { return id == other; });
      if (!nb) return std::nullopt;
      return nb->key;
    }
    std::optional<double> best;
    for (PointId y : members) {
      if (y == x || y == other) continue;
      const double k = cfg_.key(x, y);
      if (!best || k < *best) best = k;
    }
    return best;
  };
  const auto da = third(a, b);
  const auto db = third(b, a);
  if (!da || !db) {
    ++degeneracy_.leader_fallbacks;
    return std::min(a, b);
  }
  if (*da == *db) {
    ++degeneracy_.distance_ties;
    return std::min(a, b);
  }
  return *da < *db ? a : b;
}

PointId elect_leader(const PointConfiguration& cfg, std::span<const PointId> members, Degeneracy* degeneracy,
                     LeaderPool pool) {
  LeaderElection election(cfg, pool);
  const PointId leader = election.elect(members);
  if (degeneracy) *degeneracy += election.degeneracy();
  return leader;
}

OneEndedTree build_one_ended_tree(const PointConfiguration& cfg, const ClumpHierarchy& h, LeaderPool pool) {
  OneEndedTree tree;
  tree.graph.n = cfg.size();
  if (cfg.empty()) return tree;
  if (h.point_count() != cfg.size()) throw ContractViolation("hierarchy does not cover the configuration");

  LeaderElection election(cfg, pool);
  tree.leaders.resize(static_cast<std::size_t>(h.k_max));
  for (int k = 1; k <= h.k_max; ++k) {
    const auto lk = static_cast<std::size_t>(k - 1);
    const auto count = static_cast<std::size_t>(h.clump_count[lk]);
    std::vector<std::vector<PointId>> candidates(count);
    if (k == 1) {
      candidates = h.clumps(1);
    } else {
      // every level-(k-1) clump lies inside one level-k clump; its leader is a member
      for (PointId leader : tree.leaders[lk - 1]) {
        candidates[static_cast<std::size_t>(h.level(k)[static_cast<std::size_t>(leader)])].push_back(leader);
      }
    }
    auto& leaders = tree.leaders[lk];
    leaders.resize(count);
    for (std::size_t c = 0; c < count; ++c) {
      std::sort(candidates[c].begin(), candidates[c].end());
      const PointId x = election.elect(candidates[c]);
      leaders[c] = x;
      for (PointId y : candidates[c]) {
        if (y != x) tree.graph.add_edge(x, y);
      }
    }
  }
  tree.top_leaders = tree.leaders.back();
  tree.graph.normalize();
  tree.degeneracy = election.degeneracy();
  return tree;
}

Ordering dfs_order(const FactorGraph& tree, const PointConfiguration& cfg, PointId root, Degeneracy* degeneracy) {
  const std::size_t n = tree.n;
  Ordering order;
  if (n == 0) return order;
  if (root < 0 || static_cast<std::size_t>(root) >= n) throw ContractViolation("dfs root out of range");
  const auto adj = adjacency(tree);
  std::vector<char> seen(n, 0);
  order.ids.reserve(n);

  struct Frame {
    PointId v;
    std::vector<PointId> children;
    std::size_t next = 0;
  };
  auto children_of = [&](PointId v) {
    std::vector<std::pair<double, PointId>> kids;
    for (PointId c : adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(c)]) kids.emplace_back(cfg.key(v, c), c);
    }
    std::sort(kids.begin(), kids.end());
    for (std::size_t i = 1; i < kids.size(); ++i) {
      if (kids[i].first == kids[i - 1].first && degeneracy) ++degeneracy->distance_ties;
    }
    std::vector<PointId> out;
    out.reserve(kids.size());
    for (const auto& kc : kids) out.push_back(kc.second);
    return out;
  };
  auto traverse = [&](PointId start) {
    ++order.components;
    std::vector<Frame> stack;
    seen[static_cast<std::size_t>(start)] = 1;
    order.ids.push_back(start);
    stack.push_back({start, children_of(start)});
    while (!stack.empty()) {
      Frame& top = stack.back();
      if (top.next == top.children.size()) {
        stack.pop_back();
        continue;
      }
      const PointId c = top.children[top.next++];
      if (seen[static_cast<std::size_t>(c)]) continue;
      seen[static_cast<std::size_t>(c)] = 1;
      order.ids.push_back(c);
      stack.push_back({c, children_of(c)});
    }
  };

  traverse(root);
  for (std::size_t v = 0; v < n; ++v) {
    if (!seen[v]) traverse(static_cast<PointId>(v));
  }
  return order;
}

namespace {

FactorGraph prim_all_pairs(const PointConfiguration& cfg, Degeneracy& deg) {
  const std::size_t n = cfg.size();
  FactorGraph g;
  g.n = n;
  if (n < 2) return g;
  const PairOrder none{std::numeric_limits<double>::infinity(), 0, 0};
  std::vector<PairOrder> best(n, none);
  std::vector<char> in_tree(n, 0);
  std::size_t current = 0;
  in_tree[0] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t pick = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const auto cand = cfg.pair_order(static_cast<PointId>(current), static_cast<PointId>(v));
      if (cand.key == best[v].key) ++deg.distance_ties;
      if (cand < best[v]) best[v] = cand;
      if (pick != n && best[v].key == best[pick].key) ++deg.distance_ties;
      if (pick == n || best[v] < best[pick]) pick = v;
    }
    in_tree[pick] = 1;
    g.add_edge(best[pick].lo, best[pick].hi);
    current = pick;
  }
  g.normalize();
  return g;
}

FactorGraph kruskal_grid(const PointConfiguration& cfg, Degeneracy& deg) {
  const std::size_t n = cfg.size();
  FactorGraph g;
  g.n = n;
  if (n < 2) return g;
  const NeighborIndex index(cfg);
  const MetricWindow& w = cfg.window();
  double radius = 2.0 * std::pow(w.volume() / static_cast<double>(n), 1.0 / w.dimension());
  // The radius-r graph is connected iff it already contains every MST edge
  // (cut property), so its MST is the MST.
  for (;;) {
    std::vector<PairOrder> cand;
    const double rk = w.key_for_radius(radius);
    for (PointId i = 0; i < static_cast<PointId>(n); ++i) {
      for (const Neighbor& nb : index.within(cfg[i], rk)) {
        if (i < nb.id) cand.push_back(PairOrder{nb.key, i, nb.id});
      }
    }
    std::sort(cand.begin(), cand.end());
    DisjointSets sets(n);
    std::vector<Edge> edges;
    for (std::size_t t = 0; t < cand.size(); ++t) {
      if (t > 0 && cand[t].key == cand[t - 1].key) ++deg.distance_ties;
      if (sets.unite(static_cast<std::size_t>(cand[t].lo), static_cast<std::size_t>(cand[t].hi))) {
        edges.emplace_back(cand[t].lo, cand[t].hi);
      }
    }
    if (edges.size() + 1 == n) {
      g.edges = std::move(edges);
      g.normalize();
      return g;
    }
    radius *= 2.0;
  }
}

}  // namespace

FactorGraph minimal_spanning_forest(const PointConfiguration& cfg, MsfMethod method, Degeneracy* degeneracy) {
  Degeneracy local;
  if (method == MsfMethod::Auto) {
    method = cfg.size() <= kAllPairsMsfLimit ? MsfMethod::AllPairs : MsfMethod::GridCandidates;
  }
  FactorGraph g = method == MsfMethod::AllPairs ? prim_all_pairs(cfg, local) : kruskal_grid(cfg, local);
  if (degeneracy) *degeneracy += local;
  return g;
}

FactorGraph msf_cycle_oracle(const PointConfiguration& cfg, Degeneracy* degeneracy) {
  const std::size_t n = cfg.size();
  if (n > kCycleOracleLimit) {
    throw ContractViolation("cycle oracle refuses n > " + std::to_string(kCycleOracleLimit));
  }
  std::vector<PairOrder> all;
  for (PointId i = 0; i < static_cast<PointId>(n); ++i) {
    for (PointId j = i + 1; j < static_cast<PointId>(n); ++j) all.push_back(cfg.pair_order(i, j));
  }
  if (degeneracy) {
    for (std::size_t a = 0; a < all.size(); ++a) {
      for (std::size_t b = a + 1; b < all.size(); ++b) {
        if (all[a].key == all[b].key) ++degeneracy->distance_ties;
      }
    }
  }
  FactorGraph g;
  g.n = n;
  for (const PairOrder& e : all) {
    // search for an e.lo -> e.hi path through strictly earlier edges
    std::vector<char> reached(n, 0);
    std::vector<PointId> frontier{e.lo};
    reached[static_cast<std::size_t>(e.lo)] = 1;
    while (!frontier.empty()) {
      const PointId v = frontier.back();
      frontier.pop_back();
      for (const PairOrder& f : all) {
        if (!(f < e)) continue;
        PointId other = -1;
        if (f.lo == v) other = f.hi;
        if (f.hi == v) other = f.lo;
        if (other >= 0 && !reached[static_cast<std::size_t>(other)]) {
          reached[static_cast<std::size_t>(other)] = 1;
          frontier.push_back(other);
        }
      }
    }
    if (!reached[static_cast<std::size_t>(e.hi)]) g.add_edge(e.lo, e.hi);
  }
  g.normalize();
  return g;
}

void greedy_closest_pair_matching(const PointConfiguration& cfg, std::span<const PointId> ids, Matching& m,
                                  Degeneracy* degeneracy) {
  if (ids.size() < 2) return;
  if (ids.size() > kSortedGreedyLimit) {
    // Greedy-by-length and iterated mutual-nearest matching select the same
    // pairs: the globally shortest remaining pair is always mutual.
    const MnnResult r = iterated_mnn_matching(cfg, ids);
    for (const auto& [a, b] : r.matching.pairs()) m.match(a, b);
    if (degeneracy) *degeneracy += r.degeneracy;
    return;
  }
  std::vector<PairOrder> pairs;
  pairs.reserve(ids.size() * (ids.size() - 1) / 2);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) pairs.push_back(cfg.pair_order(ids[i], ids[j]));
  }
  std::sort(pairs.begin(), pairs.end());
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    if (t > 0 && pairs[t].key == pairs[t - 1].key && degeneracy) ++degeneracy->distance_ties;
    if (!m.is_matched(pairs[t].lo) && !m.is_matched(pairs[t].hi)) m.match(pairs[t].lo, pairs[t].hi);
  }
}

ClumpMatching clump_greedy_matching(const PointConfiguration& cfg, const ClumpHierarchy& h) {
  ClumpMatching out;
  out.matching = Matching::empty(cfg.size());
  out.formation_level.assign(cfg.size(), 0);
  if (cfg.empty()) return out;
  if (h.point_count() != cfg.size()) throw ContractViolation("hierarchy does not cover the configuration");
  for (int k = 1; k <= h.k_max; ++k) {
    for (const auto& members : h.clumps(k)) {
      std::vector<PointId> open;
      for (PointId id : members) {
        if (!out.matching.is_matched(id)) open.push_back(id);
      }
      if (open.size() < 2) continue;
      greedy_closest_pair_matching(cfg, open, out.matching, &out.degeneracy);
      for (PointId id : open) {
        if (out.matching.is_matched(id)) out.formation_level[static_cast<std::size_t>(id)] = k;
      }
    }
  }
  return out;
}

}  // namespace ppfg
