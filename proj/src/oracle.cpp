#include "ppfg/oracle.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>

namespace ppfg::oracle {

namespace {

PairOrder min_pair(const PointConfiguration& cfg, const std::vector<PointId>& ids) {
  PairOrder best{std::numeric_limits<double>::infinity(), 0, 0};
  for (PointId a : ids) {
    for (PointId b : ids) {
      if (a < b) best = std::min(best, cfg.pair_order(a, b));
    }
  }
  return best;
}

PointId elect(const PointConfiguration& cfg, const std::vector<PointId>& members, LeaderPool pool) {
  if (members.size() == 1) return members.front();
  const PairOrder p = min_pair(cfg, members);
  std::vector<PointId> everyone;
  if (pool == LeaderPool::FullConfiguration) {
    for (PointId i = 0; i < static_cast<PointId>(cfg.size()); ++i) everyone.push_back(i);
  } else {
    everyone = members;
  }
  auto third = [&](PointId x) {
    std::optional<double> best;
    for (PointId y : everyone) {
      if (y == p.lo || y == p.hi) continue;
      const double k = cfg.key(x, y);
      if (!best || k < *best) best = k;
    }
    return best;
  };
  const auto dlo = third(p.lo);
  const auto dhi = third(p.hi);
  if (!dlo || !dhi || *dlo == *dhi) return p.lo;
  return *dlo < *dhi ? p.lo : p.hi;
}

}  // namespace

std::vector<int> canonical_labels(const std::vector<int>& labels) {
  std::map<int, int> rename;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) {
    auto [it, fresh] = rename.try_emplace(l, static_cast<int>(rename.size()));
    out.push_back(it->second);
  }
  return out;
}

std::vector<std::vector<int>> hierarchy(const PointConfiguration& cfg, const ClumpingParams& params) {
  const std::size_t n = cfg.size();
  const MetricWindow& w = cfg.window();

  std::vector<double> nn(n, std::numeric_limits<double>::infinity());
  for (PointId i = 0; i < static_cast<PointId>(n); ++i) {
    for (PointId j = 0; j < static_cast<PointId>(n); ++j) {
      if (i != j) nn[static_cast<std::size_t>(i)] = std::min(nn[static_cast<std::size_t>(i)], cfg.key(i, j));
    }
  }

  // inside[k-1][c][id] for every cutter c of level k
  std::vector<std::vector<std::vector<bool>>> inside(static_cast<std::size_t>(params.k_max));
  for (int k = 1; k <= params.k_max; ++k) {
    if (w.is_torus() && params.cutter_radius(k) >= w.extent() / 2.0) continue;
    const double seed_key = w.key_for_radius(params.seed_radius(k));
    const double cut_key = w.key_for_radius(params.cutter_radius(k));
    for (PointId c = 0; c < static_cast<PointId>(n); ++c) {
      if (!(nn[static_cast<std::size_t>(c)] < seed_key)) continue;
      std::vector<bool> in(n);
      for (PointId i = 0; i < static_cast<PointId>(n); ++i) in[static_cast<std::size_t>(i)] = cfg.key(c, i) <= cut_key;
      inside[static_cast<std::size_t>(k - 1)].push_back(std::move(in));
    }
  }

  std::vector<std::vector<int>> out;
  for (int k = 1; k <= params.k_max; ++k) {
    // adjacency: not separated by any cutter of level >= k
    std::vector<std::vector<bool>> joined(n, std::vector<bool>(n, true));
    for (int j = k; j <= params.k_max; ++j) {
      for (const auto& in : inside[static_cast<std::size_t>(j - 1)]) {
        for (std::size_t a = 0; a < n; ++a) {
          for (std::size_t b = 0; b < n; ++b) {
            if (in[a] != in[b]) joined[a][b] = false;
          }
        }
      }
    }
    // Warshall transitive closure
    for (std::size_t m = 0; m < n; ++m) {
      for (std::size_t a = 0; a < n; ++a) {
        if (!joined[a][m]) continue;
        for (std::size_t b = 0; b < n; ++b) {
          if (joined[m][b]) joined[a][b] = true;
        }
      }
    }
    std::vector<int> label(n, -1);
    int next = 0;
    for (std::size_t a = 0; a < n; ++a) {
      if (label[a] >= 0) continue;
      for (std::size_t b = a; b < n; ++b) {
        if (joined[a][b]) label[b] = next;
      }
      ++next;
    }
    out.push_back(std::move(label));
  }
  return out;
}

FactorGraph one_ended_tree(const PointConfiguration& cfg, const ClumpHierarchy& h, LeaderPool pool) {
  FactorGraph g;
  g.n = cfg.size();
  if (cfg.empty()) return g;
  const auto n = static_cast<PointId>(cfg.size());

  std::function<PointId(int, int)> lead = [&](int k, int clump) -> PointId {
    const auto& label = h.level(k);
    std::vector<PointId> candidates;
    if (k == 1) {
      for (PointId i = 0; i < n; ++i) {
        if (label[static_cast<std::size_t>(i)] == clump) candidates.push_back(i);
      }
    } else {
      const auto& below = h.level(k - 1);
      std::vector<int> subs;
      for (PointId i = 0; i < n; ++i) {
        if (label[static_cast<std::size_t>(i)] == clump) subs.push_back(below[static_cast<std::size_t>(i)]);
      }
      std::sort(subs.begin(), subs.end());
      subs.erase(std::unique(subs.begin(), subs.end()), subs.end());
      for (int s : subs) candidates.push_back(lead(k - 1, s));
      std::sort(candidates.begin(), candidates.end());
    }
    const PointId x = elect(cfg, candidates, pool);
    for (PointId y : candidates) {
      if (y != x) g.add_edge(x, y);
    }
    return x;
  };

  std::vector<int> tops(h.level(h.k_max).begin(), h.level(h.k_max).end());
  std::sort(tops.begin(), tops.end());
  tops.erase(std::unique(tops.begin(), tops.end()), tops.end());
  for (int c : tops) lead(h.k_max, c);
  g.normalize();
  return g;
}

std::vector<PointId> dfs(const FactorGraph& tree, const PointConfiguration& cfg, PointId root) {
  const std::size_t n = tree.n;
  std::vector<std::vector<PointId>> adj(n);
  for (const auto& [u, v] : tree.edges) {
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }
  std::vector<PointId> order;
  std::vector<bool> done(n, false);
  auto run = [&](PointId start) {
    std::vector<PointId> stack{start};
    while (!stack.empty()) {
      const PointId v = stack.back();
      stack.pop_back();
      if (done[static_cast<std::size_t>(v)]) continue;
      done[static_cast<std::size_t>(v)] = true;
      order.push_back(v);
      std::vector<PointId> kids;
      for (PointId c : adj[static_cast<std::size_t>(v)]) {
        if (!done[static_cast<std::size_t>(c)]) kids.push_back(c);
      }
      // farthest pushed first so the nearest child is popped first
      std::sort(kids.begin(), kids.end(), [&](PointId a, PointId b) {
        const double ka = cfg.key(v, a);
        const double kb = cfg.key(v, b);
        return ka != kb ? ka > kb : a > b;
      });
      for (PointId c : kids) stack.push_back(c);
    }
  };
  if (n == 0) return order;
  run(root);
  for (PointId v = 0; v < static_cast<PointId>(n); ++v) {
    if (!done[static_cast<std::size_t>(v)]) run(v);
  }
  return order;
}

MnnOutcome mnn(const PointConfiguration& cfg) {
  const std::size_t n = cfg.size();
  MnnOutcome out{Matching::empty(n), std::vector<int>(n, 0), 0};
  std::vector<PointId> active;
  for (PointId i = 0; i < static_cast<PointId>(n); ++i) active.push_back(i);
  while (active.size() >= 2) {
    ++out.rounds;
    std::map<PointId, PointId> nearest;
    for (PointId x : active) {
      PointId best = -1;
      for (PointId y : active) {
        if (y == x) continue;
        if (best < 0 || cfg.key(x, y) < cfg.key(x, best)) best = y;
      }
      nearest[x] = best;
    }
    std::vector<PointId> rest;
    for (PointId x : active) {
      const PointId y = nearest[x];
      if (nearest[y] == x) {
        if (x < y) {
          out.matching.match(x, y);
          out.round_of[static_cast<std::size_t>(x)] = out.rounds;
          out.round_of[static_cast<std::size_t>(y)] = out.rounds;
        }
      } else {
        rest.push_back(x);
      }
    }
    if (rest.size() == active.size()) break;
    active = std::move(rest);
  }
  return out;
}

Matching clump_greedy(const PointConfiguration& cfg, const ClumpHierarchy& h) {
  const std::size_t n = cfg.size();
  Matching m = Matching::empty(n);
  for (int k = 1; k <= h.k_max; ++k) {
    const auto& label = h.level(k);
    const int count = n == 0 ? 0 : *std::max_element(label.begin(), label.end()) + 1;
    for (int c = 0; c < count; ++c) {
      std::vector<PointId> open;
      for (PointId i = 0; i < static_cast<PointId>(n); ++i) {
        if (label[static_cast<std::size_t>(i)] == c && !m.is_matched(i)) open.push_back(i);
      }
      while (open.size() >= 2) {
        const PairOrder p = min_pair(cfg, open);
        m.match(p.lo, p.hi);
        std::erase_if(open, [&](PointId id) { return id == p.lo || id == p.hi; });
      }
    }
  }
  return m;
}

std::size_t longest_chain(const PointConfiguration& cfg) {
  const std::size_t n = cfg.size();
  if (n > kChainOracleLimit) {
    throw ContractViolation("chain oracle refuses n > " + std::to_string(kChainOracleLimit));
  }
  std::vector<bool> used(n, false);
  std::size_t best = 0;
  std::function<void(PointId, double, std::size_t)> walk = [&](PointId v, double last, std::size_t steps) {
    best = std::max(best, steps);
    for (PointId u = 0; u < static_cast<PointId>(n); ++u) {
      if (used[static_cast<std::size_t>(u)]) continue;
      const double k = cfg.key(v, u);
      if (k <= 0.0 || k >= last) continue;
      used[static_cast<std::size_t>(u)] = true;
      walk(u, k, steps + 1);
      used[static_cast<std::size_t>(u)] = false;
    }
  };
  for (PointId s = 0; s < static_cast<PointId>(n); ++s) {
    used[static_cast<std::size_t>(s)] = true;
    walk(s, std::numeric_limits<double>::infinity(), 0);
    used[static_cast<std::size_t>(s)] = false;
  }
  return best;
}

}  // namespace ppfg::oracle
