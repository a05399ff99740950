#include "ppfg/mnn.hpp"

#include <algorithm>
#include <limits>
#include <memory>
#include <numeric>
#include <set>
#include <stdexcept>

#include "ppfg/spatial_index.hpp"

namespace ppfg {

namespace {

template <class Skip>
std::optional<Neighbor> nearest_counting_ties(const NeighborIndex& index, PointId id, Skip&& skip,
                                              Degeneracy& degeneracy) {
  const auto r = index.k_nearest(id, 2, skip);
  if (r.empty()) return std::nullopt;
  if (r.size() == 2 && r[0].key == r[1].key) ++degeneracy.distance_ties;
  return r.front();
}

std::vector<PointId> all_ids(const PointConfiguration& cfg) {
  std::vector<PointId> ids(cfg.size());
  std::iota(ids.begin(), ids.end(), PointId{0});
  return ids;
}

constexpr std::size_t kChainSearchBudget = 1'000'000;

}  // namespace

double MnnResult::annihilation_time(const PointConfiguration& cfg, PointId id) const {
  const auto& p = matching.partner[static_cast<std::size_t>(id)];
  if (!p) return std::numeric_limits<double>::infinity();
  return cfg.distance(id, *p) / 2.0;
}

std::vector<Edge> mutually_closest_pairs(const PointConfiguration& cfg, std::span<const PointId> active,
                                         Degeneracy* degeneracy) {
  Degeneracy local;
  const NeighborIndex index(cfg, active);
  std::vector<PointId> nn(cfg.size(), -1);
  auto none = [](PointId) { return false; };
  for (PointId id : active) {
    if (auto nb = nearest_counting_ties(index, id, none, local)) nn[static_cast<std::size_t>(id)] = nb->id;
  }
  std::vector<Edge> out;
  for (PointId x : active) {
    const PointId y = nn[static_cast<std::size_t>(x)];
    if (y >= 0 && x < y && nn[static_cast<std::size_t>(y)] == x) out.emplace_back(x, y);
  }
  std::sort(out.begin(), out.end());
  if (degeneracy) *degeneracy += local;
  return out;
}

MnnResult iterated_mnn_matching(const PointConfiguration& cfg) {
  const auto ids = all_ids(cfg);
  return iterated_mnn_matching(cfg, ids);
}

MnnResult iterated_mnn_matching(const PointConfiguration& cfg, std::span<const PointId> subset) {
  const std::size_t n = cfg.size();
  MnnResult res;
  res.matching = Matching::empty(n);
  res.round_of.assign(n, 0);

  std::vector<PointId> active(subset.begin(), subset.end());
  std::sort(active.begin(), active.end());
  std::vector<char> is_active(n, 0);
  for (PointId id : active) is_active[static_cast<std::size_t>(id)] = 1;
  auto inactive = [&](PointId id) { return is_active[static_cast<std::size_t>(id)] == 0; };

  auto index = std::make_unique<NeighborIndex>(cfg, active);
  std::vector<Neighbor> nn(n);
  for (PointId id : active) {
    if (auto nb = nearest_counting_ties(*index, id, inactive, res.degeneracy)) nn[static_cast<std::size_t>(id)] = *nb;
  }

  // Removing points never brings a nearer neighbor, so only points whose
  // nearest neighbor was matched need a fresh query after each round.
  while (active.size() >= 2) {
    ++res.rounds;
    double min_key = std::numeric_limits<double>::infinity();
    std::vector<Edge> pairs;
    for (PointId x : active) {
      const Neighbor& nx = nn[static_cast<std::size_t>(x)];
      min_key = std::min(min_key, nx.key);
      if (x < nx.id && nn[static_cast<std::size_t>(nx.id)].id == x) pairs.emplace_back(x, nx.id);
    }
    res.round_min_key.push_back(min_key);
    if (pairs.empty()) throw std::logic_error("mutually closest pair missing in a nonempty round");
    for (const auto& [x, y] : pairs) {
      res.matching.match(x, y);
      res.round_of[static_cast<std::size_t>(x)] = res.rounds;
      res.round_of[static_cast<std::size_t>(y)] = res.rounds;
      is_active[static_cast<std::size_t>(x)] = 0;
      is_active[static_cast<std::size_t>(y)] = 0;
    }
    std::erase_if(active, inactive);
    if (active.size() < 2) break;
    if (2 * active.size() < index->size()) index = std::make_unique<NeighborIndex>(cfg, active);
    for (PointId x : active) {
      Neighbor& nx = nn[static_cast<std::size_t>(x)];
      if (inactive(nx.id)) nx = *nearest_counting_ties(*index, x, inactive, res.degeneracy);
    }
  }
  res.leftover = active;
  return res;
}

NearestNeighborDigraph nearest_neighbor_digraph(const PointConfiguration& cfg, std::span<const PointId> subset,
                                                Degeneracy* degeneracy) {
  NearestNeighborDigraph out;
  out.graph.n = cfg.size();
  out.graph.directed = true;
  if (subset.size() < 2) return out;
  Degeneracy local;
  const NeighborIndex index(cfg, subset);
  std::vector<PointId> nn(cfg.size(), -1);
  auto none = [](PointId) { return false; };
  for (PointId id : subset) {
    const PointId to = nearest_counting_ties(index, id, none, local)->id;
    nn[static_cast<std::size_t>(id)] = to;
    out.graph.add_edge(id, to);
  }
  out.graph.normalize();
  for (PointId x : subset) {
    const PointId y = nn[static_cast<std::size_t>(x)];
    if (x < y && nn[static_cast<std::size_t>(y)] == x) out.two_cycles.emplace_back(x, y);
  }
  std::sort(out.two_cycles.begin(), out.two_cycles.end());
  if (degeneracy) *degeneracy += local;
  return out;
}

bool mutual_region_empty(const PointConfiguration& cfg, std::span<const PointId> active, PointId x, PointId y) {
  const double r = cfg.key(x, y);
  for (PointId z : active) {
    if (z == x || z == y) continue;
    if (cfg.key(z, x) <= r || cfg.key(z, y) <= r) return false;
  }
  return true;
}

namespace {

struct Arc {
  PointId from;
  PointId to;
  double key;
};

class ChainSearch {
 public:
  ChainSearch(std::size_t n, std::vector<Arc> arcs) : n_(n), arcs_(std::move(arcs)) {}

  void run(ChainReport& report) {
    std::sort(arcs_.begin(), arcs_.end(), [](const Arc& a, const Arc& b) {
      if (a.key != b.key) return a.key < b.key;
      if (a.from != b.from) return a.from < b.from;
      return a.to < b.to;
    });
    // walk_[a]: steps of the longest strictly descending walk starting with arc a
    walk_.assign(arcs_.size(), 0);
    std::vector<std::size_t> best_out(n_, 0);
    for (std::size_t i = 0; i < arcs_.size();) {
      std::size_t j = i;
      while (j < arcs_.size() && arcs_[j].key == arcs_[i].key) ++j;
      for (std::size_t t = i; t < j; ++t) walk_[t] = 1 + best_out[static_cast<std::size_t>(arcs_[t].to)];
      for (std::size_t t = i; t < j; ++t) {
        auto& b = best_out[static_cast<std::size_t>(arcs_[t].from)];
        b = std::max(b, walk_[t]);
      }
      i = j;
    }
    for (std::size_t v = 0; v < n_; ++v) ++report.histogram[best_out[v]];

    out_.assign(n_, {});
    for (std::size_t a = 0; a < arcs_.size(); ++a) out_[static_cast<std::size_t>(arcs_[a].from)].push_back(a);
    auto by_bound = [&](std::size_t a, std::size_t b) {
      if (walk_[a] != walk_[b]) return walk_[a] > walk_[b];
      if (arcs_[a].key != arcs_[b].key) return arcs_[a].key > arcs_[b].key;
      if (arcs_[a].from != arcs_[b].from) return arcs_[a].from < arcs_[b].from;
      return arcs_[a].to < arcs_[b].to;
    };
    for (auto& list : out_) std::sort(list.begin(), list.end(), by_bound);
    std::vector<std::size_t> starts(arcs_.size());
    std::iota(starts.begin(), starts.end(), std::size_t{0});
    std::sort(starts.begin(), starts.end(), by_bound);

    visited_.assign(n_, 0);
    for (std::size_t s : starts) {
      if ((!best_.empty() && walk_[s] <= best_steps()) || exhausted_) break;
      const Arc& a = arcs_[s];
      path_ = {a.from, a.to};
      visited_[static_cast<std::size_t>(a.from)] = 1;
      visited_[static_cast<std::size_t>(a.to)] = 1;
      extend(a.to, a.key);
      visited_[static_cast<std::size_t>(a.from)] = 0;
      visited_[static_cast<std::size_t>(a.to)] = 0;
    }
    report.longest = best_;
    report.length = best_.empty() ? 0 : best_.size() - 1;
    report.lower_bound = report.lower_bound || exhausted_;
  }

 private:
  [[nodiscard]] std::size_t best_steps() const { return best_.empty() ? 0 : best_.size() - 1; }

  void extend(PointId v, double last_key) {
    const std::size_t steps = path_.size() - 1;
    if (best_.empty() || steps > best_steps()) best_ = path_;
    for (std::size_t a : out_[static_cast<std::size_t>(v)]) {
      // arcs are sorted by walk bound, so nothing later can beat the incumbent either
      if (steps + walk_[a] <= best_steps()) break;
      const Arc& arc = arcs_[a];
      if (arc.key >= last_key || visited_[static_cast<std::size_t>(arc.to)]) continue;
      if (++expansions_ > kChainSearchBudget) {
        exhausted_ = true;
        return;
      }
      visited_[static_cast<std::size_t>(arc.to)] = 1;
      path_.push_back(arc.to);
      extend(arc.to, arc.key);
      path_.pop_back();
      visited_[static_cast<std::size_t>(arc.to)] = 0;
      if (exhausted_) return;
    }
  }

  std::size_t n_;
  std::vector<Arc> arcs_;
  std::vector<std::size_t> walk_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<char> visited_;
  std::vector<PointId> path_;
  std::vector<PointId> best_;
  std::size_t expansions_ = 0;
  bool exhausted_ = false;
};

}  // namespace

ChainReport find_descending_chains(const PointConfiguration& cfg, std::size_t pair_cap) {
  const std::size_t n = cfg.size();
  ChainReport report;
  if (pair_cap == 0 && n > kExhaustiveChainLimit) {
    throw ContractViolation("exhaustive chain search is limited to " + std::to_string(kExhaustiveChainLimit) +
                            " points");
  }
  std::set<Edge> pairs;
  if (pair_cap == 0 || pair_cap + 1 >= n) {
    for (PointId i = 0; i < static_cast<PointId>(n); ++i) {
      for (PointId j = i + 1; j < static_cast<PointId>(n); ++j) pairs.emplace(i, j);
    }
  } else {
    report.lower_bound = true;
    const NeighborIndex index(cfg);
    for (PointId i = 0; i < static_cast<PointId>(n); ++i) {
      for (const Neighbor& nb : index.k_nearest(i, pair_cap)) pairs.emplace(std::min(i, nb.id), std::max(i, nb.id));
    }
  }
  std::vector<Arc> arcs;
  arcs.reserve(2 * pairs.size());
  for (const auto& [a, b] : pairs) {
    const double k = cfg.key(a, b);
    if (k <= 0.0) continue;
    arcs.push_back({a, b, k});
    arcs.push_back({b, a, k});
  }
  ChainSearch search(n, std::move(arcs));
  search.run(report);
  return report;
}

}  // namespace ppfg
