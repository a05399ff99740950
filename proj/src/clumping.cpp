#include "ppfg/clumping.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "ppfg/parallel.hpp"
#include "ppfg/random.hpp"
#include "ppfg/spatial_index.hpp"

namespace ppfg {

double ClumpingParams::seed_radius(int k) const {
  return std::exp(-k * (1.0 - 1.0 / (2.0 * dimension)));
}

double ClumpingParams::cutter_radius(int k) const { return std::exp(static_cast<double>(k)); }

ClumpingParams ClumpingParams::for_window(const MetricWindow& w, std::optional<int> k_max) {
  ClumpingParams p;
  p.dimension = w.dimension();
  if (k_max) {
    if (*k_max < 1) throw ContractViolation("k_max must be at least 1");
    p.k_max = *k_max;
  } else {
    p.k_max = std::max(1, static_cast<int>(std::ceil(std::log(w.diameter()))));
  }
  return p;
}

std::vector<std::vector<PointId>> ClumpHierarchy::clumps(int k) const {
  const auto& ids = level(k);
  std::vector<std::vector<PointId>> out(static_cast<std::size_t>(clump_count.at(static_cast<std::size_t>(k - 1))));
  for (std::size_t i = 0; i < ids.size(); ++i) out[static_cast<std::size_t>(ids[i])].push_back(static_cast<PointId>(i));
  return out;
}

std::vector<double> nearest_neighbor_keys(const PointConfiguration& cfg, const NeighborIndex& index) {
  std::vector<double> out(cfg.size(), std::numeric_limits<double>::infinity());
  for (PointId i = 0; i < static_cast<PointId>(cfg.size()); ++i) {
    if (auto nb = index.nearest(i)) out[static_cast<std::size_t>(i)] = nb->key;
  }
  return out;
}

std::vector<Cutter> find_seeds(const PointConfiguration& cfg, std::span<const double> nn_keys, int k,
                               const ClumpingParams& params, Degeneracy* degeneracy) {
  if (k < 1) throw ContractViolation("seed level must be >= 1");
  const double threshold = cfg.window().key_for_radius(params.seed_radius(k));
  const double radius = params.cutter_radius(k);
  std::vector<Cutter> out;
  for (std::size_t i = 0; i < nn_keys.size(); ++i) {
    if (nn_keys[i] < threshold) {
      out.push_back({static_cast<PointId>(i), radius, k});
    } else if (nn_keys[i] == threshold && degeneracy) {
      ++degeneracy->distance_ties;
    }
  }
  return out;
}

std::vector<Cutter> find_seeds(const PointConfiguration& cfg, int k, const ClumpingParams& params,
                               Degeneracy* degeneracy) {
  const NeighborIndex index(cfg);
  const auto nn = nearest_neighbor_keys(cfg, index);
  return find_seeds(cfg, nn, k, params, degeneracy);
}

bool cutter_level_dropped(const MetricWindow& w, const ClumpingParams& params, int k) {
  return w.is_torus() && params.cutter_radius(k) >= w.extent() / 2.0;
}

ClumpHierarchy build_hierarchy(const PointConfiguration& cfg, const ClumpingParams& params) {
  if (params.k_max < 1) throw ContractViolation("k_max must be at least 1");
  const std::size_t n = cfg.size();
  const auto levels = static_cast<std::size_t>(params.k_max);
  ClumpHierarchy h;
  h.k_max = params.k_max;
  h.clump_of.assign(levels, {});
  h.clump_count.assign(levels, 0);
  h.cutters.assign(levels, {});
  h.level_dropped.assign(levels, false);

  const NeighborIndex index(cfg);
  const auto nn = nearest_neighbor_keys(cfg, index);

  // Refine top-down: level k splits each level-(k+1) clump by the level-k cutters.
  std::vector<int> parent(n, 0);
  for (int k = params.k_max; k >= 1; --k) {
    const auto lk = static_cast<std::size_t>(k - 1);
    h.level_dropped[lk] = cutter_level_dropped(cfg.window(), params, k);
    if (!h.level_dropped[lk]) h.cutters[lk] = find_seeds(cfg, nn, k, params, &h.degeneracy);

    std::vector<std::vector<int>> inside(n);
    const double radius_key = cfg.window().key_for_radius(params.cutter_radius(k));
    for (std::size_t c = 0; c < h.cutters[lk].size(); ++c) {
      for (const Neighbor& nb : index.within(cfg[h.cutters[lk][c].center], radius_key)) {
        if (nb.key == radius_key) ++h.degeneracy.on_cutter_points;
        inside[static_cast<std::size_t>(nb.id)].push_back(static_cast<int>(c));
      }
    }

    std::map<std::pair<int, std::vector<int>>, int> label;
    std::vector<int> ids(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto [it, fresh] = label.try_emplace({parent[i], std::move(inside[i])}, static_cast<int>(label.size()));
      ids[i] = it->second;
    }
    h.clump_count[lk] = static_cast<int>(label.size());
    h.clump_of[lk] = ids;
    parent = std::move(ids);
  }
  return h;
}

EnclosureEvents enclosure_events(const PointConfiguration& cfg, const NeighborIndex& index,
                                 const ClumpingParams& params, int k, double probe_radius) {
  const MetricWindow& w = cfg.window();
  const Point center = w.center();
  const double r = params.cutter_radius(k);
  const double seed_key = w.key_for_radius(params.seed_radius(k));
  auto is_seed = [&](PointId id) {
    auto nb = index.nearest(id);
    return nb && nb->key < seed_key;
  };

  EnclosureEvents ev;
  if (r > 1.0) {
    for (const Neighbor& c : index.within_shell(center, -1.0, w.key_for_radius(r - 1.0))) {
      if (is_seed(c.id)) {
        ev.enclosed = true;
        break;
      }
    }
  }
  const double lo = r - probe_radius > 0.0 ? w.key_for_radius(r - probe_radius) : -1.0;
  for (const Neighbor& c : index.within_shell(center, lo, w.key_for_radius(r + probe_radius))) {
    if (is_seed(c.id)) {
      ev.intersects = true;
      break;
    }
  }
  return ev;
}

namespace {

bool level_fits(const MetricWindow& w, const ClumpingParams& params, int k, double probe_radius) {
  if (!w.is_euclidean()) return true;
  return w.extent() > 2.0 * params.cutter_radius(k) + 2.0 * probe_radius;
}

std::vector<EnclosureRow> tally(const MetricWindow& w, const ClumpingParams& params, int k_lo, int k_hi,
                                double probe_radius, const std::vector<std::vector<EnclosureEvents>>& runs) {
  std::vector<EnclosureRow> rows;
  for (int k = k_lo; k <= k_hi; ++k) {
    EnclosureRow row;
    row.k = k;
    row.skipped = !level_fits(w, params, k, probe_radius);
    if (!row.skipped && !runs.empty()) {
      std::size_t enclosed = 0;
      std::size_t hits = 0;
      for (const auto& run : runs) {
        enclosed += run[static_cast<std::size_t>(k - k_lo)].enclosed ? 1 : 0;
        hits += run[static_cast<std::size_t>(k - k_lo)].intersects ? 1 : 0;
      }
      row.runs = runs.size();
      row.p_enclosed = static_cast<double>(enclosed) / static_cast<double>(runs.size());
      row.p_intersects = static_cast<double>(hits) / static_cast<double>(runs.size());
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<EnclosureEvents> events_for(const PointConfiguration& cfg, const ClumpingParams& params, int k_lo,
                                        int k_hi, double probe_radius) {
  const NeighborIndex index(cfg);
  std::vector<EnclosureEvents> out;
  for (int k = k_lo; k <= k_hi; ++k) {
    out.push_back(level_fits(cfg.window(), params, k, probe_radius)
                      ? enclosure_events(cfg, index, params, k, probe_radius)
                      : EnclosureEvents{});
  }
  return out;
}

}  // namespace

std::vector<EnclosureRow> enclosure_stats(std::span<const PointConfiguration> ensemble, const ClumpingParams& params,
                                          int k_lo, int k_hi, double probe_radius) {
  if (k_lo < 1 || k_hi < k_lo) throw ContractViolation("invalid level range");
  if (ensemble.empty()) return tally(MetricWindow::torus(params.dimension, 1.0), params, k_lo, k_hi, probe_radius, {});
  std::vector<std::vector<EnclosureEvents>> runs;
  for (const auto& cfg : ensemble) runs.push_back(events_for(cfg, params, k_lo, k_hi, probe_radius));
  return tally(ensemble.front().window(), params, k_lo, k_hi, probe_radius, runs);
}

std::vector<EnclosureRow> enclosure_stats(const MetricWindow& w, double intensity, std::uint64_t master_seed,
                                          std::size_t runs, const ClumpingParams& params, int k_lo, int k_hi,
                                          double probe_radius, unsigned jobs) {
  if (k_lo < 1 || k_hi < k_lo) throw ContractViolation("invalid level range");
  std::vector<std::vector<EnclosureEvents>> results(runs);
  parallel_for(runs, jobs, [&](std::size_t i) {
    const auto cfg = sample_poisson(w, intensity, derive_seed(master_seed, i));
    results[i] = events_for(cfg, params, k_lo, k_hi, probe_radius);
  });
  return tally(w, params, k_lo, k_hi, probe_radius, results);
}

}  // namespace ppfg
