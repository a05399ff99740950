#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ppfg/pointgen.hpp"

namespace ppfg {

class NeighborIndex;

/// Seed radii a_k = exp(-k (1 - 1/(2d))) and cutter radii r_k = e^k for
/// levels 1..k_max.
struct ClumpingParams {
  int dimension = 2;
  int k_max = 1;

  [[nodiscard]] double seed_radius(int k) const;
  [[nodiscard]] double cutter_radius(int k) const;

  /// k_max defaults to ceil(ln(diameter)) so the last cutter radius exceeds the window.
  [[nodiscard]] static ClumpingParams for_window(const MetricWindow& w, std::optional<int> k_max = std::nullopt);
};

/// The sphere of radius r_level around a level-seed.
struct Cutter {
  PointId center = 0;
  double radius = 0.0;
  int level = 0;

  friend bool operator==(const Cutter&, const Cutter&) = default;
};

/// Nested partitions P_1, ..., P_kmax of point ids.
///
/// Two points share a clump of level k iff no cutter of any level j in
/// [k, k_max] has one of them strictly inside and the other strictly
/// outside. A point at exactly the radius counts as inside.
struct ClumpHierarchy {
  int k_max = 0;
  /// clump_of[k-1][id]; clump ids are dense and numbered by first appearance in id order.
  std::vector<std::vector<int>> clump_of;
  std::vector<int> clump_count;
  /// Effective cutters per level (empty for dropped levels).
  std::vector<std::vector<Cutter>> cutters;
  /// Torus levels whose cutter radius reaches side/2 separate nothing and are dropped.
  std::vector<bool> level_dropped;
  Degeneracy degeneracy;

  [[nodiscard]] const std::vector<int>& level(int k) const { return clump_of.at(static_cast<std::size_t>(k - 1)); }
  /// Members of each clump of level k, ascending ids.
  [[nodiscard]] std::vector<std::vector<PointId>> clumps(int k) const;
  [[nodiscard]] std::size_t point_count() const { return clump_of.empty() ? 0 : clump_of.front().size(); }
};

/// Key of every point's nearest other point (infinity when alone).
[[nodiscard]] std::vector<double> nearest_neighbor_keys(const PointConfiguration& cfg, const NeighborIndex& index);

/// Level-k seeds: points whose nearest other point lies strictly within a_k.
[[nodiscard]] std::vector<Cutter> find_seeds(const PointConfiguration& cfg, int k, const ClumpingParams& params,
                                             Degeneracy* degeneracy = nullptr);
[[nodiscard]] std::vector<Cutter> find_seeds(const PointConfiguration& cfg, std::span<const double> nn_keys, int k,
                                             const ClumpingParams& params, Degeneracy* degeneracy = nullptr);

[[nodiscard]] ClumpHierarchy build_hierarchy(const PointConfiguration& cfg, const ClumpingParams& params);

/// Whether the cutter of level k would be dropped on this window.
[[nodiscard]] bool cutter_level_dropped(const MetricWindow& w, const ClumpingParams& params, int k);

struct EnclosureEvents {
  bool enclosed = false;    // some k-seed within r_k - 1 of the probe center
  bool intersects = false;  // some k-seed at distance in (r_k - l, r_k + l)
};

[[nodiscard]] EnclosureEvents enclosure_events(const PointConfiguration& cfg, const NeighborIndex& index,
                                               const ClumpingParams& params, int k, double probe_radius);

struct EnclosureRow {
  int k = 0;
  bool skipped = false;  // window too small for this level
  std::size_t runs = 0;
  double p_enclosed = 0.0;
  double p_intersects = 0.0;
};

/// Empirical P[V_k] and P[U_k] for k in [k_lo, k_hi] over an ensemble.
[[nodiscard]] std::vector<EnclosureRow> enclosure_stats(std::span<const PointConfiguration> ensemble,
                                                        const ClumpingParams& params, int k_lo, int k_hi,
                                                        double probe_radius);

/// Same, generating Poisson samples from derive_seed(master_seed, run) one at a time.
[[nodiscard]] std::vector<EnclosureRow> enclosure_stats(const MetricWindow& w, double intensity,
                                                        std::uint64_t master_seed, std::size_t runs,
                                                        const ClumpingParams& params, int k_lo, int k_hi,
                                                        double probe_radius, unsigned jobs = 1);

}  // namespace ppfg
