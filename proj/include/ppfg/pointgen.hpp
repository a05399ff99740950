#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ppfg/metric.hpp"

namespace ppfg {

/// Counts of measure-zero events that the constructions had to resolve by
/// a fixed rule. All of them stay zero on Poisson input in practice.
struct Degeneracy {
  std::uint64_t distance_ties = 0;     // two compared distances were exactly equal
  std::uint64_t on_cutter_points = 0;  // a point at exactly the cutter radius
  std::uint64_t leader_fallbacks = 0;  // leader chosen without a third point

  Degeneracy& operator+=(const Degeneracy& o) {
    distance_ties += o.distance_ties;
    on_cutter_points += o.on_cutter_points;
    leader_fallbacks += o.leader_fallbacks;
    return *this;
  }
  friend bool operator==(const Degeneracy&, const Degeneracy&) = default;
};

/// Total order used whenever two pairs are compared by length: by key, then
/// by the sorted id pair. Exact key equality is the tie case.
struct PairOrder {
  double key = 0.0;
  PointId lo = 0;
  PointId hi = 0;

  static PairOrder make(double key, PointId a, PointId b) {
    return a < b ? PairOrder{key, a, b} : PairOrder{key, b, a};
  }
  friend std::partial_ordering operator<=>(const PairOrder& a, const PairOrder& b) {
    if (auto c = a.key <=> b.key; c != 0) return c;
    if (auto c = a.lo <=> b.lo; c != 0) return c;
    return a.hi <=> b.hi;
  }
  friend bool operator==(const PairOrder&, const PairOrder&) = default;
};

/// A finite point set in a window, ids 0..n-1.
class PointConfiguration {
 public:
  PointConfiguration(MetricWindow window, std::vector<Point> points, std::uint64_t rng_seed = 0);

  [[nodiscard]] const MetricWindow& window() const { return window_; }
  [[nodiscard]] const std::vector<Point>& points() const { return points_; }
  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] bool empty() const { return points_.empty(); }
  [[nodiscard]] const Point& operator[](PointId id) const { return points_[static_cast<std::size_t>(id)]; }
  [[nodiscard]] std::uint64_t rng_seed() const { return rng_seed_; }

  [[nodiscard]] double key(PointId a, PointId b) const { return window_.key((*this)[a], (*this)[b]); }
  [[nodiscard]] double distance(PointId a, PointId b) const { return window_.distance((*this)[a], (*this)[b]); }
  [[nodiscard]] PairOrder pair_order(PointId a, PointId b) const { return PairOrder::make(key(a, b), a, b); }

 private:
  MetricWindow window_;
  std::vector<Point> points_;
  std::uint64_t rng_seed_;
};

struct NonEquidistanceReport {
  bool holds = true;
  /// (w, x, y, z) with |w-x| = |y-z| > 0 and {w,x} != {y,z}.
  std::optional<std::array<PointId, 4>> witness;
  double witness_distance = 0.0;
};

/// Poisson process of the given intensity on the window.
[[nodiscard]] PointConfiguration sample_poisson(const MetricWindow& w, double intensity, std::uint64_t seed);

/// Exactly n independent uniform points (a Poisson sample conditioned on its count).
[[nodiscard]] PointConfiguration sample_uniform(const MetricWindow& w, std::size_t n, std::uint64_t seed);

/// Z^d in [0, side)^d on a torus, shifted by a uniform vector and (d = 2)
/// rotated about the window center before wrapping. Coordinates are
/// snapped to a dyadic grid so congruent lattice pairs have bit-identical
/// distances.
[[nodiscard]] PointConfiguration perturbed_lattice(int d, int side, std::uint64_t seed);

/// Appends `chain_length` points on a segment leaving a random anchor, with
/// gaps g, g*ratio, g*ratio^2, ... where g is half the anchor's
/// nearest-neighbor distance.
[[nodiscard]] PointConfiguration enrich_descending_chains(const PointConfiguration& cfg, int chain_length, double ratio,
                                                          std::uint64_t seed);

[[nodiscard]] NonEquidistanceReport check_non_equidistant(const PointConfiguration& cfg);

inline constexpr double kLatticeSnap = 0x1.0p-20;

}  // namespace ppfg
