#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ppfg/pointgen.hpp"

namespace ppfg {

struct Neighbor {
  PointId id = -1;
  double key = 0.0;

  friend bool operator<(const Neighbor& a, const Neighbor& b) {
    return a.key < b.key || (a.key == b.key && a.id < b.id);
  }
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Nearest-neighbor and ball queries over a subset of a configuration.
///
/// Euclidean windows of dimension <= 3 use a uniform bucket grid; other
/// windows (and tiny inputs) scan every indexed point. Results are ordered
/// by (key, id), so ties are resolved by the smaller id.
class NeighborIndex {
 public:
  explicit NeighborIndex(const PointConfiguration& cfg);
  NeighborIndex(const PointConfiguration& cfg, std::span<const PointId> ids);

  [[nodiscard]] std::size_t size() const { return ids_.size(); }
  [[nodiscard]] bool uses_grid() const { return cells_per_axis_ > 0; }

  /// The k nearest indexed points to `query` other than `query` itself,
  /// skipping ids for which skip(id) is true.
  template <class Skip>
  [[nodiscard]] std::vector<Neighbor> k_nearest(PointId query, std::size_t k, Skip&& skip) const;
  [[nodiscard]] std::vector<Neighbor> k_nearest(PointId query, std::size_t k) const {
    return k_nearest(query, k, [](PointId) { return false; });
  }

  template <class Skip>
  [[nodiscard]] std::optional<Neighbor> nearest(PointId query, Skip&& skip) const {
    auto r = k_nearest(query, 1, skip);
    if (r.empty()) return std::nullopt;
    return r.front();
  }
  [[nodiscard]] std::optional<Neighbor> nearest(PointId query) const {
    return nearest(query, [](PointId) { return false; });
  }

  /// Indexed points with key(center, p) <= max_key, ascending by id.
  [[nodiscard]] std::vector<Neighbor> within(const Point& center, double max_key) const;

  /// Indexed points whose key to `center` lies in (lo_key, hi_key), ascending by id.
  [[nodiscard]] std::vector<Neighbor> within_shell(const Point& center, double lo_key, double hi_key) const;

 private:
  using CellCoord = std::array<int, 3>;

  void build();
  [[nodiscard]] CellCoord cell_of(const Point& p) const;
  [[nodiscard]] std::size_t flat(const CellCoord& c) const;
  template <class Visit>
  void visit_ring(const CellCoord& origin, int s, Visit&& visit) const;
  template <class Visit>
  void visit_box(const Point& center, double radius, Visit&& visit) const;

  const PointConfiguration* cfg_;
  std::vector<PointId> ids_;
  int dim_ = 0;
  int cells_per_axis_ = 0;  // 0: brute force
  double cell_side_ = 0.0;
  std::vector<std::size_t> cell_start_;
  std::vector<PointId> cell_items_;
};

// ---------------------------------------------------------------------------

template <class Visit>
void NeighborIndex::visit_ring(const CellCoord& origin, int s, Visit&& visit) const {
  const int m = cells_per_axis_;
  const bool torus = cfg_->window().is_torus();
  CellCoord off{};
  for (int i = 0; i < dim_; ++i) off[static_cast<std::size_t>(i)] = -s;
  for (;;) {
    int cheb = 0;
    for (int i = 0; i < dim_; ++i) cheb = std::max(cheb, std::abs(off[static_cast<std::size_t>(i)]));
    if (cheb == s) {
      CellCoord c{};
      bool inside = true;
      for (int i = 0; i < dim_; ++i) {
        const auto a = static_cast<std::size_t>(i);
        int v = origin[a] + off[a];
        if (torus) {
          v = ((v % m) + m) % m;
        } else if (v < 0 || v >= m) {
          inside = false;
          break;
        }
        c[a] = v;
      }
      if (inside) {
        const std::size_t f = flat(c);
        for (std::size_t j = cell_start_[f]; j < cell_start_[f + 1]; ++j) visit(cell_items_[j]);
      }
    }
    int axis = 0;
    while (axis < dim_) {
      auto& o = off[static_cast<std::size_t>(axis)];
      if (o < s) {
        int rest = 0;
        for (int i = axis + 1; i < dim_; ++i) rest = std::max(rest, std::abs(off[static_cast<std::size_t>(i)]));
        // along axis 0 only the two faces of the ring are needed
        o = (axis == 0 && o == -s && rest < s) ? s : o + 1;
        break;
      }
      o = -s;
      ++axis;
    }
    if (axis == dim_) break;
  }
}

template <class Skip>
std::vector<Neighbor> NeighborIndex::k_nearest(PointId query, std::size_t k, Skip&& skip) const {
  std::vector<Neighbor> best;  // max-heap on (key, id)
  if (k == 0) return best;
  const Point& q = (*cfg_)[query];
  auto offer = [&](PointId id) {
    if (id == query || skip(id)) return;
    const Neighbor cand{id, cfg_->window().key(q, (*cfg_)[id])};
    if (best.size() < k) {
      best.push_back(cand);
      std::push_heap(best.begin(), best.end());
    } else if (cand < best.front()) {
      std::pop_heap(best.begin(), best.end());
      best.back() = cand;
      std::push_heap(best.begin(), best.end());
    }
  };

  auto scan_all = [&] {
    best.clear();
    for (PointId id : ids_) offer(id);
  };

  if (cells_per_axis_ == 0) {
    scan_all();
  } else {
    const CellCoord origin = cell_of(q);
    const bool torus = cfg_->window().is_torus();
    const int m = cells_per_axis_;
    for (int s = 0;; ++s) {
      if (torus && 2 * s + 1 > m) {
        scan_all();
        break;
      }
      if (!torus && s >= m) break;
      visit_ring(origin, s, offer);
      if (best.size() == k) {
        const double bound = static_cast<double>(s) * cell_side_;
        if (best.front().key < bound * bound) break;
      }
    }
  }
  std::sort_heap(best.begin(), best.end());
  return best;
}

}  // namespace ppfg
