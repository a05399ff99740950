#include "ppfg/spatial_index.hpp"

#include <limits>
#include <numeric>

namespace ppfg {

namespace {

constexpr std::size_t kGridMinPoints = 32;
constexpr int kMaxCellsPerAxis = 1024;

}  // namespace

NeighborIndex::NeighborIndex(const PointConfiguration& cfg) : cfg_(&cfg), ids_(cfg.size()) {
  std::iota(ids_.begin(), ids_.end(), PointId{0});
  build();
}

NeighborIndex::NeighborIndex(const PointConfiguration& cfg, std::span<const PointId> ids)
    : cfg_(&cfg), ids_(ids.begin(), ids.end()) {
  build();
}

void NeighborIndex::build() {
  const MetricWindow& w = cfg_->window();
  dim_ = w.dimension();
  if (!w.is_euclidean() || dim_ > 3 || ids_.size() < kGridMinPoints) {
    cells_per_axis_ = 0;
    return;
  }
  // about two points per cell
  const double per_axis = std::pow(static_cast<double>(ids_.size()) / 2.0, 1.0 / dim_);
  cells_per_axis_ = std::clamp(static_cast<int>(per_axis), 1, kMaxCellsPerAxis);
  cell_side_ = w.extent() / cells_per_axis_;

  std::size_t total = 1;
  for (int i = 0; i < dim_; ++i) total *= static_cast<std::size_t>(cells_per_axis_);
  std::vector<std::size_t> counts(total + 1, 0);
  std::vector<std::size_t> cell_of_item(ids_.size());
  for (std::size_t j = 0; j < ids_.size(); ++j) {
    cell_of_item[j] = flat(cell_of((*cfg_)[ids_[j]]));
    ++counts[cell_of_item[j] + 1];
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  cell_start_ = counts;
  cell_items_.assign(ids_.size(), 0);
  std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
  std::vector<std::size_t> order(ids_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids_[a] < ids_[b]; });
  for (std::size_t j : order) cell_items_[cursor[cell_of_item[j]]++] = ids_[j];
}

NeighborIndex::CellCoord NeighborIndex::cell_of(const Point& p) const {
  CellCoord c{};
  for (int i = 0; i < dim_; ++i) {
    int v = static_cast<int>(std::floor(p[i] / cell_side_));
    c[static_cast<std::size_t>(i)] = std::clamp(v, 0, cells_per_axis_ - 1);
  }
  return c;
}

std::size_t NeighborIndex::flat(const CellCoord& c) const {
  std::size_t f = 0;
  for (int i = dim_ - 1; i >= 0; --i) {
    f = f * static_cast<std::size_t>(cells_per_axis_) + static_cast<std::size_t>(c[static_cast<std::size_t>(i)]);
  }
  return f;
}

template <class Visit>
void NeighborIndex::visit_box(const Point& center, double radius, Visit&& visit) const {
  const int m = cells_per_axis_;
  const bool torus = cfg_->window().is_torus();
  std::array<std::vector<int>, 3> ranges;
  for (int i = 0; i < dim_; ++i) {
    auto& r = ranges[static_cast<std::size_t>(i)];
    if (!(radius < cfg_->window().extent())) {
      for (int v = 0; v < m; ++v) r.push_back(v);
      continue;
    }
    const int lo = static_cast<int>(std::floor((center[i] - radius) / cell_side_));
    const int hi = static_cast<int>(std::floor((center[i] + radius) / cell_side_));
    if (hi - lo + 1 >= m) {
      for (int v = 0; v < m; ++v) r.push_back(v);
    } else if (torus) {
      for (int v = lo; v <= hi; ++v) r.push_back(((v % m) + m) % m);
    } else {
      for (int v = std::max(lo, 0); v <= std::min(hi, m - 1); ++v) r.push_back(v);
    }
    if (r.empty()) return;
  }
  CellCoord idx{};
  for (;;) {
    CellCoord c{};
    for (int i = 0; i < dim_; ++i) {
      const auto a = static_cast<std::size_t>(i);
      c[a] = ranges[a][static_cast<std::size_t>(idx[a])];
    }
    const std::size_t f = flat(c);
    for (std::size_t j = cell_start_[f]; j < cell_start_[f + 1]; ++j) visit(cell_items_[j]);
    int axis = 0;
    while (axis < dim_) {
      const auto a = static_cast<std::size_t>(axis);
      if (++idx[a] < static_cast<int>(ranges[a].size())) break;
      idx[a] = 0;
      ++axis;
    }
    if (axis == dim_) break;
  }
}

std::vector<Neighbor> NeighborIndex::within_shell(const Point& center, double lo_key, double hi_key) const {
  std::vector<Neighbor> out;
  const MetricWindow& w = cfg_->window();
  auto offer = [&](PointId id) {
    const double k = w.key(center, (*cfg_)[id]);
    if (k > lo_key && k < hi_key) out.push_back({id, k});
  };
  if (cells_per_axis_ == 0) {
    for (PointId id : ids_) offer(id);
  } else {
    // pad the box so rounding in sqrt can never drop a boundary point
    const double radius = std::sqrt(hi_key) * (1.0 + 1e-12) + 1e-12;
    visit_box(center, radius, offer);
  }
  std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) { return a.id < b.id; });
  return out;
}

std::vector<Neighbor> NeighborIndex::within(const Point& center, double max_key) const {
  const double hi = std::nextafter(max_key, std::numeric_limits<double>::infinity());
  return within_shell(center, -1.0, hi);
}

}  // namespace ppfg
