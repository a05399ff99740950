#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "ppfg/metric.hpp"
#include "ppfg/pointgen.hpp"
#include "ppfg/random.hpp"

namespace support {

using ppfg::MetricWindow;
using ppfg::Point;
using ppfg::PointConfiguration;

inline PointConfiguration line(std::initializer_list<double> xs, double side = 100.0) {
  std::vector<Point> pts;
  for (double x : xs) pts.push_back(Point{x});
  return {MetricWindow::box(1, side), std::move(pts)};
}

inline PointConfiguration plane(std::initializer_list<std::pair<double, double>> xy, double side = 100.0) {
  std::vector<Point> pts;
  for (auto [x, y] : xy) pts.push_back(Point{x, y});
  return {MetricWindow::box(2, side), std::move(pts)};
}

/// Uniform points drawn with the library RNG; used only as test input.
inline PointConfiguration random_config(const MetricWindow& w, std::size_t n, std::uint64_t seed) {
  return ppfg::sample_uniform(w, n, seed);
}

/// Windows cycled through by property tests.
inline MetricWindow window_for(std::uint64_t i, double side) {
  const int d = 1 + static_cast<int>(i % 3);
  return (i / 3) % 2 == 0 ? MetricWindow::torus(d, side) : MetricWindow::box(d, side);
}

}  // namespace support
