#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ppfg {

/// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by region_volume for radii the torus cannot represent as a ball.
class UnsupportedRadius : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr int kMaxDimension = 8;

using PointId = std::int32_t;

/// A point in a window. Coordinates beyond `dim` are zero and ignored.
class Point {
 public:
  Point() = default;
  Point(std::initializer_list<double> coords);
  explicit Point(std::span<const double> coords);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] double operator[](int axis) const { return coords_[static_cast<std::size_t>(axis)]; }
  double& operator[](int axis) { return coords_[static_cast<std::size_t>(axis)]; }
  [[nodiscard]] std::span<const double> coords() const { return {coords_.data(), static_cast<std::size_t>(dim_)}; }

  [[nodiscard]] double norm_squared() const;

  friend bool operator==(const Point& a, const Point& b);

 private:
  std::array<double, kMaxDimension> coords_{};
  int dim_ = 0;
};

enum class WindowKind { EuclideanBox, EuclideanTorus, PoincareDisk };

[[nodiscard]] std::string_view to_string(WindowKind kind);
[[nodiscard]] WindowKind parse_window_kind(std::string_view text);

/// A bounded region with a metric.
///
/// Box and torus windows are [0, extent)^d. The Poincare disk window is the
/// centered hyperbolic ball of radius `extent` inside the unit disk model.
///
/// Every comparison between distances goes through `key`, a strictly
/// increasing function of the distance that avoids square roots and
/// inverse hyperbolic functions. Equal keys mean exactly equal distances.
class MetricWindow {
 public:
  MetricWindow(WindowKind kind, int dimension, double extent);

  static MetricWindow box(int dimension, double side) { return {WindowKind::EuclideanBox, dimension, side}; }
  static MetricWindow torus(int dimension, double side) { return {WindowKind::EuclideanTorus, dimension, side}; }
  static MetricWindow disk(double radius) { return {WindowKind::PoincareDisk, 2, radius}; }

  [[nodiscard]] WindowKind kind() const { return kind_; }
  [[nodiscard]] int dimension() const { return dimension_; }
  [[nodiscard]] double extent() const { return extent_; }
  [[nodiscard]] bool is_euclidean() const { return kind_ != WindowKind::PoincareDisk; }
  [[nodiscard]] bool is_torus() const { return kind_ == WindowKind::EuclideanTorus; }

  [[nodiscard]] double distance(const Point& p, const Point& q) const;

  /// Monotone surrogate of distance: squared Euclidean (box, torus) or
  /// 2|p-q|^2 / ((1-|p|^2)(1-|q|^2)) (disk), so that distance = acosh(1 + key).
  [[nodiscard]] double key(const Point& p, const Point& q) const;
  [[nodiscard]] double key_for_radius(double r) const;
  [[nodiscard]] double radius_for_key(double key) const;

  /// Volume of a metric ball of radius r.
  [[nodiscard]] double region_volume(double r) const;
  /// Volume of the whole window (the sampling region for the disk).
  [[nodiscard]] double volume() const;
  /// Largest distance realized between two points of the window.
  [[nodiscard]] double diameter() const;

  [[nodiscard]] Point canonicalize(const Point& p) const;
  [[nodiscard]] bool contains(const Point& p) const;
  [[nodiscard]] Point center() const;

  /// Largest Euclidean norm of a disk-model point inside the sampling ball.
  [[nodiscard]] double disk_model_radius() const;

  friend bool operator==(const MetricWindow&, const MetricWindow&) = default;

 private:
  void check_dim(const Point& p) const;

  WindowKind kind_;
  int dimension_;
  double extent_;
};

[[nodiscard]] inline double distance(const MetricWindow& w, const Point& p, const Point& q) { return w.distance(p, q); }
[[nodiscard]] inline double region_volume(const MetricWindow& w, double r) { return w.region_volume(r); }
[[nodiscard]] inline Point canonicalize(const MetricWindow& w, const Point& p) { return w.canonicalize(p); }

/// Volume of the Euclidean unit ball in dimension d.
[[nodiscard]] double unit_ball_volume(int d);

}  // namespace ppfg
