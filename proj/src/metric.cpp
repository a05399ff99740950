#include "ppfg/metric.hpp"

#include <cmath>
#include <numbers>

namespace ppfg {

Point::Point(std::initializer_list<double> coords) : Point(std::span<const double>(coords.begin(), coords.size())) {}

Point::Point(std::span<const double> coords) {
  if (coords.empty() || coords.size() > static_cast<std::size_t>(kMaxDimension)) {
    throw ContractViolation("point dimension must be in [1, " + std::to_string(kMaxDimension) + "]");
  }
  dim_ = static_cast<int>(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) coords_[i] = coords[i];
}

double Point::norm_squared() const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += coords_[i] * coords_[i];
  return s;
}

bool operator==(const Point& a, const Point& b) {
  if (a.dim_ != b.dim_) return false;
  for (int i = 0; i < a.dim_; ++i) {
    if (a.coords_[i] != b.coords_[i]) return false;
  }
  return true;
}

std::string_view to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::EuclideanBox: return "box";
    case WindowKind::EuclideanTorus: return "torus";
    case WindowKind::PoincareDisk: return "disk";
  }
  return "?";
}

WindowKind parse_window_kind(std::string_view text) {
  if (text == "box") return WindowKind::EuclideanBox;
  if (text == "torus") return WindowKind::EuclideanTorus;
  if (text == "disk") return WindowKind::PoincareDisk;
  throw ContractViolation("unknown window kind '" + std::string(text) + "' (expected box, torus or disk)");
}

double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

MetricWindow::MetricWindow(WindowKind kind, int dimension, double extent)
    : kind_(kind), dimension_(dimension), extent_(extent) {
  if (!(extent > 0.0) || !std::isfinite(extent)) throw ContractViolation("window extent must be positive and finite");
  if (dimension < 1 || dimension > kMaxDimension) throw ContractViolation("window dimension out of range");
  if (kind == WindowKind::PoincareDisk && dimension != 2) throw ContractViolation("the Poincare disk is two-dimensional");
}

void MetricWindow::check_dim(const Point& p) const {
  if (p.dim() != dimension_) {
    throw ContractViolation("point of dimension " + std::to_string(p.dim()) + " used in a " +
                            std::to_string(dimension_) + "-dimensional window");
  }
}

double MetricWindow::key(const Point& p, const Point& q) const {
  check_dim(p);
  check_dim(q);
  switch (kind_) {
    case WindowKind::EuclideanBox: {
      double s = 0.0;
      for (int i = 0; i < dimension_; ++i) {
        const double t = p[i] - q[i];
        s += t * t;
      }
      return s;
    }
    case WindowKind::EuclideanTorus: {
      double s = 0.0;
      for (int i = 0; i < dimension_; ++i) {
        double t = std::fabs(p[i] - q[i]);
        t = std::fmod(t, extent_);
        if (extent_ - t < t) t = extent_ - t;
        s += t * t;
      }
      return s;
    }
    case WindowKind::PoincareDisk: {
      double s = 0.0;
      for (int i = 0; i < 2; ++i) {
        const double t = p[i] - q[i];
        s += t * t;
      }
      return 2.0 * s / ((1.0 - p.norm_squared()) * (1.0 - q.norm_squared()));
    }
  }
  return 0.0;
}

double MetricWindow::key_for_radius(double r) const {
  if (kind_ == WindowKind::PoincareDisk) return std::cosh(r) - 1.0;
  return r * r;
}

double MetricWindow::radius_for_key(double k) const {
  if (kind_ == WindowKind::PoincareDisk) {
    // acosh(1 + k) without cancellation for small k
    return std::log1p(k + std::sqrt(k * (k + 2.0)));
  }
  return std::sqrt(k);
}

double MetricWindow::distance(const Point& p, const Point& q) const { return radius_for_key(key(p, q)); }

double MetricWindow::region_volume(double r) const {
  if (!(r >= 0.0)) throw ContractViolation("ball radius must be nonnegative");
  switch (kind_) {
    case WindowKind::EuclideanTorus:
      if (r >= extent_ / 2.0) {
        throw UnsupportedRadius("torus balls are only defined for radius < side/2");
      }
      [[fallthrough]];
    case WindowKind::EuclideanBox:
      return unit_ball_volume(dimension_) * std::pow(r, dimension_);
    case WindowKind::PoincareDisk:
      return 2.0 * std::numbers::pi * (std::cosh(r) - 1.0);
  }
  return 0.0;
}

double MetricWindow::volume() const {
  if (kind_ == WindowKind::PoincareDisk) return region_volume(extent_);
  return std::pow(extent_, dimension_);
}

double MetricWindow::diameter() const {
  switch (kind_) {
    case WindowKind::EuclideanBox: return extent_ * std::sqrt(static_cast<double>(dimension_));
    case WindowKind::EuclideanTorus: return extent_ / 2.0 * std::sqrt(static_cast<double>(dimension_));
    case WindowKind::PoincareDisk: return 2.0 * extent_;
  }
  return 0.0;
}

Point MetricWindow::canonicalize(const Point& p) const {
  check_dim(p);
  if (kind_ != WindowKind::EuclideanTorus) return p;
  Point out = p;
  for (int i = 0; i < dimension_; ++i) {
    double t = std::fmod(p[i], extent_);
    if (t < 0.0) t += extent_;
    // a tiny negative input rounds up to exactly extent_
    if (t >= extent_) t = 0.0;
    out[i] = t;
  }
  return out;
}

bool MetricWindow::contains(const Point& p) const {
  if (p.dim() != dimension_) return false;
  switch (kind_) {
    case WindowKind::EuclideanBox:
      for (int i = 0; i < dimension_; ++i) {
        if (!(p[i] >= 0.0 && p[i] <= extent_)) return false;
      }
      return true;
    case WindowKind::EuclideanTorus:
      for (int i = 0; i < dimension_; ++i) {
        if (!(p[i] >= 0.0 && p[i] < extent_)) return false;
      }
      return true;
    case WindowKind::PoincareDisk: {
      const double rho = disk_model_radius();
      return p.norm_squared() <= rho * rho * (1.0 + 1e-12);
    }
  }
  return false;
}

Point MetricWindow::center() const {
  std::array<double, kMaxDimension> c{};
  if (kind_ != WindowKind::PoincareDisk) c.fill(extent_ / 2.0);
  return Point(std::span<const double>(c.data(), static_cast<std::size_t>(dimension_)));
}

double MetricWindow::disk_model_radius() const { return std::tanh(extent_ / 2.0); }

}  // namespace ppfg
