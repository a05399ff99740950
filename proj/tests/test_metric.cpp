#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ppfg/metric.hpp"
#include "ppfg/random.hpp"

using namespace ppfg;

namespace {

Point random_point(const MetricWindow& w, Rng& rng) {
  if (w.kind() == WindowKind::PoincareDisk) {
    const double rho = w.disk_model_radius() * std::sqrt(rng.uniform01());
    const double phi = 2.0 * std::numbers::pi * rng.uniform01();
    return Point{rho * std::cos(phi), rho * std::sin(phi)};
  }
  std::vector<double> c;
  for (int a = 0; a < w.dimension(); ++a) c.push_back(rng.uniform(0.0, w.extent()));
  return Point(std::span<const double>(c));
}

}  // namespace

TEST_CASE("distance examples") {
  CHECK(MetricWindow::box(2, 10).distance(Point{0, 0}, Point{3, 4}) == doctest::Approx(5.0));
  CHECK(MetricWindow::torus(1, 10).distance(Point{1}, Point{9}) == doctest::Approx(2.0));
  CHECK(MetricWindow::disk(3).distance(Point{0, 0}, Point{0, 0}) == 0.0);
  const double d = MetricWindow::disk(3).distance(Point{0, 0}, Point{0.5, 0});
  CHECK(d == doctest::Approx(std::acosh(5.0 / 3.0)).epsilon(1e-14));
  // distance from the origin in the disk model is ln((1 + r) / (1 - r))
  CHECK(d == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK(d == doctest::Approx(1.0986).epsilon(1e-4));
}

TEST_CASE("dimension mismatch is a contract violation") {
  CHECK_THROWS_AS((void)MetricWindow::box(2, 1).distance(Point{0.0}, Point{0, 0}), ContractViolation);
  CHECK_THROWS_AS(MetricWindow(WindowKind::PoincareDisk, 3, 1.0), ContractViolation);
  CHECK_THROWS_AS(MetricWindow::box(2, 0.0), ContractViolation);
}

TEST_CASE("region volume") {
  CHECK(MetricWindow::box(2, 10).region_volume(1) == doctest::Approx(std::numbers::pi));
  CHECK(MetricWindow::box(3, 10).region_volume(2) == doctest::Approx(32.0 * std::numbers::pi / 3.0));
  CHECK(MetricWindow::disk(3).region_volume(1) == doctest::Approx(2.0 * std::numbers::pi * (std::cosh(1.0) - 1.0)));
  CHECK(MetricWindow::disk(3).region_volume(1) == doctest::Approx(3.4123).epsilon(1e-4));
  CHECK(MetricWindow::torus(2, 10).region_volume(4.9) == doctest::Approx(std::numbers::pi * 4.9 * 4.9));
  CHECK_THROWS_AS((void)MetricWindow::torus(2, 10).region_volume(5.0), UnsupportedRadius);
}

TEST_CASE("hyperbolic area of a unit ball by Monte-Carlo integration of the disk-model density") {
  // area element 4 / (1 - |x|^2)^2 over the Euclidean disk of radius tanh(1/2)
  const double rho = std::tanh(0.5);
  Rng rng(2024);
  const int samples = 400'000;
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = rng.uniform(-rho, rho);
    const double y = rng.uniform(-rho, rho);
    const double s = x * x + y * y;
    if (s < rho * rho) sum += 4.0 / ((1.0 - s) * (1.0 - s));
  }
  const double estimate = sum / samples * (2 * rho) * (2 * rho);
  CHECK(estimate == doctest::Approx(MetricWindow::disk(3).region_volume(1.0)).epsilon(0.01));
}

TEST_CASE("canonicalize") {
  const auto t = MetricWindow::torus(2, 10);
  CHECK(t.canonicalize(Point{12, -3}) == Point{2, 7});
  CHECK(MetricWindow::box(2, 10).canonicalize(Point{1, 1}) == Point{1, 1});
  CHECK(MetricWindow::torus(2, 1).canonicalize(Point{1.0, 0.5}) == Point{0.0, 0.5});
  const Point tiny = MetricWindow::torus(1, 1).canonicalize(Point{-1e-300});
  CHECK(tiny[0] >= 0.0);
  CHECK(tiny[0] < 1.0);
}

TEST_CASE("metric axioms on random triples in every window kind") {
  const MetricWindow windows[] = {MetricWindow::box(1, 7),   MetricWindow::box(2, 7),   MetricWindow::box(3, 7),
                                  MetricWindow::torus(1, 7), MetricWindow::torus(2, 7), MetricWindow::torus(3, 7),
                                  MetricWindow::disk(4)};
  for (const auto& w : windows) {
    CAPTURE(to_string(w.kind()));
    CAPTURE(w.dimension());
    Rng rng(11 + static_cast<std::uint64_t>(w.dimension()));
    for (int i = 0; i < 10'000; ++i) {
      const Point p = random_point(w, rng);
      const Point q = random_point(w, rng);
      const Point r = random_point(w, rng);
      const double pq = w.distance(p, q);
      REQUIRE(pq == w.distance(q, p));
      REQUIRE(w.distance(p, p) == 0.0);
      REQUIRE((pq == 0.0) == (p == q));
      const double lhs = w.distance(p, r);
      const double rhs = pq + w.distance(q, r);
      REQUIRE(lhs <= rhs + 1e-9 * std::max(1.0, rhs));
      REQUIRE(w.radius_for_key(w.key(p, q)) == doctest::Approx(pq).epsilon(1e-9));
    }
  }
}

TEST_CASE("torus distance bounded by half-diagonal and invariant under adding the side") {
  const auto w = MetricWindow::torus(3, 5);
  Rng rng(5);
  for (int i = 0; i < 10'000; ++i) {
    const Point p = random_point(w, rng);
    const Point q = random_point(w, rng);
    const double d = w.distance(p, q);
    REQUIRE(d <= 2.5 * std::sqrt(3.0) + 1e-12);
    Point shifted = p;
    const int axis = static_cast<int>(rng.uniform_index(3));
    shifted[axis] += rng.uniform01() < 0.5 ? 5.0 : -5.0;
    REQUIRE(w.distance(shifted, q) == doctest::Approx(d).epsilon(1e-12));
    REQUIRE(w.distance(q, shifted) == doctest::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("hyperbolic distance invariant under rotations about the origin") {
  const auto w = MetricWindow::disk(5);
  Rng rng(99);
  for (int i = 0; i < 10'000; ++i) {
    const Point p = random_point(w, rng);
    const Point q = random_point(w, rng);
    const double theta = 2.0 * std::numbers::pi * rng.uniform01();
    auto rot = [&](const Point& x) {
      return Point{std::cos(theta) * x[0] - std::sin(theta) * x[1], std::sin(theta) * x[0] + std::cos(theta) * x[1]};
    };
    REQUIRE(w.distance(rot(p), rot(q)) == doctest::Approx(w.distance(p, q)).epsilon(1e-9));
  }
}

TEST_CASE("key is monotone in distance and matches key_for_radius") {
  for (const auto& w : {MetricWindow::box(2, 10), MetricWindow::disk(3)}) {
    CHECK(w.key_for_radius(1.0) < w.key_for_radius(1.5));
    const Point o = w.kind() == WindowKind::PoincareDisk ? Point{0, 0} : Point{1, 1};
    const Point p = w.kind() == WindowKind::PoincareDisk ? Point{0.5, 0} : Point{4, 5};
    CHECK(w.key(o, p) == doctest::Approx(w.key_for_radius(w.distance(o, p))).epsilon(1e-12));
  }
}

TEST_CASE("window kind names") {
  CHECK(parse_window_kind("box") == WindowKind::EuclideanBox);
  CHECK(parse_window_kind("torus") == WindowKind::EuclideanTorus);
  CHECK(parse_window_kind("disk") == WindowKind::PoincareDisk);
  CHECK_THROWS_AS((void)parse_window_kind("sphere"), ContractViolation);
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
}
