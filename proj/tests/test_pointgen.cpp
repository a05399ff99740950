#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "ppfg/mnn.hpp"
#include "ppfg/pointgen.hpp"
#include "ppfg/random.hpp"
#include "support.hpp"

using namespace ppfg;

namespace {

std::pair<double, double> mean_variance(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  return {m, v / static_cast<double>(xs.size() - 1)};
}

}  // namespace

TEST_CASE("rng is reproducible and seeds split") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 10'000; ++i) seeds.insert(derive_seed(7, i));
  CHECK(seeds.size() == 10'000);
  CHECK(derive_seed(7, 0) != derive_seed(8, 0));
  Rng c(1);
  for (int i = 0; i < 10'000; ++i) {
    const double u = c.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(c.uniform_index(7) < 7);
  }
}

TEST_CASE("poisson counts have matching mean and variance on both sampler branches") {
  for (double mean : {0.5, 4.0, 29.0, 30.0, 100.0, 2500.0}) {
    CAPTURE(mean);
    Rng rng(static_cast<std::uint64_t>(mean * 1000));
    std::vector<double> xs;
    for (int i = 0; i < 40'000; ++i) xs.push_back(static_cast<double>(rng.poisson(mean)));
    const auto [m, v] = mean_variance(xs);
    const double se = std::sqrt(mean / 40'000.0);
    CHECK(std::fabs(m - mean) < 5 * se);
    CHECK(v == doctest::Approx(mean).epsilon(0.05));
  }
  CHECK(poisson_algorithm(29.9) == "inversion");
  CHECK(poisson_algorithm(30.0) == "ptrs-hormann-1993");
  Rng rng(3);
  CHECK(rng.poisson(0.0) == 0);
}

TEST_CASE("sample_poisson: count moments on the 10x10 torus") {
  const auto w = MetricWindow::torus(2, 10);
  std::vector<double> counts;
  for (std::uint64_t i = 0; i < 1000; ++i) counts.push_back(static_cast<double>(sample_poisson(w, 1.0, derive_seed(2024, i)).size()));
  const auto [m, v] = mean_variance(counts);
  CHECK(m >= 99.0);
  CHECK(m <= 101.0);
  CHECK(v >= 85.0);
  CHECK(v <= 115.0);
}

TEST_CASE("sample_poisson: void probability") {
  const auto w = MetricWindow::box(1, 1.0);  // volume 1
  int empty = 0;
  const int trials = 40'000;
  for (int i = 0; i < trials; ++i) empty += sample_poisson(w, 1.0, derive_seed(5, static_cast<std::uint64_t>(i))).empty();
  CHECK(static_cast<double>(empty) / trials == doctest::Approx(std::exp(-1.0)).epsilon(0.02));
}

TEST_CASE("sample_poisson: determinism, validation, containment") {
  const auto w = MetricWindow::torus(2, 10);
  const auto a = sample_poisson(w, 1.0, 42);
  const auto b = sample_poisson(w, 1.0, 42);
  CHECK(a.points() == b.points());
  CHECK(a.rng_seed() == 42);
  CHECK_THROWS_AS((void)sample_poisson(w, 0.0, 1), ContractViolation);
  CHECK_THROWS_AS((void)sample_poisson(w, -1.0, 1), ContractViolation);
  for (const auto& p : a.points()) REQUIRE(w.contains(p));
}

TEST_CASE("disk samples are uniform in hyperbolic area") {
  const double R = 3.0;
  const auto w = MetricWindow::disk(R);
  std::vector<double> radii;
  for (std::uint64_t s = 0; s < 40; ++s) {
    const auto cfg = sample_poisson(w, 5.0, s);
    for (const auto& p : cfg.points()) radii.push_back(w.distance(Point{0, 0}, p));
  }
  REQUIRE(radii.size() > 10'000);
  for (double r : {0.5, 1.5, 2.5}) {
    const double expected = (std::cosh(r) - 1.0) / (std::cosh(R) - 1.0);
    const double got = static_cast<double>(std::count_if(radii.begin(), radii.end(), [&](double x) { return x < r; })) /
                       static_cast<double>(radii.size());
    CHECK(got == doctest::Approx(expected).epsilon(0.05));
  }
  for (double r : radii) REQUIRE(r <= R + 1e-9);
}

TEST_CASE("PointConfiguration canonicalizes torus points and rejects points outside a box") {
  const PointConfiguration t(MetricWindow::torus(1, 10), {Point{12.0}, Point{-3.0}});
  CHECK(t[0][0] == 2.0);
  CHECK(t[1][0] == 7.0);
  CHECK_THROWS_AS(PointConfiguration(MetricWindow::box(1, 10), {Point{11.0}}), ContractViolation);
  CHECK_THROWS_AS(PointConfiguration(MetricWindow::box(2, 10), {Point{1.0}}), ContractViolation);
  CHECK_THROWS_AS(PointConfiguration(MetricWindow::disk(1), {Point{0.9, 0.0}}), ContractViolation);
}

TEST_CASE("perturbed lattice") {
  SUBCASE("d = 1 is a translate of the integers") {
    const auto cfg = perturbed_lattice(1, 4, 17);
    REQUIRE(cfg.size() == 4);
    std::vector<double> xs;
    for (const auto& p : cfg.points()) xs.push_back(p[0]);
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 1; i < xs.size(); ++i) CHECK(xs[i] - xs[i - 1] == doctest::Approx(1.0));
    CHECK(xs.front() < 1.0);
  }
  for (int d = 1; d <= 3; ++d) {
    CAPTURE(d);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto cfg = perturbed_lattice(d, 5, s);
      REQUIRE(cfg.size() == static_cast<std::size_t>(std::pow(5, d)));
      const auto r = check_non_equidistant(cfg);
      REQUIRE_FALSE(r.holds);
      REQUIRE(r.witness.has_value());
      const auto [a, b, c, e] = *r.witness;
      REQUIRE(cfg.key(a, b) == cfg.key(c, e));
      REQUIRE(cfg.key(a, b) > 0.0);
      REQUIRE(std::minmax(a, b) != std::minmax(c, e));
    }
  }
  CHECK_THROWS_AS((void)perturbed_lattice(4, 3, 1), ContractViolation);
  CHECK_THROWS_AS((void)perturbed_lattice(2, 0, 1), ContractViolation);
}

TEST_CASE("check_non_equidistant examples") {
  const auto square = support::plane({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  const auto r = check_non_equidistant(square);
  CHECK_FALSE(r.holds);
  REQUIRE(r.witness);
  const auto [w, x, y, z] = *r.witness;
  CHECK(square.distance(w, x) == square.distance(y, z));
  CHECK(r.witness_distance == doctest::Approx(1.0));

  CHECK(check_non_equidistant(support::plane({{0, 0}, {1, 0}, {3, 0}})).holds);

  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto cfg = sample_poisson(MetricWindow::torus(2, 10), 1.0, derive_seed(77, s));
    REQUIRE(check_non_equidistant(cfg).holds);
  }
}

TEST_CASE("enrich_descending_chains") {
  const auto base = sample_poisson(MetricWindow::torus(2, 10), 1.0, 8);
  const auto out = enrich_descending_chains(base, 3, 0.5, 99);
  REQUIRE(out.size() == base.size() + 3);
  for (PointId i = 0; i < static_cast<PointId>(base.size()); ++i) REQUIRE(out[i] == base[i]);

  // the appended points continue a segment from some anchor with gaps g, g/2, g/4
  const auto n = static_cast<PointId>(base.size());
  const double g1 = out.distance(n, n + 1);
  const double g2 = out.distance(n + 1, n + 2);
  CHECK(g1 / g2 == doctest::Approx(2.0).epsilon(1e-9));
  bool anchored = false;
  for (PointId a = 0; a < n; ++a) {
    if (out.distance(a, n) == doctest::Approx(2.0 * g1).epsilon(1e-9)) anchored = true;
  }
  CHECK(anchored);
  CHECK(find_descending_chains(out).length >= 3);

  const auto two = enrich_descending_chains(support::plane({{10, 10}, {12, 10}}), 2, 0.5, 1);
  CHECK(two.size() == 4);

  CHECK_THROWS_AS((void)enrich_descending_chains(base, 1, 0.5, 1), ContractViolation);
  CHECK_THROWS_AS((void)enrich_descending_chains(base, 3, 1.0, 1), ContractViolation);
  CHECK_THROWS_AS((void)enrich_descending_chains(PointConfiguration(MetricWindow::box(1, 1), {}), 3, 0.5, 1),
                  ContractViolation);
}

TEST_CASE("enrichment stays inside a box and on the disk") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto box = sample_poisson(MetricWindow::box(2, 6), 1.0, s);
    if (box.empty()) continue;
    const auto out = enrich_descending_chains(box, 5, 0.6, s);
    for (const auto& p : out.points()) REQUIRE(box.window().contains(p));
    REQUIRE(find_descending_chains(out).length >= 5);
  }
  const auto disk = sample_poisson(MetricWindow::disk(3), 1.0, 4);
  REQUIRE_FALSE(disk.empty());
  const auto out = enrich_descending_chains(disk, 5, 0.5, 4);
  CHECK(find_descending_chains(out).length >= 5);
}
