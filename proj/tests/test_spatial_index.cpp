#include <doctest.h>

#include <algorithm>

#include "ppfg/spatial_index.hpp"
#include "support.hpp"

using namespace ppfg;

namespace {

std::vector<Neighbor> brute_knn(const PointConfiguration& cfg, PointId q, std::size_t k,
                                const std::vector<char>& skip) {
  std::vector<Neighbor> all;
  for (PointId j = 0; j < static_cast<PointId>(cfg.size()); ++j) {
    if (j != q && !skip[static_cast<std::size_t>(j)]) all.push_back({j, cfg.key(q, j)});
  }
  std::sort(all.begin(), all.end());
  if (all.size() > k) all.resize(k);
  return all;
}

}  // namespace

TEST_CASE("k-nearest queries agree with a full scan") {
  for (std::uint64_t t = 0; t < 36; ++t) {
    const MetricWindow w = support::window_for(t, 9.0);
    const std::size_t n = 40 + 40 * (t % 12);
    const auto cfg = support::random_config(w, n, t);
    const NeighborIndex index(cfg);
    CAPTURE(t);
    CAPTURE(index.uses_grid());
    std::vector<char> skip(n, 0);
    for (std::size_t i = 0; i < n; i += 3) skip[i] = 1;
    for (PointId q = 0; q < static_cast<PointId>(n); q += 7) {
      for (std::size_t k : {1u, 2u, 5u, 33u}) {
        const std::vector<char> none(n, 0);
        REQUIRE(index.k_nearest(q, k) == brute_knn(cfg, q, k, none));
        REQUIRE(index.k_nearest(q, k, [&](PointId id) { return skip[static_cast<std::size_t>(id)] != 0; }) ==
                brute_knn(cfg, q, k, skip));
      }
    }
  }
}

TEST_CASE("ball and shell queries agree with a full scan") {
  for (std::uint64_t t = 0; t < 24; ++t) {
    const MetricWindow w = support::window_for(t, 12.0);
    const auto cfg = support::random_config(w, 300, 100 + t);
    const NeighborIndex index(cfg);
    for (PointId c = 0; c < 300; c += 37) {
      for (double r : {0.3, 1.7, 4.0, 20.0}) {
        const double key = w.key_for_radius(r);
        std::vector<PointId> expect;
        for (PointId j = 0; j < 300; ++j) {
          if (cfg.key(c, j) <= key) expect.push_back(j);
        }
        std::vector<PointId> got;
        for (const auto& nb : index.within(cfg[c], key)) got.push_back(nb.id);
        REQUIRE(got == expect);

        const double lo = w.key_for_radius(r / 2);
        std::vector<PointId> shell_expect;
        for (PointId j = 0; j < 300; ++j) {
          const double k = cfg.key(c, j);
          if (k > lo && k < key) shell_expect.push_back(j);
        }
        std::vector<PointId> shell;
        for (const auto& nb : index.within_shell(cfg[c], lo, key)) shell.push_back(nb.id);
        REQUIRE(shell == shell_expect);
      }
    }
  }
}

TEST_CASE("subset index only sees its ids") {
  const auto cfg = support::random_config(MetricWindow::torus(2, 10), 200, 3);
  std::vector<PointId> evens;
  for (PointId i = 0; i < 200; i += 2) evens.push_back(i);
  const NeighborIndex index(cfg, evens);
  CHECK(index.size() == evens.size());
  for (PointId q : evens) {
    const auto nb = index.nearest(q);
    REQUIRE(nb);
    REQUIRE(nb->id % 2 == 0);
    REQUIRE(nb->id != q);
  }
}

TEST_CASE("single point has no neighbor") {
  const PointConfiguration cfg(MetricWindow::box(2, 1), {Point{0.5, 0.5}});
  CHECK_FALSE(NeighborIndex(cfg).nearest(0).has_value());
}
