#include <doctest.h>

#include <algorithm>
#include <functional>
#include <numeric>

#include "ppfg/analysis.hpp"
#include "ppfg/mnn.hpp"
#include "ppfg/oracle.hpp"
#include "support.hpp"

using namespace ppfg;

namespace {

struct Simulated {
  Matching matching;
  std::vector<int> round_of;
  int rounds = 0;
};

// Full rescans: each round recomputes every active point's nearest active point.
Simulated simulate(const PointConfiguration& cfg) {
  const std::size_t n = cfg.size();
  Simulated s{Matching::empty(n), std::vector<int>(n, 0), 0};
  std::vector<PointId> active(n);
  std::iota(active.begin(), active.end(), 0);
  while (active.size() >= 2) {
    std::vector<PointId> nn(n, -1);
    for (PointId a : active) {
      for (PointId b : active) {
        if (a == b) continue;
        const auto ua = static_cast<std::size_t>(a);
        if (nn[ua] < 0 || cfg.pair_order(a, b) < cfg.pair_order(a, nn[ua])) nn[ua] = b;
      }
    }
    ++s.rounds;
    std::vector<PointId> next;
    for (PointId a : active) {
      const PointId b = nn[static_cast<std::size_t>(a)];
      if (nn[static_cast<std::size_t>(b)] == a) {
        if (a < b) {
          s.matching.match(a, b);
          s.round_of[static_cast<std::size_t>(a)] = s.round_of[static_cast<std::size_t>(b)] = s.rounds;
        }
      } else {
        next.push_back(a);
      }
    }
    active = std::move(next);
  }
  return s;
}

// Longest sequence of distinct points with strictly decreasing consecutive distances.
std::size_t exhaustive_chain(const PointConfiguration& cfg) {
  const auto n = static_cast<PointId>(cfg.size());
  std::vector<bool> used(cfg.size(), false);
  std::size_t best = 0;
  std::function<void(PointId, double, std::size_t)> walk = [&](PointId at, double last, std::size_t steps) {
    best = std::max(best, steps);
    for (PointId b = 0; b < n; ++b) {
      const double k = cfg.key(at, b);
      if (used[static_cast<std::size_t>(b)] || k <= 0.0 || k >= last) continue;
      used[static_cast<std::size_t>(b)] = true;
      walk(b, k, steps + 1);
      used[static_cast<std::size_t>(b)] = false;
    }
  };
  for (PointId a = 0; a < n; ++a) {
    used[static_cast<std::size_t>(a)] = true;
    walk(a, std::numeric_limits<double>::infinity(), 0);
    used[static_cast<std::size_t>(a)] = false;
  }
  return best;
}

bool valid_chain(const PointConfiguration& cfg, const std::vector<PointId>& chain) {
  std::vector<PointId> sorted = chain;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
  for (std::size_t i = 2; i < chain.size(); ++i) {
    if (!(cfg.key(chain[i - 1], chain[i]) < cfg.key(chain[i - 2], chain[i - 1]))) return false;
  }
  return true;
}

std::vector<PointId> all_ids(const PointConfiguration& cfg) {
  std::vector<PointId> ids(cfg.size());
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

}  // namespace

TEST_CASE("mutually closest pairs and the nearest-neighbor digraph") {
  const auto cfg = support::line({0.0, 1.0, 2.2, 4.0});
  const auto ids = all_ids(cfg);
  CHECK(mutually_closest_pairs(cfg, ids) == std::vector<Edge>{{0, 1}});
  const auto g = nearest_neighbor_digraph(cfg, ids);
  CHECK(g.graph.directed);
  CHECK(g.graph.edges == std::vector<Edge>{{0, 1}, {1, 0}, {2, 1}, {3, 2}});
  CHECK(g.two_cycles == std::vector<Edge>{{0, 1}});
  CHECK(mutual_region_empty(cfg, ids, 0, 1));
  CHECK_FALSE(mutual_region_empty(cfg, ids, 2, 3));
  const std::vector<PointId> rest{2, 3};
  CHECK(mutual_region_empty(cfg, rest, 2, 3));
}

TEST_CASE("iterated matching example") {
  const auto cfg = support::line({0.0, 1.0, 2.2, 4.0});
  const auto r = iterated_mnn_matching(cfg);
  CHECK(r.rounds == 2);
  CHECK(r.matching.pairs() == std::vector<Edge>{{0, 1}, {2, 3}});
  CHECK(r.round_of == std::vector<int>{1, 1, 2, 2});
  CHECK(r.leftover.empty());
  CHECK(r.annihilation_time(cfg, 2) == doctest::Approx(0.9));
  CHECK(r.annihilation_time(cfg, 0) == doctest::Approx(0.5));

  const auto odd = iterated_mnn_matching(support::line({0.0, 1.0, 5.0}));
  CHECK(odd.leftover == std::vector<PointId>{2});
  CHECK(odd.rounds == 1);
  CHECK(iterated_mnn_matching(support::line({3.0})).rounds == 0);
}

TEST_CASE("descending chain examples") {
  const auto four = find_descending_chains(support::line({0.0, 4.0, 6.0, 7.0}), 0);
  CHECK(four.length == 3);
  CHECK(four.longest.size() == 4);
  CHECK_FALSE(four.lower_bound);
  CHECK(find_descending_chains(support::line({0.0, 2.0}), 0).length == 1);
  CHECK(find_descending_chains(support::line({1.0}), 0).length == 0);

  // repeated halving gaps from a fixed base
  const auto base = sample_poisson(MetricWindow::torus(2, 10), 1.0, 12);
  const auto rich = enrich_descending_chains(base, 5, 0.5, 12);
  const auto rep = find_descending_chains(rich);
  CHECK(rep.length >= 5);
  CHECK(valid_chain(rich, rep.longest));
}

TEST_CASE("iterated matching: parity, round one, monotone round keys") {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const auto w = support::window_for(s, 10.0);
    const auto cfg = support::random_config(w, 1 + 7 * s, 400 + s);
    const auto ids = all_ids(cfg);
    const auto r = iterated_mnn_matching(cfg);
    CAPTURE(s);
    const auto rep = verify_matching(r.matching, cfg.size());
    REQUIRE(rep.unmatched == cfg.size() % 2);
    REQUIRE(r.leftover.size() == cfg.size() % 2);

    std::vector<Edge> first;
    for (const auto& [u, v] : r.matching.pairs()) {
      if (r.round_of[static_cast<std::size_t>(u)] == 1) first.push_back({u, v});
    }
    REQUIRE(first == mutually_closest_pairs(cfg, ids));
    REQUIRE(static_cast<int>(r.round_min_key.size()) == r.rounds);
    REQUIRE(std::is_sorted(r.round_min_key.begin(), r.round_min_key.end()));
  }
}

TEST_CASE("iterated matching agrees with the full-rescan simulator and the library oracle") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto w = support::window_for(s, 12.0);
    const auto cfg = support::random_config(w, 20 + 16 * s, 4000 + s);
    const auto r = iterated_mnn_matching(cfg);
    const auto sim = simulate(cfg);
    const auto lib = oracle::mnn(cfg);
    CAPTURE(s);
    REQUIRE(r.matching == sim.matching);
    REQUIRE(r.round_of == sim.round_of);
    REQUIRE(r.rounds == sim.rounds);
    REQUIRE(r.matching == lib.matching);
    REQUIRE(r.rounds == lib.rounds);
  }
}

TEST_CASE("subset matching ignores points outside the subset") {
  const auto cfg = support::random_config(MetricWindow::torus(2, 10), 120, 8);
  std::vector<PointId> odd;
  for (PointId i = 1; i < 120; i += 2) odd.push_back(i);
  const auto r = iterated_mnn_matching(cfg, odd);
  std::vector<Point> pts;
  for (PointId i : odd) pts.push_back(cfg[i]);
  const auto alone = iterated_mnn_matching(PointConfiguration(cfg.window(), pts));
  for (std::size_t j = 0; j < odd.size(); ++j) {
    REQUIRE(r.round_of[static_cast<std::size_t>(odd[j])] == alone.round_of[j]);
    const auto p = alone.matching.partner[j];
    REQUIRE(r.matching.partner[static_cast<std::size_t>(odd[j])] == std::optional<PointId>(odd[static_cast<std::size_t>(*p)]));
  }
  for (PointId i = 0; i < 120; i += 2) REQUIRE_FALSE(r.matching.is_matched(i));
}

TEST_CASE("mutual empty region coincides with mutual closeness for distinct distances") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto cfg = support::random_config(support::window_for(s, 6.0), 40, 70 + s);
    const auto ids = all_ids(cfg);
    const auto mutual = mutually_closest_pairs(cfg, ids);
    for (PointId x = 0; x < 40; ++x) {
      for (PointId y = x + 1; y < 40; ++y) {
        const bool expected = std::find(mutual.begin(), mutual.end(), Edge{x, y}) != mutual.end();
        REQUIRE(mutual_region_empty(cfg, ids, x, y) == expected);
      }
    }
  }
}

TEST_CASE("longest descending chain equals exhaustive search for n <= 10") {
  for (std::uint64_t s = 0; s < 150; ++s) {
    const auto w = support::window_for(s, 5.0);
    const std::size_t n = 2 + s % 9;
    const auto cfg = support::random_config(w, n, 9000 + s);
    const auto rep = find_descending_chains(cfg, 0);
    CAPTURE(s);
    REQUIRE(rep.length == exhaustive_chain(cfg));
    REQUIRE(rep.length == oracle::longest_chain(cfg));
    REQUIRE(rep.longest.size() == rep.length + 1);
    REQUIRE(valid_chain(cfg, rep.longest));
    REQUIRE_FALSE(rep.lower_bound);
  }
}

TEST_CASE("chains and matching on the hyperbolic disk") {
  const auto w = MetricWindow::disk(3.0);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto cfg = support::random_config(w, 9, 60 + s);
    const auto rep = find_descending_chains(cfg, 0);
    REQUIRE(rep.length == exhaustive_chain(cfg));
    REQUIRE(iterated_mnn_matching(cfg).matching == simulate(cfg).matching);
  }
}

TEST_CASE("pair cap reports a lower bound when it can hide a chain") {
  const auto cfg = support::random_config(MetricWindow::torus(2, 20), 400, 2);
  const auto capped = find_descending_chains(cfg, 4);
  const auto full = find_descending_chains(cfg, 0);
  CHECK(capped.length <= full.length);
  CHECK(valid_chain(cfg, capped.longest));
  CHECK(valid_chain(cfg, full.longest));
  if (capped.length < full.length) CHECK(capped.lower_bound);
}
