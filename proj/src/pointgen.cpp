#include "ppfg/pointgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ppfg/random.hpp"

namespace ppfg {

PointConfiguration::PointConfiguration(MetricWindow window, std::vector<Point> points, std::uint64_t rng_seed)
    : window_(window), points_(std::move(points)), rng_seed_(rng_seed) {
  if (points_.size() > static_cast<std::size_t>(std::numeric_limits<PointId>::max())) {
    throw ContractViolation("too many points");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].dim() != window_.dimension()) {
      throw ContractViolation("point " + std::to_string(i) + " has the wrong dimension");
    }
    points_[i] = window_.canonicalize(points_[i]);
    if (!window_.contains(points_[i])) {
      throw ContractViolation("point " + std::to_string(i) + " lies outside the window");
    }
  }
}

namespace {

Point uniform_point(const MetricWindow& w, Rng& rng) {
  std::array<double, kMaxDimension> c{};
  const auto d = static_cast<std::size_t>(w.dimension());
  if (w.kind() == WindowKind::PoincareDisk) {
    // hyperbolic radius has CDF (cosh r - 1) / (cosh R - 1)
    const double u = rng.uniform01();
    const double theta = 2.0 * std::numbers::pi * rng.uniform01();
    const double r = std::acosh(1.0 + u * (std::cosh(w.extent()) - 1.0));
    const double e = std::tanh(r / 2.0);
    c[0] = e * std::cos(theta);
    c[1] = e * std::sin(theta);
  } else {
    for (std::size_t i = 0; i < d; ++i) c[i] = w.extent() * rng.uniform01();
  }
  return Point(std::span<const double>(c.data(), d));
}

double snap(double x) { return std::nearbyint(x / kLatticeSnap) * kLatticeSnap; }

}  // namespace

PointConfiguration sample_poisson(const MetricWindow& w, double intensity, std::uint64_t seed) {
  if (!(intensity > 0.0) || !std::isfinite(intensity)) throw ContractViolation("intensity must be positive");
  const double mean = intensity * w.volume();
  if (!std::isfinite(mean)) throw ContractViolation("expected point count is not finite");
  Rng rng(seed);
  const std::uint64_t n = rng.poisson(mean);
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) pts.push_back(uniform_point(w, rng));
  return PointConfiguration(w, std::move(pts), seed);
}

PointConfiguration sample_uniform(const MetricWindow& w, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.push_back(uniform_point(w, rng));
  return PointConfiguration(w, std::move(pts), seed);
}

PointConfiguration perturbed_lattice(int d, int side, std::uint64_t seed) {
  if (d < 1 || d > 3) throw ContractViolation("perturbed lattice supports d in {1, 2, 3}");
  if (side < 1) throw ContractViolation("lattice side must be a positive integer");
  const auto w = MetricWindow::torus(d, side);
  Rng rng(seed);
  std::array<double, 3> shift{};
  for (int i = 0; i < d; ++i) shift[static_cast<std::size_t>(i)] = snap(rng.uniform01());

  // Rotated basis vectors are snapped once; every point is then an exact
  // small-integer combination, so lattice-congruent pairs stay bit-equal.
  std::array<std::array<double, 3>, 3> basis{};
  for (int i = 0; i < d; ++i) basis[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
  if (d == 2) {
    const double theta = 2.0 * std::numbers::pi * rng.uniform01();
    basis[0] = {snap(std::cos(theta)), snap(std::sin(theta)), 0.0};
    basis[1] = {snap(-std::sin(theta)), snap(std::cos(theta)), 0.0};
  }
  const double half = side / 2.0;

  std::vector<Point> pts;
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(side);
  pts.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::array<double, 3> rel{};  // lattice index relative to the center
    std::size_t rest = flat;
    std::array<double, 3> idx{};
    for (int i = 0; i < d; ++i) {
      idx[static_cast<std::size_t>(i)] = static_cast<double>(rest % static_cast<std::size_t>(side));
      rest /= static_cast<std::size_t>(side);
    }
    for (int a = 0; a < d; ++a) {
      double v = 0.0;
      for (int b = 0; b < d; ++b) {
        v += (idx[static_cast<std::size_t>(b)] - half) * basis[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)];
      }
      rel[static_cast<std::size_t>(a)] = v + half + shift[static_cast<std::size_t>(a)];
    }
    pts.push_back(w.canonicalize(Point(std::span<const double>(rel.data(), static_cast<std::size_t>(d)))));
  }
  return PointConfiguration(w, std::move(pts), seed);
}

PointConfiguration enrich_descending_chains(const PointConfiguration& cfg, int chain_length, double ratio,
                                            std::uint64_t seed) {
  if (cfg.empty()) throw ContractViolation("cannot enrich an empty configuration");
  if (chain_length < 2) throw ContractViolation("chain_length must be at least 2");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ContractViolation("ratio must lie in (0, 1)");
  constexpr int kMaxTries = 64;

  const MetricWindow& w = cfg.window();
  const int d = w.dimension();
  Rng rng(seed);
  const auto anchor = static_cast<PointId>(rng.uniform_index(cfg.size()));
  const Point& a = cfg[anchor];

  double nn = w.diameter() / 8.0;  // lone point: no neighbor to measure against
  if (cfg.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    for (PointId j = 0; j < static_cast<PointId>(cfg.size()); ++j) {
      if (j != anchor) best = std::min(best, cfg.key(anchor, j));
    }
    nn = w.radius_for_key(best);
  }
  const double g = nn / 2.0;
  // Euclidean step length in model coordinates; the disk's conformal factor is 2/(1-|x|^2)
  const double step0 = w.is_euclidean() ? g : g * (1.0 - a.norm_squared()) / 2.0;

  for (int attempt = 0; attempt < kMaxTries; ++attempt) {
    std::array<double, kMaxDimension> dir{};
    double norm = 0.0;
    do {
      norm = 0.0;
      for (int i = 0; i < d; ++i) {
        // Box-Muller; only the direction matters
        const double u1 = 1.0 - rng.uniform01();
        const double u2 = rng.uniform01();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        dir[static_cast<std::size_t>(i)] = z;
        norm += z * z;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (int i = 0; i < d; ++i) dir[static_cast<std::size_t>(i)] /= norm;

    std::vector<Point> chain;
    Point cur = a;
    double step = step0;
    bool ok = true;
    for (int s = 0; s < chain_length; ++s) {
      Point next = cur;
      for (int i = 0; i < d; ++i) next[i] = cur[i] + step * dir[static_cast<std::size_t>(i)];
      next = w.canonicalize(next);
      if (!w.contains(next)) {
        ok = false;
        break;
      }
      chain.push_back(next);
      cur = next;
      step *= ratio;
    }
    if (!ok) continue;
    // the steps must realize a strictly decreasing sequence in the window metric
    double prev = w.key(a, chain[0]);
    for (std::size_t s = 1; s < chain.size() && ok; ++s) {
      const double k = w.key(chain[s - 1], chain[s]);
      ok = k > 0.0 && k < prev;
      prev = k;
    }
    if (!ok) continue;

    std::vector<Point> pts = cfg.points();
    pts.insert(pts.end(), chain.begin(), chain.end());
    return PointConfiguration(w, std::move(pts), cfg.rng_seed());
  }
  throw ContractViolation("could not place a descending chain inside the window after " +
                          std::to_string(kMaxTries) + " directions");
}

NonEquidistanceReport check_non_equidistant(const PointConfiguration& cfg) {
  NonEquidistanceReport report;
  const auto n = static_cast<PointId>(cfg.size());
  std::vector<double> keys;
  keys.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(std::max(n - 1, 0)) / 2);
  for (PointId i = 0; i < n; ++i) {
    for (PointId j = i + 1; j < n; ++j) keys.push_back(cfg.key(i, j));
  }
  std::sort(keys.begin(), keys.end());
  std::optional<double> repeated;
  for (std::size_t t = 1; t < keys.size(); ++t) {
    if (keys[t] > 0.0 && keys[t] == keys[t - 1]) {
      repeated = keys[t];
      break;
    }
  }
  if (!repeated) return report;

  std::vector<std::array<PointId, 2>> hits;
  for (PointId i = 0; i < n && hits.size() < 2; ++i) {
    for (PointId j = i + 1; j < n && hits.size() < 2; ++j) {
      if (cfg.key(i, j) == *repeated) hits.push_back({i, j});
    }
  }
  report.holds = false;
  report.witness = std::array<PointId, 4>{hits[0][0], hits[0][1], hits[1][0], hits[1][1]};
  report.witness_distance = cfg.window().radius_for_key(*repeated);
  return report;
}

}  // namespace ppfg
