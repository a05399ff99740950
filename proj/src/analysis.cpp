#include "ppfg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ppfg/spatial_index.hpp"

namespace ppfg {

GraphReport verify_graph(const FactorGraph& g) {
  g.validate();
  GraphReport r;
  r.edge_count = g.edges.size();
  const std::size_t n = g.n;
  std::vector<std::vector<PointId>> undirected(n);
  std::vector<std::vector<PointId>> out(n);
  std::vector<std::size_t> degree(n, 0);
  for (const auto& [u, v] : g.edges) {
    undirected[static_cast<std::size_t>(u)].push_back(v);
    undirected[static_cast<std::size_t>(v)].push_back(u);
    out[static_cast<std::size_t>(u)].push_back(v);
    ++degree[static_cast<std::size_t>(u)];
    ++degree[static_cast<std::size_t>(v)];
  }
  for (std::size_t d : degree) {
    ++r.degree_histogram[d];
    r.max_degree = std::max(r.max_degree, d);
  }

  std::vector<char> seen(n, 0);
  std::vector<PointId> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++r.component_count;
    std::size_t vertices = 0;
    std::size_t degree_sum = 0;
    seen[s] = 1;
    stack.push_back(static_cast<PointId>(s));
    while (!stack.empty()) {
      const PointId v = stack.back();
      stack.pop_back();
      ++vertices;
      degree_sum += undirected[static_cast<std::size_t>(v)].size();
      for (PointId w : undirected[static_cast<std::size_t>(v)]) {
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          stack.push_back(w);
        }
      }
    }
    if (!g.directed && degree_sum / 2 != vertices - 1) r.acyclic = false;
  }
  r.connected = r.component_count <= 1;

  if (g.directed) {
    // three-colour DFS for directed cycles
    std::vector<char> colour(n, 0);
    for (std::size_t s = 0; s < n && r.acyclic; ++s) {
      if (colour[s]) continue;
      std::vector<std::pair<PointId, std::size_t>> frames{{static_cast<PointId>(s), 0}};
      colour[s] = 1;
      while (!frames.empty() && r.acyclic) {
        auto& [v, next] = frames.back();
        const auto& adj = out[static_cast<std::size_t>(v)];
        if (next == adj.size()) {
          colour[static_cast<std::size_t>(v)] = 2;
          frames.pop_back();
          continue;
        }
        const PointId w = adj[next++];
        if (colour[static_cast<std::size_t>(w)] == 1) {
          r.acyclic = false;
        } else if (colour[static_cast<std::size_t>(w)] == 0) {
          colour[static_cast<std::size_t>(w)] = 1;
          frames.emplace_back(w, 0);
        }
      }
    }
  }
  return r;
}

MatchingReport verify_matching(const Matching& m, std::size_t n) {
  if (m.partner.size() != n) throw ContractViolation("partner map size does not match the point count");
  MatchingReport r;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = m.partner[i];
    if (!p) {
      ++r.unmatched;
      continue;
    }
    if (*p < 0 || static_cast<std::size_t>(*p) >= n) throw ContractViolation("partner id out of range");
    if (static_cast<std::size_t>(*p) == i) throw ContractViolation("point " + std::to_string(i) + " matched to itself");
    const auto& back = m.partner[static_cast<std::size_t>(*p)];
    if (!back || static_cast<std::size_t>(*back) != i) {
      throw ContractViolation("asymmetric partner map at " + std::to_string(i));
    }
  }
  r.perfect_up_to_parity = r.unmatched == n % 2;
  return r;
}

std::string_view to_string(TransportRule rule) {
  switch (rule) {
    case TransportRule::ToNearestNeighbor: return "to-nearest-neighbor";
    case TransportRule::ToMatchedPartner: return "to-matched-partner";
    case TransportRule::AlongDfsSuccessor: return "along-dfs-successor";
    case TransportRule::ToUnmatchedInComponent: return "to-unmatched-in-component";
  }
  return "?";
}

TransportRule parse_transport_rule(std::string_view text) {
  for (TransportRule r : kAllTransportRules) {
    if (to_string(r) == text) return r;
  }
  throw ContractViolation("unknown transport rule '" + std::string(text) + "'");
}

std::vector<Transfer> transport_plan(TransportRule rule, const PointConfiguration& cfg,
                                     const TransportInputs& inputs) {
  std::vector<Transfer> plan;
  const auto n = static_cast<PointId>(cfg.size());
  switch (rule) {
    case TransportRule::ToNearestNeighbor: {
      const NeighborIndex index(cfg);
      for (PointId x = 0; x < n; ++x) {
        if (auto nb = index.nearest(x)) plan.push_back({x, nb->id, 1.0});
      }
      break;
    }
    case TransportRule::ToMatchedPartner: {
      if (!inputs.matching) throw ContractViolation("to-matched-partner needs a matching");
      for (PointId x = 0; x < n; ++x) {
        if (const auto& p = inputs.matching->partner[static_cast<std::size_t>(x)]) plan.push_back({x, *p, 1.0});
      }
      break;
    }
    case TransportRule::AlongDfsSuccessor: {
      if (!inputs.ordering) throw ContractViolation("along-dfs-successor needs an ordering");
      const auto& ids = inputs.ordering->ids;
      for (std::size_t i = 1; i < ids.size(); ++i) plan.push_back({ids[i - 1], ids[i], 1.0});
      break;
    }
    case TransportRule::ToUnmatchedInComponent: {
      if (!inputs.hierarchy || !inputs.clump_matching) {
        throw ContractViolation("to-unmatched-in-component needs a hierarchy and its clump matching");
      }
      if (cfg.empty()) break;
      for (const auto& component : inputs.hierarchy->clumps(inputs.hierarchy->k_max)) {
        for (PointId y : component) {
          if (inputs.clump_matching->is_matched(y)) continue;
          for (PointId x : component) {
            if (x != y) plan.push_back({x, y, 1.0});
          }
        }
      }
      break;
    }
  }
  return plan;
}

bool TransportBalance::balanced(double rel_tol) const {
  const double scale = std::max({1.0, std::fabs(total_out), std::fabs(total_in)});
  return std::fabs(total_out - total_in) <= rel_tol * scale;
}

TransportBalance mass_transport_balance(const PointConfiguration& cfg, std::span<const Transfer> transfers,
                                        std::size_t cells_per_axis) {
  const MetricWindow& w = cfg.window();
  if (!w.is_torus()) {
    throw ContractViolation(
        "mass transport balance needs a torus window: only there is the configuration translation invariant");
  }
  if (cells_per_axis == 0) throw ContractViolation("cells_per_axis must be positive");
  const int d = w.dimension();
  std::size_t cells = 1;
  for (int i = 0; i < d; ++i) cells *= cells_per_axis;
  if (cells > 1'000'000) throw ContractViolation("transport cell grid too large");

  const std::size_t n = cfg.size();
  std::vector<double> out(n, 0.0);
  std::vector<double> in(n, 0.0);
  for (const Transfer& t : transfers) {
    if (t.mass < 0.0) throw ContractViolation("negative transported mass");
    out[static_cast<std::size_t>(t.from)] += t.mass;
    in[static_cast<std::size_t>(t.to)] += t.mass;
  }

  TransportBalance b;
  b.cells_per_axis = cells_per_axis;
  b.per_cell.resize(cells);
  for (std::size_t c = 0; c < cells; ++c) b.per_cell[c].cell = c;
  const double side = w.extent() / static_cast<double>(cells_per_axis);
  for (std::size_t i = 0; i < n; ++i) {
    b.total_out += out[i];
    b.total_in += in[i];
    std::size_t cell = 0;
    for (int a = d - 1; a >= 0; --a) {
      auto c = static_cast<std::size_t>(std::floor(cfg[static_cast<PointId>(i)][a] / side));
      c = std::min(c, cells_per_axis - 1);
      cell = cell * cells_per_axis + c;
    }
    b.per_cell[cell].out += out[i];
    b.per_cell[cell].in += in[i];
  }
  return b;
}

TransportBalance mass_transport_balance(const PointConfiguration& cfg, TransportRule rule,
                                        const TransportInputs& inputs, std::size_t cells_per_axis) {
  if (!cfg.window().is_torus()) return mass_transport_balance(cfg, std::span<const Transfer>{}, cells_per_axis);
  const auto plan = transport_plan(rule, cfg, inputs);
  return mass_transport_balance(cfg, plan, cells_per_axis);
}

std::vector<double> longest_incident_edge(const FactorGraph& g, const PointConfiguration& cfg) {
  std::vector<double> out(cfg.size(), -1.0);
  for (const auto& [u, v] : g.edges) {
    const double len = cfg.distance(u, v);
    out[static_cast<std::size_t>(u)] = std::max(out[static_cast<std::size_t>(u)], len);
    out[static_cast<std::size_t>(v)] = std::max(out[static_cast<std::size_t>(v)], len);
  }
  return out;
}

std::vector<double> longest_incident_edge(const Matching& m, const PointConfiguration& cfg) {
  std::vector<double> out(cfg.size(), -1.0);
  for (std::size_t i = 0; i < m.partner.size(); ++i) {
    if (m.partner[i]) out[i] = cfg.distance(static_cast<PointId>(i), *m.partner[i]);
  }
  return out;
}

std::vector<TailRow> survival_from_lengths(std::span<const double> lengths, std::span<const double> radii) {
  if (!std::is_sorted(radii.begin(), radii.end())) throw ContractViolation("tail radii must be ascending");
  std::vector<double> sorted(lengths.begin(), lengths.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<TailRow> rows;
  for (double r : radii) {
    const auto above = static_cast<std::size_t>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), r));
    rows.push_back({r, sorted.empty() ? 0.0 : static_cast<double>(above) / static_cast<double>(sorted.size())});
  }
  return rows;
}

std::vector<TailRow> edge_length_tail(const FactorGraph& g, const PointConfiguration& cfg,
                                      std::span<const double> radii) {
  const auto lengths = longest_incident_edge(g, cfg);
  return survival_from_lengths(lengths, radii);
}

std::vector<TailRow> edge_length_tail(const Matching& m, const PointConfiguration& cfg,
                                      std::span<const double> radii) {
  const auto lengths = longest_incident_edge(m, cfg);
  return survival_from_lengths(lengths, radii);
}

}  // namespace ppfg
