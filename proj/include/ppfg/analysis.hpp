#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "ppfg/clumping.hpp"
#include "ppfg/graph.hpp"
#include "ppfg/pointgen.hpp"

namespace ppfg {

struct GraphReport {
  bool connected = true;
  bool acyclic = true;
  std::size_t component_count = 0;
  std::size_t edge_count = 0;
  std::map<std::size_t, std::size_t> degree_histogram;
  std::size_t max_degree = 0;

  [[nodiscard]] bool is_tree() const { return connected && acyclic; }
};

/// Connectivity of the underlying undirected graph, acyclicity (directed
/// cycles for directed graphs) and the degree histogram (in + out for
/// directed graphs).
[[nodiscard]] GraphReport verify_graph(const FactorGraph& g);

struct MatchingReport {
  bool perfect_up_to_parity = false;
  std::size_t unmatched = 0;
};

/// Throws ContractViolation for asymmetric or self-matched partner maps.
[[nodiscard]] MatchingReport verify_matching(const Matching& m, std::size_t n);

enum class TransportRule { ToNearestNeighbor, ToMatchedPartner, AlongDfsSuccessor, ToUnmatchedInComponent };

inline constexpr std::array<TransportRule, 4> kAllTransportRules = {
    TransportRule::ToNearestNeighbor, TransportRule::ToMatchedPartner, TransportRule::AlongDfsSuccessor,
    TransportRule::ToUnmatchedInComponent};

[[nodiscard]] std::string_view to_string(TransportRule rule);
[[nodiscard]] TransportRule parse_transport_rule(std::string_view text);

struct Transfer {
  PointId from = 0;
  PointId to = 0;
  double mass = 0.0;
};

/// Inputs a rule may need. Missing inputs for the chosen rule are a contract violation.
struct TransportInputs {
  const Matching* matching = nullptr;          // to-matched-partner
  const Ordering* ordering = nullptr;          // along-dfs-successor
  const ClumpHierarchy* hierarchy = nullptr;   // to-unmatched-in-component: components = top-level clumps
  const Matching* clump_matching = nullptr;    // to-unmatched-in-component: who is never matched
};

[[nodiscard]] std::vector<Transfer> transport_plan(TransportRule rule, const PointConfiguration& cfg,
                                                   const TransportInputs& inputs);

struct CellBalance {
  std::size_t cell = 0;  // row-major index into the cells_per_axis^d grid, axis 0 fastest
  double out = 0.0;
  double in = 0.0;
};

struct TransportBalance {
  double total_out = 0.0;
  double total_in = 0.0;
  std::size_t cells_per_axis = 0;
  std::vector<CellBalance> per_cell;

  [[nodiscard]] bool balanced(double rel_tol = 1e-9) const;
};

/// Sums the mass sent out of every point and the mass received by every
/// point, in total and per cell of a congruent torus grid. Refuses
/// non-torus windows.
[[nodiscard]] TransportBalance mass_transport_balance(const PointConfiguration& cfg,
                                                      std::span<const Transfer> transfers,
                                                      std::size_t cells_per_axis);
[[nodiscard]] TransportBalance mass_transport_balance(const PointConfiguration& cfg, TransportRule rule,
                                                      const TransportInputs& inputs, std::size_t cells_per_axis);

struct TailRow {
  double r = 0.0;
  double fraction = 0.0;

  friend bool operator==(const TailRow&, const TailRow&) = default;
};

/// Longest incident edge per point, or -1 for isolated points.
[[nodiscard]] std::vector<double> longest_incident_edge(const FactorGraph& g, const PointConfiguration& cfg);
[[nodiscard]] std::vector<double> longest_incident_edge(const Matching& m, const PointConfiguration& cfg);

/// Fraction of points incident to an edge longer than r, for each radius (ascending).
[[nodiscard]] std::vector<TailRow> edge_length_tail(const FactorGraph& g, const PointConfiguration& cfg,
                                                    std::span<const double> radii);
[[nodiscard]] std::vector<TailRow> edge_length_tail(const Matching& m, const PointConfiguration& cfg,
                                                    std::span<const double> radii);
/// Pools per-point incident lengths from several runs (sum of exceedances over sum of points).
[[nodiscard]] std::vector<TailRow> survival_from_lengths(std::span<const double> lengths,
                                                         std::span<const double> radii);

}  // namespace ppfg
