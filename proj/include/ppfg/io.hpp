#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppfg/analysis.hpp"
#include "ppfg/clumping.hpp"
#include "ppfg/graph.hpp"
#include "ppfg/mnn.hpp"
#include "ppfg/pointgen.hpp"

namespace ppfg::io {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

/// Shortest-round-trip-safe text for a double: 17 significant digits.
[[nodiscard]] std::string format_real(double x);

/// id,x1,...,xd
void write_points_csv(const fs::path& path, const PointConfiguration& cfg);
[[nodiscard]] PointConfiguration read_points_csv(const fs::path& path, const MetricWindow& w);

/// level,point_id,clump_id
void write_hierarchy_csv(const fs::path& path, const ClumpHierarchy& h);
/// level,center_id,radius
void write_cutters_csv(const fs::path& path, const ClumpHierarchy& h);

/// u,v for undirected graphs, u,v,directed for directed ones.
void write_graph_csv(const fs::path& path, const FactorGraph& g);
[[nodiscard]] FactorGraph read_graph_csv(const fs::path& path, std::size_t n);

/// rank,id
void write_ordering_csv(const fs::path& path, const Ordering& order);

/// id,partner with an empty partner field for unmatched points.
void write_matching_csv(const fs::path& path, const Matching& m);
[[nodiscard]] Matching read_matching_csv(const fs::path& path, std::size_t n);

/// id,round for matched points.
void write_rounds_csv(const fs::path& path, const MnnResult& r);
/// u,v,round,annihilation_time
void write_mnn_pairs_csv(const fs::path& path, const PointConfiguration& cfg, const MnnResult& r);

/// r,fraction
void write_tail_csv(const fs::path& path, std::span<const TailRow> rows);

[[nodiscard]] Json to_json(const ChainReport& r);
[[nodiscard]] Json to_json(const GraphReport& r);
[[nodiscard]] Json to_json(const MatchingReport& r);
[[nodiscard]] Json to_json(const TransportBalance& b, bool with_cells);
[[nodiscard]] Json to_json(const Degeneracy& d);
[[nodiscard]] Json to_json(const NonEquidistanceReport& r);

/// Pretty-printed with a trailing newline.
void write_json(const fs::path& path, const Json& j);
void write_text(const fs::path& path, const std::string& text);

}  // namespace ppfg::io
