#include "ppfg/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ppfg::io {

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <class T>
T parse_number(const std::string& text, const fs::path& path) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw std::runtime_error("bad number '" + text + "' in " + path.string());
  return value;
}

/// Rows after the header, with trailing '\r' stripped and blank lines skipped.
std::vector<std::vector<std::string>> read_rows(const fs::path& path, std::string& header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      header = line;
      first = false;
      continue;
    }
    if (line.empty()) continue;
    rows.push_back(split(line));
  }
  return rows;
}

}  // namespace

std::string format_real(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

void write_points_csv(const fs::path& path, const PointConfiguration& cfg) {
  auto out = open_out(path);
  const int d = cfg.window().dimension();
  out << "id";
  for (int a = 1; a <= d; ++a) out << ",x" << a;
  out << '\n';
  for (PointId i = 0; i < static_cast<PointId>(cfg.size()); ++i) {
    out << i;
    for (int a = 0; a < d; ++a) out << ',' << format_real(cfg[i][a]);
    out << '\n';
  }
  finish(out, path);
}

PointConfiguration read_points_csv(const fs::path& path, const MetricWindow& w) {
  std::string header;
  const auto rows = read_rows(path, header);
  const int d = w.dimension();
  std::vector<Point> points;
  points.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != static_cast<std::size_t>(d) + 1) {
      throw ContractViolation(path.string() + ": row " + std::to_string(r + 1) + " does not have " +
                              std::to_string(d) + " coordinates");
    }
    if (parse_number<long long>(rows[r][0], path) != static_cast<long long>(r)) {
      throw ContractViolation(path.string() + ": ids must be 0..n-1 in order");
    }
    std::vector<double> c;
    for (int a = 0; a < d; ++a) c.push_back(parse_number<double>(rows[r][static_cast<std::size_t>(a) + 1], path));
    points.emplace_back(c);
  }
  return {w, std::move(points), 0};
}

void write_hierarchy_csv(const fs::path& path, const ClumpHierarchy& h) {
  auto out = open_out(path);
  out << "level,point_id,clump_id\n";
  for (int k = 1; k <= h.k_max; ++k) {
    const auto& lv = h.level(k);
    for (std::size_t i = 0; i < lv.size(); ++i) out << k << ',' << i << ',' << lv[i] << '\n';
  }
  finish(out, path);
}

void write_cutters_csv(const fs::path& path, const ClumpHierarchy& h) {
  auto out = open_out(path);
  out << "level,center_id,radius\n";
  for (const auto& level : h.cutters) {
    for (const Cutter& c : level) out << c.level << ',' << c.center << ',' << format_real(c.radius) << '\n';
  }
  finish(out, path);
}

void write_graph_csv(const fs::path& path, const FactorGraph& g) {
  auto out = open_out(path);
  out << (g.directed ? "u,v,directed\n" : "u,v\n");
  for (const auto& [u, v] : g.edges) {
    out << u << ',' << v;
    if (g.directed) out << ",1";
    out << '\n';
  }
  finish(out, path);
}

FactorGraph read_graph_csv(const fs::path& path, std::size_t n) {
  std::string header;
  const auto rows = read_rows(path, header);
  FactorGraph g;
  g.n = n;
  g.directed = header == "u,v,directed";
  for (const auto& row : rows) {
    if (row.size() < 2) throw ContractViolation(path.string() + ": short edge row");
    g.add_edge(parse_number<PointId>(row[0], path), parse_number<PointId>(row[1], path));
  }
  g.validate();
  return g;
}

void write_ordering_csv(const fs::path& path, const Ordering& order) {
  auto out = open_out(path);
  out << "rank,id\n";
  for (std::size_t r = 0; r < order.ids.size(); ++r) out << r << ',' << order.ids[r] << '\n';
  finish(out, path);
}

void write_matching_csv(const fs::path& path, const Matching& m) {
  auto out = open_out(path);
  out << "id,partner\n";
  for (std::size_t i = 0; i < m.partner.size(); ++i) {
    out << i << ',';
    if (m.partner[i]) out << *m.partner[i];
    out << '\n';
  }
  finish(out, path);
}

Matching read_matching_csv(const fs::path& path, std::size_t n) {
  std::string header;
  const auto rows = read_rows(path, header);
  Matching m = Matching::empty(n);
  for (const auto& row : rows) {
    const auto id = parse_number<std::size_t>(row.at(0), path);
    if (id >= n) throw ContractViolation(path.string() + ": id out of range");
    if (row.size() > 1 && !row[1].empty()) m.partner[id] = parse_number<PointId>(row[1], path);
  }
  return m;
}

void write_rounds_csv(const fs::path& path, const MnnResult& r) {
  auto out = open_out(path);
  out << "id,round\n";
  for (std::size_t i = 0; i < r.round_of.size(); ++i) {
    if (r.round_of[i] > 0) out << i << ',' << r.round_of[i] << '\n';
  }
  finish(out, path);
}

void write_mnn_pairs_csv(const fs::path& path, const PointConfiguration& cfg, const MnnResult& r) {
  auto out = open_out(path);
  out << "u,v,round,annihilation_time\n";
  for (const auto& [u, v] : r.matching.pairs()) {
    out << u << ',' << v << ',' << r.round_of[static_cast<std::size_t>(u)] << ','
        << format_real(r.annihilation_time(cfg, u)) << '\n';
  }
  finish(out, path);
}

void write_tail_csv(const fs::path& path, std::span<const TailRow> rows) {
  auto out = open_out(path);
  out << "r,fraction\n";
  for (const TailRow& row : rows) out << format_real(row.r) << ',' << format_real(row.fraction) << '\n';
  finish(out, path);
}

Json to_json(const ChainReport& r) {
  Json hist = Json::object();
  for (const auto& [len, count] : r.histogram) hist[std::to_string(len)] = count;
  return Json{{"longest", r.longest}, {"length", r.length}, {"histogram", hist}, {"lower_bound_flag", r.lower_bound}};
}

Json to_json(const GraphReport& r) {
  Json hist = Json::object();
  for (const auto& [deg, count] : r.degree_histogram) hist[std::to_string(deg)] = count;
  return Json{{"connected", r.connected},         {"acyclic", r.acyclic},
              {"tree", r.is_tree()},              {"component_count", r.component_count},
              {"edge_count", r.edge_count},       {"max_degree", r.max_degree},
              {"degree_histogram", hist}};
}

Json to_json(const MatchingReport& r) {
  return Json{{"perfect_up_to_parity", r.perfect_up_to_parity}, {"unmatched", r.unmatched}};
}

Json to_json(const TransportBalance& b, bool with_cells) {
  Json j{{"total_out", b.total_out}, {"total_in", b.total_in}, {"balanced", b.balanced()},
         {"cells_per_axis", b.cells_per_axis}};
  if (with_cells) {
    Json cells = Json::array();
    for (const CellBalance& c : b.per_cell) cells.push_back(Json::array({c.cell, c.out, c.in}));
    j["per_cell"] = std::move(cells);
  }
  return j;
}

Json to_json(const Degeneracy& d) {
  return Json{{"distance_ties", d.distance_ties},
              {"on_cutter_points", d.on_cutter_points},
              {"leader_fallbacks", d.leader_fallbacks}};
}

Json to_json(const NonEquidistanceReport& r) {
  Json j{{"holds", r.holds}};
  if (r.witness) {
    j["witness"] = *r.witness;
    j["witness_distance"] = r.witness_distance;
  }
  return j;
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  finish(out, path);
}

}  // namespace ppfg::io
