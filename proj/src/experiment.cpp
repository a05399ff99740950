#include "ppfg/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "ppfg/io.hpp"
#include "ppfg/oracle.hpp"
#include "ppfg/parallel.hpp"
#include "ppfg/random.hpp"

namespace ppfg {

namespace fs = std::filesystem;
using io::Json;

namespace {

constexpr std::size_t kHierarchyOracleLimit = 60;
constexpr std::size_t kTreeOracleLimit = 200;
constexpr std::size_t kMatchingOracleLimit = 300;
constexpr std::size_t kMsfOracleLimit = 9;
constexpr std::size_t kChainCheckLimit = 9;

constexpr std::array<Construction, 5> kAllConstructions = {Construction::Tree, Construction::Dfs, Construction::Msf,
                                                           Construction::ClumpMatch, Construction::MnnMatch};

[[noreturn]] void bad(const std::string& what) { throw ContractViolation("config: " + what); }

void reject_unknown(const YAML::Node& node, std::string_view section, std::initializer_list<std::string_view> keys) {
  if (!node.IsMap()) bad(std::string(section) + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      bad("unknown key '" + key + "' in " + std::string(section));
    }
  }
}

template <class T>
T get(const YAML::Node& node, const char* key, T fallback) {
  const YAML::Node v = node[key];
  if (!v) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    bad(std::string("cannot read '") + key + "'");
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::size_t odd_clumps(const ClumpHierarchy& h) {
  std::size_t odd = 0;
  for (const auto& members : h.clumps(h.k_max)) odd += members.size() % 2;
  return odd;
}

}  // namespace

std::string_view to_string(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::Poisson: return "poisson";
    case ProcessKind::Lattice: return "lattice";
    case ProcessKind::Enriched: return "enriched";
    case ProcessKind::Fixed: return "fixed";
  }
  return "?";
}

ProcessKind parse_process_kind(std::string_view text) {
  for (auto k : {ProcessKind::Poisson, ProcessKind::Lattice, ProcessKind::Enriched, ProcessKind::Fixed}) {
    if (to_string(k) == text) return k;
  }
  bad("unknown process kind '" + std::string(text) + "'");
}

std::string_view to_string(Construction c) {
  switch (c) {
    case Construction::Tree: return "tree";
    case Construction::Dfs: return "dfs";
    case Construction::Msf: return "msf";
    case Construction::ClumpMatch: return "clump-match";
    case Construction::MnnMatch: return "mnn-match";
  }
  return "?";
}

Construction parse_construction(std::string_view text) {
  for (Construction c : kAllConstructions) {
    if (to_string(c) == text) return c;
  }
  bad("unknown construction '" + std::string(text) + "'");
}

bool ExperimentConfig::wants(Construction c) const {
  return std::find(constructions.begin(), constructions.end(), c) != constructions.end();
}

ExperimentConfig parse_config(std::string_view yaml) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml));
  } catch (const YAML::Exception& e) {
    bad(std::string("YAML error: ") + e.what());
  }
  if (!root || root.IsNull()) bad("empty document");
  reject_unknown(root, "top level", {"window", "process", "constructions", "analyses", "clumping", "seeds", "output"});

  ExperimentConfig c;
  if (const auto w = root["window"]) {
    reject_unknown(w, "window", {"kind", "dimension", "extent"});
    try {
      c.window.kind = parse_window_kind(get<std::string>(w, "kind", "torus"));
    } catch (const ContractViolation& e) {
      bad(e.what());
    }
    c.window.dimension = get<int>(w, "dimension", c.window.kind == WindowKind::PoincareDisk ? 2 : c.window.dimension);
    c.window.extent = get<double>(w, "extent", c.window.extent);
  }
  if (const auto p = root["process"]) {
    reject_unknown(p, "process", {"kind", "intensity", "chain_length", "ratio", "points"});
    c.process.kind = parse_process_kind(get<std::string>(p, "kind", "poisson"));
    c.process.intensity = get<double>(p, "intensity", c.process.intensity);
    c.process.chain_length = get<int>(p, "chain_length", c.process.chain_length);
    c.process.ratio = get<double>(p, "ratio", c.process.ratio);
    c.process.points = get<std::vector<std::vector<double>>>(p, "points", {});
  }
  if (const auto list = root["constructions"]) {
    if (!list.IsSequence()) bad("constructions must be a list");
    for (const auto& item : list) c.constructions.push_back(parse_construction(item.as<std::string>()));
  }
  if (const auto a = root["analyses"]) {
    reject_unknown(a, "analyses",
                   {"verify", "transport", "cells_per_axis", "tail_radii", "chains", "pair_cap", "non_equidistance",
                    "oracle", "enclosure"});
    c.analyses.verify = get<bool>(a, "verify", c.analyses.verify);
    for (const auto& name : get<std::vector<std::string>>(a, "transport", {})) {
      try {
        c.analyses.transport.push_back(parse_transport_rule(name));
      } catch (const ContractViolation& e) {
        bad(e.what());
      }
    }
    c.analyses.cells_per_axis = get<std::size_t>(a, "cells_per_axis", c.analyses.cells_per_axis);
    c.analyses.tail_radii = get<std::vector<double>>(a, "tail_radii", {});
    c.analyses.chains = get<bool>(a, "chains", c.analyses.chains);
    c.analyses.pair_cap = get<std::size_t>(a, "pair_cap", c.analyses.pair_cap);
    c.analyses.non_equidistance = get<bool>(a, "non_equidistance", c.analyses.non_equidistance);
    c.analyses.oracle = get<bool>(a, "oracle", c.analyses.oracle);
    if (const auto e = a["enclosure"]) {
      reject_unknown(e, "analyses.enclosure", {"k_lo", "k_hi", "probe_radius"});
      EnclosureSpec spec;
      spec.k_lo = get<int>(e, "k_lo", spec.k_lo);
      spec.k_hi = get<int>(e, "k_hi", spec.k_hi);
      spec.probe_radius = get<double>(e, "probe_radius", spec.probe_radius);
      c.analyses.enclosure = spec;
    }
  }
  if (const auto cl = root["clumping"]) {
    reject_unknown(cl, "clumping", {"k_max", "leader_pool"});
    if (cl["k_max"] && !cl["k_max"].IsNull()) c.clumping.k_max = get<int>(cl, "k_max", 1);
    try {
      c.clumping.leader_pool = parse_leader_pool(get<std::string>(cl, "leader_pool", "full"));
    } catch (const ContractViolation& e) {
      bad(e.what());
    }
  }
  if (const auto s = root["seeds"]) {
    reject_unknown(s, "seeds", {"master", "runs"});
    c.seeds.master = get<std::uint64_t>(s, "master", c.seeds.master);
    c.seeds.runs = get<std::size_t>(s, "runs", c.seeds.runs);
  }
  c.output = get<std::string>(root, "output", "");
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ContractViolation("cannot read config " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string to_yaml(const ExperimentConfig& c) {
  auto real = [](double x) { return io::format_real(x); };
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "window" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << std::string(to_string(c.window.kind));
  e << YAML::Key << "dimension" << YAML::Value << c.window.dimension;
  e << YAML::Key << "extent" << YAML::Value << real(c.window.extent);
  e << YAML::EndMap;

  e << YAML::Key << "process" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << std::string(to_string(c.process.kind));
  e << YAML::Key << "intensity" << YAML::Value << real(c.process.intensity);
  e << YAML::Key << "chain_length" << YAML::Value << c.process.chain_length;
  e << YAML::Key << "ratio" << YAML::Value << real(c.process.ratio);
  e << YAML::Key << "points" << YAML::Value << YAML::BeginSeq;
  for (const auto& p : c.process.points) {
    e << YAML::Flow << YAML::BeginSeq;
    for (double x : p) e << real(x);
    e << YAML::EndSeq;
  }
  e << YAML::EndSeq;
  e << YAML::EndMap;

  e << YAML::Key << "constructions" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (Construction k : c.constructions) e << std::string(to_string(k));
  e << YAML::EndSeq;

  const AnalysisSpec& a = c.analyses;
  e << YAML::Key << "analyses" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "verify" << YAML::Value << a.verify;
  e << YAML::Key << "transport" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (TransportRule r : a.transport) e << std::string(to_string(r));
  e << YAML::EndSeq;
  e << YAML::Key << "cells_per_axis" << YAML::Value << a.cells_per_axis;
  e << YAML::Key << "tail_radii" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double r : a.tail_radii) e << real(r);
  e << YAML::EndSeq;
  e << YAML::Key << "chains" << YAML::Value << a.chains;
  e << YAML::Key << "pair_cap" << YAML::Value << a.pair_cap;
  e << YAML::Key << "non_equidistance" << YAML::Value << a.non_equidistance;
  e << YAML::Key << "oracle" << YAML::Value << a.oracle;
  if (a.enclosure) {
    e << YAML::Key << "enclosure" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "k_lo" << YAML::Value << a.enclosure->k_lo;
    e << YAML::Key << "k_hi" << YAML::Value << a.enclosure->k_hi;
    e << YAML::Key << "probe_radius" << YAML::Value << real(a.enclosure->probe_radius);
    e << YAML::EndMap;
  }
  e << YAML::EndMap;

  e << YAML::Key << "clumping" << YAML::Value << YAML::BeginMap;
  if (c.clumping.k_max) e << YAML::Key << "k_max" << YAML::Value << *c.clumping.k_max;
  e << YAML::Key << "leader_pool" << YAML::Value << std::string(to_string(c.clumping.leader_pool));
  e << YAML::EndMap;

  e << YAML::Key << "seeds" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "master" << YAML::Value << c.seeds.master;
  e << YAML::Key << "runs" << YAML::Value << c.seeds.runs;
  e << YAML::EndMap;

  if (!c.output.empty()) e << YAML::Key << "output" << YAML::Value << c.output;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

void validate(const ExperimentConfig& c) {
  const WindowSpec& w = c.window;
  if (w.dimension < 1 || w.dimension > kMaxDimension) bad("window dimension must be in 1.." + std::to_string(kMaxDimension));
  if (w.kind == WindowKind::PoincareDisk && w.dimension != 2) bad("the disk window is two-dimensional");
  if (!(w.extent > 0.0) || !std::isfinite(w.extent)) bad("window extent must be positive and finite");

  const ProcessSpec& p = c.process;
  switch (p.kind) {
    case ProcessKind::Enriched:
      if (p.chain_length < 2) bad("chain_length must be at least 2");
      if (!(p.ratio > 0.0 && p.ratio < 1.0)) bad("ratio must lie in (0, 1)");
      [[fallthrough]];
    case ProcessKind::Poisson:
      if (!(p.intensity > 0.0) || !std::isfinite(p.intensity)) bad("intensity must be positive");
      if (!std::isfinite(p.intensity * w.make().volume())) bad("intensity times window volume must be finite");
      break;
    case ProcessKind::Lattice:
      if (w.kind != WindowKind::EuclideanTorus) bad("the lattice process needs a torus window");
      if (w.dimension > 3) bad("the lattice process supports dimensions 1 to 3");
      if (w.extent != std::floor(w.extent)) bad("the lattice process needs an integer torus side");
      break;
    case ProcessKind::Fixed:
      for (const auto& pt : p.points) {
        if (pt.size() != static_cast<std::size_t>(w.dimension)) bad("fixed point with wrong dimension");
      }
      break;
  }

  std::set<Construction> seen;
  for (Construction k : c.constructions) {
    if (!seen.insert(k).second) bad("construction '" + std::string(to_string(k)) + "' listed twice");
  }
  if (c.wants(Construction::Dfs) && !c.wants(Construction::Tree)) bad("dfs needs the tree construction");

  const AnalysisSpec& a = c.analyses;
  if (!a.transport.empty() && w.kind != WindowKind::EuclideanTorus) {
    bad("transport balance needs a torus window: only there is the configuration translation invariant");
  }
  for (TransportRule r : a.transport) {
    if (r == TransportRule::ToMatchedPartner && !c.wants(Construction::MnnMatch) && !c.wants(Construction::ClumpMatch)) {
      bad("to-matched-partner needs mnn-match or clump-match");
    }
    if (r == TransportRule::AlongDfsSuccessor && !c.wants(Construction::Dfs)) bad("along-dfs-successor needs dfs");
    if (r == TransportRule::ToUnmatchedInComponent && !c.wants(Construction::ClumpMatch)) {
      bad("to-unmatched-in-component needs clump-match");
    }
  }
  if (a.cells_per_axis == 0) bad("cells_per_axis must be positive");
  if (!std::is_sorted(a.tail_radii.begin(), a.tail_radii.end())) bad("tail_radii must be ascending");
  if (!a.tail_radii.empty() && a.tail_radii.front() < 0.0) bad("tail_radii must be nonnegative");
  if (a.enclosure) {
    if (w.kind == WindowKind::PoincareDisk) bad("enclosure statistics need a Euclidean window");
    if (a.enclosure->k_lo < 1 || a.enclosure->k_hi < a.enclosure->k_lo) bad("enclosure needs 1 <= k_lo <= k_hi");
    if (!(a.enclosure->probe_radius > 0.0)) bad("enclosure probe_radius must be positive");
  }
  if (c.clumping.k_max && *c.clumping.k_max < 1) bad("k_max must be at least 1");
  if (c.seeds.runs < 1) bad("seeds.runs must be at least 1");
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.output.clear();
  const std::string text = to_yaml(c);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t value) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, value >>= 4) s[static_cast<std::size_t>(i)] = digits[value & 0xF];
  return s;
}

PointConfiguration generate_points(const ExperimentConfig& config, std::uint64_t seed) {
  const MetricWindow w = config.window.make();
  const ProcessSpec& p = config.process;
  switch (p.kind) {
    case ProcessKind::Poisson:
      return sample_poisson(w, p.intensity, seed);
    case ProcessKind::Lattice:
      return perturbed_lattice(w.dimension(), static_cast<int>(w.extent()), seed);
    case ProcessKind::Enriched: {
      PointConfiguration base = sample_poisson(w, p.intensity, seed);
      if (base.empty()) return base;
      return enrich_descending_chains(base, p.chain_length, p.ratio, splitmix64(seed));
    }
    case ProcessKind::Fixed: {
      std::vector<Point> pts;
      for (const auto& c : p.points) pts.emplace_back(std::span<const double>(c));
      return {w, std::move(pts), 0};
    }
  }
  throw ContractViolation("unknown process");
}

std::string run_directory_name(std::size_t index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
  return "run_" + digits;
}

RunRecord process_configuration(const ExperimentConfig& config, const PointConfiguration& cfg, std::size_t index,
                                const fs::path& dir, bool analyze) {
  RunRecord rec;
  rec.index = index;
  rec.seed = cfg.rng_seed();
  rec.n = cfg.size();
  const std::size_t n = cfg.size();
  const bool oracle = analyze && config.analyses.oracle;
  const AnalysisSpec& a = config.analyses;
  auto fail = [&](const std::string& what) { rec.failures.push_back(what); };

  Json report;
  report["run_index"] = index;
  report["seed"] = rec.seed;
  report["master_seed"] = config.seeds.master;
  report["config_hash"] = hex(config_hash(config));
  report["n"] = n;

  io::write_points_csv(dir / "points.csv", cfg);

  const ClumpingParams params = ClumpingParams::for_window(cfg.window(), config.clumping.k_max);
  std::optional<ClumpHierarchy> h;
  if (config.wants(Construction::Tree) || config.wants(Construction::ClumpMatch)) {
    h = build_hierarchy(cfg, params);
    rec.degeneracy += h->degeneracy;
    rec.top_clumps = n == 0 ? 0 : static_cast<std::size_t>(h->clump_count.back());
    io::write_hierarchy_csv(dir / "hierarchy.csv", *h);
    io::write_cutters_csv(dir / "cutters.csv", *h);
    Json hj{{"k_max", h->k_max}, {"clump_count", h->clump_count}, {"level_dropped", h->level_dropped}};
    if (analyze) {
      for (int k = 2; k <= h->k_max; ++k) {
        std::map<int, int> coarser;
        for (std::size_t i = 0; i < n; ++i) {
          auto [it, fresh] = coarser.try_emplace(h->level(k - 1)[i], h->level(k)[i]);
          if (it->second != h->level(k)[i]) {
            fail("hierarchy level " + std::to_string(k) + " does not coarsen level " + std::to_string(k - 1));
            break;
          }
        }
      }
    }
    if (oracle && n <= kHierarchyOracleLimit) {
      const auto ref = oracle::hierarchy(cfg, params);
      bool same = true;
      for (int k = 1; k <= h->k_max; ++k) {
        same = same && oracle::canonical_labels(h->level(k)) == ref[static_cast<std::size_t>(k - 1)];
      }
      hj["oracle_equal"] = same;
      if (!same) fail("hierarchy differs from the separation oracle");
    }
    report["hierarchy"] = hj;
  }

  std::optional<OneEndedTree> tree;
  if (config.wants(Construction::Tree)) {
    tree = build_one_ended_tree(cfg, *h, config.clumping.leader_pool);
    rec.degeneracy += tree->degeneracy;
    io::write_graph_csv(dir / "tree.csv", tree->graph);
    if (analyze) {
      const GraphReport gr = verify_graph(tree->graph);
      rec.tree_max_degree = gr.max_degree;
      Json tj = io::to_json(gr);
      tj["root"] = tree->root();
      const std::size_t tops = *rec.top_clumps;
      if (a.verify) {
        const bool ok = tops <= 1 ? (n == 0 || gr.is_tree())
                                  : gr.acyclic && gr.component_count == tops && gr.edge_count == n - tops;
        if (!ok) fail("tree check failed");
      }
      if (oracle && n <= kTreeOracleLimit) {
        const bool same = oracle::one_ended_tree(cfg, *h, config.clumping.leader_pool) == tree->graph;
        tj["oracle_equal"] = same;
        if (!same) fail("tree differs from the recursive oracle");
      }
      report["tree"] = tj;
    }
  }

  std::optional<Ordering> order;
  if (config.wants(Construction::Dfs)) {
    order = dfs_order(tree->graph, cfg, tree->root(), &rec.degeneracy);
    io::write_ordering_csv(dir / "ordering.csv", *order);
    if (analyze) {
      std::vector<PointId> sorted = order->ids;
      std::sort(sorted.begin(), sorted.end());
      bool permutation = sorted.size() == n;
      for (std::size_t i = 0; permutation && i < n; ++i) permutation = sorted[i] == static_cast<PointId>(i);
      FactorGraph path = order->path_graph();
      path.n = n;
      const GraphReport pr = verify_graph(path);
      Json dj{{"permutation", permutation}, {"components", order->components}, {"path_max_degree", pr.max_degree}};
      if (a.verify && (!permutation || pr.max_degree > 2)) fail("dfs ordering check failed");
      if (oracle) {
        const bool same = oracle::dfs(tree->graph, cfg, tree->root()) == order->ids;
        dj["oracle_equal"] = same;
        if (!same) fail("dfs ordering differs from the stack oracle");
      }
      report["dfs"] = dj;
    }
  }

  std::optional<FactorGraph> msf;
  if (config.wants(Construction::Msf)) {
    msf = minimal_spanning_forest(cfg, MsfMethod::Auto, &rec.degeneracy);
    io::write_graph_csv(dir / "msf.csv", *msf);
    if (analyze) {
      const GraphReport gr = verify_graph(*msf);
      Json mj = io::to_json(gr);
      if (a.verify && n > 0 && !gr.is_tree()) fail("spanning forest is not a spanning tree");
      if (oracle && n <= kMsfOracleLimit) {
        const bool same = msf_cycle_oracle(cfg) == *msf;
        mj["oracle_equal"] = same;
        if (!same) fail("spanning forest differs from the cycle oracle");
      }
      report["msf"] = mj;
    }
  }

  std::optional<ClumpMatching> cm;
  if (config.wants(Construction::ClumpMatch)) {
    cm = clump_greedy_matching(cfg, *h);
    rec.degeneracy += cm->degeneracy;
    io::write_matching_csv(dir / "clump_matching.csv", cm->matching);
    if (analyze) {
      const MatchingReport mr = verify_matching(cm->matching, n);
      Json cj = io::to_json(mr);
      const std::size_t expected = odd_clumps(*h);
      cj["expected_unmatched"] = expected;
      bool inside = true;
      for (const auto& [u, v] : cm->matching.pairs()) {
        const int k = cm->formation_level[static_cast<std::size_t>(u)];
        inside = inside && k >= 1 && h->level(k)[static_cast<std::size_t>(u)] == h->level(k)[static_cast<std::size_t>(v)];
      }
      cj["pairs_inside_clumps"] = inside;
      if (a.verify && (mr.unmatched != expected || !inside)) fail("clump matching parity or locality failed");
      if (oracle && n <= kTreeOracleLimit) {
        const bool same = oracle::clump_greedy(cfg, *h) == cm->matching;
        cj["oracle_equal"] = same;
        if (!same) fail("clump matching differs from the brute-force oracle");
      }
      report["clump_match"] = cj;
    }
  }

  std::optional<MnnResult> mnn;
  if (config.wants(Construction::MnnMatch)) {
    mnn = iterated_mnn_matching(cfg);
    rec.degeneracy += mnn->degeneracy;
    rec.mnn_rounds = mnn->rounds;
    io::write_matching_csv(dir / "mnn_matching.csv", mnn->matching);
    io::write_rounds_csv(dir / "mnn_rounds.csv", *mnn);
    io::write_mnn_pairs_csv(dir / "mnn_pairs.csv", cfg, *mnn);
    if (analyze) {
      const MatchingReport mr = verify_matching(mnn->matching, n);
      Json nj = io::to_json(mr);
      nj["rounds"] = mnn->rounds;
      nj["leftover"] = mnn->leftover;
      const bool monotone = std::is_sorted(mnn->round_min_key.begin(), mnn->round_min_key.end());
      nj["round_min_distance_monotone"] = monotone;
      nj["leftover_two_cycles"] = nearest_neighbor_digraph(cfg, mnn->leftover).two_cycles.size();
      if (a.verify && (!mr.perfect_up_to_parity || mnn->leftover.size() != n % 2 || !monotone)) {
        fail("iterated matching parity or monotonicity failed");
      }
      if (oracle && n <= kMatchingOracleLimit) {
        const auto ref = oracle::mnn(cfg);
        const bool same = ref.matching == mnn->matching && ref.round_of == mnn->round_of && ref.rounds == mnn->rounds;
        nj["oracle_equal"] = same;
        if (!same) fail("iterated matching differs from the brute-force simulator");
      }
      report["mnn_match"] = nj;
    }
  }

  if (analyze) {
    std::map<std::string, std::vector<double>> incident;
    if (tree) incident["tree"] = longest_incident_edge(tree->graph, cfg);
    if (order) incident["dfs"] = longest_incident_edge(order->path_graph(), cfg);
    if (msf) incident["msf"] = longest_incident_edge(*msf, cfg);
    if (cm) incident["clump-match"] = longest_incident_edge(cm->matching, cfg);
    if (mnn) incident["mnn-match"] = longest_incident_edge(mnn->matching, cfg);
    if (!a.tail_radii.empty()) {
      for (const auto& [name, lengths] : incident) {
        io::write_tail_csv(dir / ("tail_" + name + ".csv"), survival_from_lengths(lengths, a.tail_radii));
      }
      rec.incident = std::move(incident);
    }

    if (!a.transport.empty()) {
      TransportInputs inputs;
      inputs.matching = mnn ? &mnn->matching : cm ? &cm->matching : nullptr;
      inputs.ordering = order ? &*order : nullptr;
      inputs.hierarchy = h ? &*h : nullptr;
      inputs.clump_matching = cm ? &cm->matching : nullptr;
      Json tj = Json::object();
      for (TransportRule rule : a.transport) {
        const TransportBalance b = mass_transport_balance(cfg, rule, inputs, a.cells_per_axis);
        rec.transport_balanced[std::string(to_string(rule))] = b.balanced();
        tj[std::string(to_string(rule))] = io::to_json(b, true);
        if (!b.balanced()) fail("transport " + std::string(to_string(rule)) + " unbalanced");
      }
      report["transport"] = tj;
    }

    if (a.chains) {
      try {
        const ChainReport cr = find_descending_chains(cfg, a.pair_cap);
        rec.chain_length = cr.length;
        rec.chain_lower_bound = cr.lower_bound;
        Json chains = io::to_json(cr);
        if (oracle && n <= kChainCheckLimit && !cr.lower_bound) {
          const bool same = oracle::longest_chain(cfg) == cr.length;
          chains["oracle_equal"] = same;
          if (!same) fail("chain search differs from exhaustive enumeration");
        }
        io::write_json(dir / "chains.json", chains);
      } catch (const ContractViolation& e) {
        fail(std::string("chain search refused: ") + e.what());
      }
    }

    if (a.non_equidistance) {
      const NonEquidistanceReport ne = check_non_equidistant(cfg);
      rec.non_equidistant = ne.holds;
      report["non_equidistance"] = io::to_json(ne);
    }

    if (a.enclosure) {
      rec.enclosure = enclosure_stats(std::span<const PointConfiguration>(&cfg, 1), params, a.enclosure->k_lo,
                                      a.enclosure->k_hi, a.enclosure->probe_radius);
      Json ej = Json::array();
      for (const EnclosureRow& row : rec.enclosure) {
        ej.push_back(Json{{"k", row.k}, {"skipped", row.skipped}, {"enclosed", row.p_enclosed > 0.0},
                          {"intersects", row.p_intersects > 0.0}});
      }
      report["enclosure"] = ej;
    }
  }

  report["degeneracy"] = io::to_json(rec.degeneracy);
  report["failures"] = rec.failures;
  io::write_json(dir / "report.json", report);
  return rec;
}

namespace {

void write_run_manifest(const fs::path& dir, const ExperimentConfig& config, const RunRecord& rec) {
  Json m{{"version", kVersion},
         {"config_hash", hex(config_hash(config))},
         {"master_seed", config.seeds.master},
         {"run_index", rec.index},
         {"seed", rec.seed},
         {"process", to_string(config.process.kind)},
         {"window", to_string(config.window.kind)}};
  if (config.process.kind == ProcessKind::Poisson || config.process.kind == ProcessKind::Enriched) {
    m["poisson_algorithm"] = poisson_algorithm(config.process.intensity * config.window.make().volume());
  }
  m["degeneracy"] = io::to_json(rec.degeneracy);
  m["failures"] = rec.failures.size();
  m["created_utc"] = utc_timestamp();
  io::write_json(dir / "manifest.json", m);
}

Json summarize(const ExperimentConfig& config, const ExperimentResult& result, const fs::path& out) {
  const auto& runs = result.runs;
  Json s{{"version", kVersion},
         {"config_hash", hex(config_hash(config))},
         {"master_seed", config.seeds.master},
         {"runs", runs.size()},
         {"failed_runs", result.failed_runs}};
  Json failures = Json::array();
  Degeneracy total;
  double n_sum = 0.0;
  std::size_t n_min = runs.empty() ? 0 : runs.front().n;
  std::size_t n_max = 0;
  for (const RunRecord& r : runs) {
    for (const auto& f : r.failures) failures.push_back(run_directory_name(r.index) + ": " + f);
    total += r.degeneracy;
    n_sum += static_cast<double>(r.n);
    n_min = std::min(n_min, r.n);
    n_max = std::max(n_max, r.n);
  }
  s["failures"] = failures;
  s["points"] = Json{{"mean", runs.empty() ? 0.0 : n_sum / static_cast<double>(runs.size())},
                     {"min", n_min},
                     {"max", n_max}};
  s["degeneracy"] = io::to_json(total);

  if (config.wants(Construction::Tree)) {
    std::size_t single = 0;
    std::size_t deg_max = 0;
    double deg_sum = 0.0;
    std::size_t counted = 0;
    for (const RunRecord& r : runs) {
      if (r.top_clumps && *r.top_clumps == 1) ++single;
      if (r.tree_max_degree) {
        deg_max = std::max(deg_max, *r.tree_max_degree);
        deg_sum += static_cast<double>(*r.tree_max_degree);
        ++counted;
      }
    }
    s["tree"] = Json{{"runs_single_top_clump", single},
                     {"max_degree_mean", counted ? deg_sum / static_cast<double>(counted) : 0.0},
                     {"max_degree_max", deg_max}};
  }
  if (config.wants(Construction::MnnMatch)) {
    Json rows = Json::array();
    for (const RunRecord& r : runs) {
      if (r.mnn_rounds) rows.push_back(Json::array({r.n, *r.mnn_rounds}));
    }
    s["mnn_rounds_vs_n"] = rows;
  }
  if (config.analyses.chains) {
    Json rows = Json::array();
    for (const RunRecord& r : runs) {
      if (r.chain_length) rows.push_back(Json::array({r.n, *r.chain_length, r.chain_lower_bound}));
    }
    s["chain_length_vs_n"] = rows;
  }
  if (!config.analyses.tail_radii.empty()) {
    std::map<std::string, std::vector<double>> pooled;
    for (const RunRecord& r : runs) {
      for (const auto& [name, lengths] : r.incident) {
        auto& dst = pooled[name];
        dst.insert(dst.end(), lengths.begin(), lengths.end());
      }
    }
    Json tails = Json::object();
    for (const auto& [name, lengths] : pooled) {
      const auto rows = survival_from_lengths(lengths, config.analyses.tail_radii);
      io::write_tail_csv(out / ("tail_" + name + ".csv"), rows);
      Json t = Json::array();
      for (const TailRow& row : rows) t.push_back(Json::array({row.r, row.fraction}));
      tails[name] = t;
    }
    s["tail"] = tails;
  }
  if (!config.analyses.transport.empty()) {
    Json t = Json::object();
    for (TransportRule rule : config.analyses.transport) {
      std::size_t ok = 0;
      for (const RunRecord& r : runs) {
        auto it = r.transport_balanced.find(std::string(to_string(rule)));
        if (it != r.transport_balanced.end() && it->second) ++ok;
      }
      t[std::string(to_string(rule))] = Json{{"balanced_runs", ok}};
    }
    s["transport"] = t;
  }
  if (config.analyses.enclosure) {
    std::map<int, std::array<std::size_t, 3>> agg;  // runs, enclosed, intersects
    std::map<int, bool> skipped;
    for (const RunRecord& r : runs) {
      for (const EnclosureRow& row : r.enclosure) {
        skipped[row.k] = row.skipped;
        if (row.skipped) continue;
        auto& a = agg[row.k];
        ++a[0];
        a[1] += row.p_enclosed > 0.0;
        a[2] += row.p_intersects > 0.0;
      }
    }
    Json rows = Json::array();
    for (const auto& [k, skip] : skipped) {
      const auto a = agg[k];
      const double runs_k = static_cast<double>(a[0]);
      rows.push_back(Json{{"k", k},
                          {"skipped", skip},
                          {"runs", a[0]},
                          {"p_enclosed", a[0] ? static_cast<double>(a[1]) / runs_k : 0.0},
                          {"p_intersects", a[0] ? static_cast<double>(a[2]) / runs_k : 0.0}});
    }
    s["enclosure"] = rows;
  }
  if (config.analyses.non_equidistance) {
    std::size_t holds = 0;
    std::size_t fails = 0;
    for (const RunRecord& r : runs) {
      if (r.non_equidistant) (*r.non_equidistant ? holds : fails) += 1;
    }
    s["non_equidistance"] = Json{{"holds", holds}, {"fails", fails}};
  }
  return s;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const fs::path& out, unsigned jobs, std::ostream* log) {
  validate(config);
  fs::create_directories(out);
  io::write_text(out / "config.yaml", to_yaml(config));

  ExperimentResult result;
  result.runs.resize(config.seeds.runs);
  parallel_for(config.seeds.runs, jobs, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(config.seeds.master, i);
    const fs::path dir = out / run_directory_name(i);
    fs::create_directories(dir);
    RunRecord rec;
    try {
      const PointConfiguration cfg = generate_points(config, seed);
      rec = process_configuration(config, cfg, i, dir, true);
    } catch (const std::exception& e) {
      rec.index = i;
      rec.seed = seed;
      rec.failures.push_back(std::string("error: ") + e.what());
    }
    write_run_manifest(dir, config, rec);
    result.runs[i] = std::move(rec);
  });
  for (const RunRecord& r : result.runs) {
    if (r.failures.empty()) continue;
    ++result.failed_runs;
    if (log) {
      for (const auto& f : r.failures) *log << run_directory_name(r.index) << ": " << f << '\n';
    }
  }
  io::write_json(out / "summary.json", summarize(config, result, out));
  io::write_json(out / "manifest.json", Json{{"version", kVersion},
                                             {"config_hash", hex(config_hash(config))},
                                             {"master_seed", config.seeds.master},
                                             {"runs", config.seeds.runs},
                                             {"created_utc", utc_timestamp()}});
  return result;
}

}  // namespace ppfg
