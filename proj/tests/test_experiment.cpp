#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ppfg/experiment.hpp"
#include "ppfg/io.hpp"

using namespace ppfg;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ppfg-test-" + name);
  fs::remove_all(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + PPFG_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

constexpr const char* kFixture = R"(
window: {kind: box, dimension: 1, extent: 10}
process:
  kind: fixed
  points: [[0], [1], [5]]
constructions: [mnn-match, tree, dfs, msf, clump-match]
seeds: {master: 3, runs: 1}
)";

}  // namespace

TEST_CASE("config parses, validates and round-trips through yaml") {
  const auto c = parse_config(R"(
window: {kind: torus, dimension: 2, extent: 12}
process: {kind: poisson, intensity: 1.5}
constructions: [tree, dfs, msf, clump-match, mnn-match]
analyses:
  transport: [to-nearest-neighbor, to-matched-partner, along-dfs-successor, to-unmatched-in-component]
  tail_radii: [0, 1, 2.5]
  chains: true
  enclosure: {k_lo: 1, k_hi: 3, probe_radius: 0.5}
clumping: {k_max: 3, leader_pool: leaders}
seeds: {master: 99, runs: 4}
output: somewhere
)");
  CHECK(c.window.kind == WindowKind::EuclideanTorus);
  CHECK(c.process.intensity == 1.5);
  CHECK(c.constructions.size() == 5);
  CHECK(c.analyses.transport.size() == 4);
  CHECK(c.analyses.enclosure->probe_radius == 0.5);
  CHECK(c.clumping.k_max == 3);
  CHECK(c.clumping.leader_pool == LeaderPool::LeaderSet);
  CHECK(c.seeds.runs == 4);
  CHECK_NOTHROW(validate(c));
  CHECK(parse_config(to_yaml(c)) == c);

  auto moved = c;
  moved.output = "elsewhere";
  CHECK(config_hash(moved) == config_hash(c));
  moved.seeds.master = 100;
  CHECK(config_hash(moved) != config_hash(c));
  CHECK(hex(0xabcULL).size() == 16);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS((void)parse_config("constructions: [bogus]"), ContractViolation);
  CHECK_THROWS_AS((void)parse_config("window: {shape: round}"), ContractViolation);
  CHECK_THROWS_AS((void)parse_config("extra: 1"), ContractViolation);

  auto dfs_alone = parse_config("constructions: [dfs]");
  CHECK_THROWS_AS(validate(dfs_alone), ContractViolation);
  CHECK_THROWS_AS(validate(parse_config(R"(
window: {kind: box, dimension: 2, extent: 10}
constructions: [mnn-match]
analyses: {transport: [to-matched-partner]}
)")),
                  ContractViolation);
  CHECK_THROWS_AS(validate(parse_config(R"(
constructions: [mnn-match]
analyses: {tail_radii: [2, 1]}
)")),
                  ContractViolation);
  CHECK_THROWS_AS(validate(parse_config(R"(
window: {kind: box, dimension: 2, extent: 10}
process: {kind: lattice}
)")),
                  ContractViolation);
  CHECK_THROWS_AS(validate(parse_config("seeds: {runs: 0}")), ContractViolation);
}

TEST_CASE("unknown construction exits nonzero and writes nothing") {
  const fs::path dir = scratch("badcfg");
  fs::create_directories(dir);
  io::write_text(dir / "bad.yaml", "constructions: [bogus]\n");
  const fs::path out = dir / "out";
  CHECK(run_cli("run --config \"" + (dir / "bad.yaml").string() + "\" --out \"" + out.string() + "\"") == 2);
  CHECK_FALSE(fs::exists(out));
  fs::remove_all(dir);
}

TEST_CASE("fixed three-point fixture") {
  const fs::path out = scratch("fixture");
  const auto result = run_experiment(parse_config(kFixture), out, 1);
  REQUIRE(result.exit_status() == 0);
  const fs::path run = out / run_directory_name(0);
  CHECK(slurp(run / "mnn_matching.csv") == "id,partner\n0,1\n1,0\n2,\n");
  CHECK(slurp(run / "msf.csv") == "u,v\n0,1\n1,2\n");
  CHECK(slurp(run / "points.csv") == "id,x1\n0,0\n1,1\n2,5\n");
  CHECK(io::read_matching_csv(run / "clump_matching.csv", 3).pairs() == std::vector<Edge>{{0, 1}});
  for (const char* f : {"config.yaml", "summary.json", "manifest.json"}) CHECK(fs::exists(out / f));
  for (const char* f : {"hierarchy.csv", "cutters.csv", "tree.csv", "ordering.csv", "mnn_rounds.csv",
                        "mnn_pairs.csv", "report.json"}) {
    CHECK(fs::exists(run / f));
  }
  fs::remove_all(out);
}

TEST_CASE("repeated runs produce byte-identical artifacts apart from manifests") {
  const auto config = parse_config(R"(
window: {kind: torus, dimension: 2, extent: 12}
constructions: [tree, dfs, msf, clump-match, mnn-match]
analyses: {tail_radii: [0, 1, 2], chains: true, transport: [to-nearest-neighbor]}
seeds: {master: 5, runs: 3}
)");
  const fs::path a = scratch("det-a");
  const fs::path b = scratch("det-b");
  REQUIRE(run_experiment(config, a, 2).exit_status() == 0);
  REQUIRE(run_experiment(config, b, 1).exit_status() == 0);
  std::size_t compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
    const auto rel = fs::relative(e.path(), a);
    CAPTURE(rel.string());
    REQUIRE(fs::exists(b / rel));
    CHECK(slurp(e.path()) == slurp(b / rel));
    ++compared;
  }
  CHECK(compared > 20);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("points and graphs read back what was written") {
  const fs::path dir = scratch("io");
  fs::create_directories(dir);
  const auto w = MetricWindow::torus(2, 7);
  const auto cfg = sample_poisson(w, 1.0, 4);
  io::write_points_csv(dir / "p.csv", cfg);
  CHECK(io::read_points_csv(dir / "p.csv", w).points() == cfg.points());
  const FactorGraph g{4, {{0, 1}, {2, 3}}, false};
  io::write_graph_csv(dir / "g.csv", g);
  CHECK(io::read_graph_csv(dir / "g.csv", 4) == g);
  CHECK(io::format_real(0.1) == "0.10000000000000001");
  fs::remove_all(dir);
}

TEST_CASE("unwritable output directory is reported") {
  const fs::path dir = scratch("ro");
  fs::create_directories(dir);
  io::write_text(dir / "file", "x");
  CHECK_THROWS((void)run_experiment(parse_config(kFixture), dir / "file" / "out", 1));
  fs::remove_all(dir);
}
