#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "ppfg/experiment.hpp"
#include "ppfg/io.hpp"
#include "ppfg/oracle.hpp"
#include "ppfg/random.hpp"

namespace fs = std::filesystem;
using namespace ppfg;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::string out;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::string points;
  std::size_t max_points = 9;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "experiment config (YAML)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "master seed, overrides the config");
  cmd->add_option("--runs", o.runs, "number of runs, overrides the config")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig load(const Options& o) {
  ExperimentConfig c = load_config(o.config);
  if (o.seed) c.seeds.master = *o.seed;
  if (o.runs) c.seeds.runs = *o.runs;
  validate(c);
  return c;
}

// --out, then the config's output, then $PPFG_OUT_ROOT (or the working directory) plus a hash-named folder.
fs::path output_dir(const Options& o, const ExperimentConfig& c) {
  if (!o.out.empty()) return o.out;
  if (!c.output.empty()) return c.output;
  const char* root = std::getenv("PPFG_OUT_ROOT");
  return fs::path(root && *root ? root : ".") / ("ppfg-" + hex(config_hash(c)).substr(0, 8));
}

int cmd_run(const Options& o) {
  const ExperimentConfig c = load(o);
  const fs::path out = output_dir(o, c);
  const ExperimentResult r = run_experiment(c, out, o.jobs, &std::cerr);
  std::cout << "runs " << r.runs.size() << ", failed " << r.failed_runs << ", output " << out.string() << '\n';
  return r.exit_status();
}

int cmd_gen(const Options& o) {
  const ExperimentConfig c = load(o);
  const fs::path out = output_dir(o, c);
  fs::create_directories(out);
  io::write_text(out / "config.yaml", to_yaml(c));
  for (std::size_t i = 0; i < c.seeds.runs; ++i) {
    const fs::path dir = out / run_directory_name(i);
    fs::create_directories(dir);
    io::write_points_csv(dir / "points.csv", generate_points(c, derive_seed(c.seeds.master, i)));
  }
  std::cout << "wrote " << c.seeds.runs << " point sets to " << out.string() << '\n';
  return 0;
}

int cmd_single(const Options& o, bool analyze) {
  const ExperimentConfig c = load(o);
  const PointConfiguration cfg = io::read_points_csv(o.points, c.window.make());
  const fs::path out = output_dir(o, c);
  fs::create_directories(out);
  const RunRecord rec = process_configuration(c, cfg, 0, out, analyze);
  for (const auto& f : rec.failures) std::cerr << f << '\n';
  std::cout << "n " << rec.n << ", failures " << rec.failures.size() << ", output " << out.string() << '\n';
  return rec.failures.empty() ? 0 : 1;
}

int cmd_oracle(const Options& o) {
  const ExperimentConfig c = load(o);
  std::size_t checks = 0;
  std::size_t mismatches = 0;
  auto check = [&](bool same, std::size_t run, const char* what) {
    ++checks;
    if (!same) {
      ++mismatches;
      std::cerr << "run " << run << ": " << what << " differs from its oracle\n";
    }
  };
  for (std::size_t i = 0; i < c.seeds.runs; ++i) {
    const PointConfiguration full = generate_points(c, derive_seed(c.seeds.master, i));
    // uniform points are exchangeable, so a prefix is again a uniform sample
    std::vector<Point> pts(full.points().begin(),
                           full.points().begin() + static_cast<std::ptrdiff_t>(std::min(full.size(), o.max_points)));
    const PointConfiguration cfg(full.window(), std::move(pts), full.rng_seed());
    const auto params = ClumpingParams::for_window(cfg.window(), c.clumping.k_max);
    const ClumpHierarchy h = build_hierarchy(cfg, params);
    const auto ref = oracle::hierarchy(cfg, params);
    bool same = true;
    for (int k = 1; k <= h.k_max; ++k) same = same && oracle::canonical_labels(h.level(k)) == ref[static_cast<std::size_t>(k - 1)];
    check(same, i, "hierarchy");
    const OneEndedTree t = build_one_ended_tree(cfg, h, c.clumping.leader_pool);
    check(oracle::one_ended_tree(cfg, h, c.clumping.leader_pool) == t.graph, i, "tree");
    check(oracle::dfs(t.graph, cfg, t.root()) == dfs_order(t.graph, cfg, t.root()).ids, i, "dfs ordering");
    if (cfg.size() <= kCycleOracleLimit) check(msf_cycle_oracle(cfg) == minimal_spanning_forest(cfg), i, "msf");
    check(oracle::clump_greedy(cfg, h) == clump_greedy_matching(cfg, h).matching, i, "clump matching");
    const auto mr = iterated_mnn_matching(cfg);
    const auto om = oracle::mnn(cfg);
    check(om.matching == mr.matching && om.round_of == mr.round_of, i, "iterated matching");
    if (cfg.size() <= oracle::kChainOracleLimit) {
      check(oracle::longest_chain(cfg) == find_descending_chains(cfg, 0).length, i, "descending chains");
    }
  }
  std::cout << "oracle checks " << checks << ", mismatches " << mismatches << '\n';
  return mismatches == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"point-process factor graphs: generate, build, analyze"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "generate, build and analyze every run of an experiment");
  add_common(run, o);
  auto* gen = app.add_subcommand("gen", "write the point sets of an experiment");
  add_common(gen, o);
  auto* build = app.add_subcommand("build", "run the constructions on one point file");
  add_common(build, o);
  build->add_option("--points", o.points, "points CSV")->required()->check(CLI::ExistingFile);
  auto* analyze = app.add_subcommand("analyze", "constructions plus analyses on one point file");
  add_common(analyze, o);
  analyze->add_option("--points", o.points, "points CSV")->required()->check(CLI::ExistingFile);
  auto* orc = app.add_subcommand("oracle", "compare against brute-force oracles on small instances");
  add_common(orc, o);
  orc->add_option("--max-points", o.max_points, "points kept per instance")->check(CLI::Range(1, 60));

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(o);
    if (gen->parsed()) return cmd_gen(o);
    if (build->parsed()) return cmd_single(o, false);
    if (analyze->parsed()) return cmd_single(o, true);
    if (orc->parsed()) return cmd_oracle(o);
  } catch (const ContractViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
