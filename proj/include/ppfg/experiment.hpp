#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ppfg/analysis.hpp"
#include "ppfg/clumping.hpp"
#include "ppfg/forest.hpp"
#include "ppfg/mnn.hpp"
#include "ppfg/pointgen.hpp"

namespace ppfg {

inline constexpr std::string_view kVersion = "0.1.0";

enum class ProcessKind { Poisson, Lattice, Enriched, Fixed };
enum class Construction { Tree, Dfs, Msf, ClumpMatch, MnnMatch };

[[nodiscard]] std::string_view to_string(ProcessKind kind);
[[nodiscard]] ProcessKind parse_process_kind(std::string_view text);
[[nodiscard]] std::string_view to_string(Construction c);
[[nodiscard]] Construction parse_construction(std::string_view text);

struct WindowSpec {
  WindowKind kind = WindowKind::EuclideanTorus;
  int dimension = 2;
  double extent = 10.0;

  [[nodiscard]] MetricWindow make() const { return {kind, dimension, extent}; }
  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

struct ProcessSpec {
  ProcessKind kind = ProcessKind::Poisson;
  double intensity = 1.0;                    // poisson, enriched
  int chain_length = 5;                      // enriched
  double ratio = 0.5;                        // enriched
  std::vector<std::vector<double>> points;   // fixed

  friend bool operator==(const ProcessSpec&, const ProcessSpec&) = default;
};

struct EnclosureSpec {
  int k_lo = 1;
  int k_hi = 4;
  double probe_radius = 1.0;

  friend bool operator==(const EnclosureSpec&, const EnclosureSpec&) = default;
};

struct AnalysisSpec {
  bool verify = true;
  std::vector<TransportRule> transport;
  std::size_t cells_per_axis = 4;
  std::vector<double> tail_radii;
  bool chains = false;
  std::size_t pair_cap = kDefaultPairCap;
  bool non_equidistance = false;
  /// Compare against the brute-force oracles on runs small enough for them.
  bool oracle = false;
  std::optional<EnclosureSpec> enclosure;

  friend bool operator==(const AnalysisSpec&, const AnalysisSpec&) = default;
};

struct ClumpingSpec {
  std::optional<int> k_max;
  LeaderPool leader_pool = LeaderPool::FullConfiguration;

  friend bool operator==(const ClumpingSpec&, const ClumpingSpec&) = default;
};

struct SeedSpec {
  std::uint64_t master = 1;
  std::size_t runs = 1;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

struct ExperimentConfig {
  WindowSpec window;
  ProcessSpec process;
  std::vector<Construction> constructions;
  AnalysisSpec analyses;
  ClumpingSpec clumping;
  SeedSpec seeds;
  std::string output;

  [[nodiscard]] bool wants(Construction c) const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws ContractViolation on malformed YAML, unknown keys or invalid values.
[[nodiscard]] ExperimentConfig parse_config(std::string_view yaml);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);
[[nodiscard]] std::string to_yaml(const ExperimentConfig& config);
void validate(const ExperimentConfig& config);

/// FNV-1a of the canonical YAML with the output directory left out.
[[nodiscard]] std::uint64_t config_hash(const ExperimentConfig& config);
[[nodiscard]] std::string hex(std::uint64_t value);

[[nodiscard]] PointConfiguration generate_points(const ExperimentConfig& config, std::uint64_t seed);

struct RunRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::vector<std::string> failures;
  Degeneracy degeneracy;
  std::optional<std::size_t> top_clumps;
  std::optional<std::size_t> tree_max_degree;
  std::optional<int> mnn_rounds;
  std::optional<std::size_t> chain_length;
  bool chain_lower_bound = false;
  /// Longest incident edge per point, keyed by construction name.
  std::map<std::string, std::vector<double>> incident;
  std::vector<EnclosureRow> enclosure;
  std::map<std::string, bool> transport_balanced;
  std::optional<bool> non_equidistant;
};

/// Runs the requested constructions (and analyses when `analyze` is set) on
/// one configuration, writing its artifacts into `dir`.
[[nodiscard]] RunRecord process_configuration(const ExperimentConfig& config, const PointConfiguration& cfg,
                                              std::size_t index, const std::filesystem::path& dir, bool analyze);

struct ExperimentResult {
  std::vector<RunRecord> runs;
  std::size_t failed_runs = 0;
  [[nodiscard]] int exit_status() const { return failed_runs == 0 ? 0 : 1; }
};

/// Generates every run, writes run_XXXX/ directories, manifests and
/// summary.json under `out`. Validates the config before touching the disk.
[[nodiscard]] ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out,
                                              unsigned jobs, std::ostream* log = nullptr);

[[nodiscard]] std::string run_directory_name(std::size_t index);

}  // namespace ppfg
