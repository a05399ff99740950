#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ppfg {

/// SplitMix64 finalizer. Used to derive independent per-run seeds.
[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x);

/// Seed of run `index` in an ensemble: splitmix64(master + (index + 1) * golden gamma).
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Portable random source. mt19937_64 output is fixed by the standard; the
/// conversions below are ours so that draws do not depend on the standard
/// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform on {0, ..., n-1}; n > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Poisson(mean) via inversion (mean < 30) or PTRS transformed rejection.
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

/// Name of the count sampler used for a given mean; recorded in run manifests.
[[nodiscard]] std::string_view poisson_algorithm(double mean);

inline constexpr double kPoissonInversionLimit = 30.0;

}  // namespace ppfg
