#pragma once

#include <cstdint>
#include <string_view>

namespace coda {

/// Deterministic random stream: xoshiro256++ seeded through splitmix64.
/// All distribution draws are hand-rolled (no std::*_distribution) so that
/// a given seed produces the same byte-identical stream on every platform
/// and toolchain. Independent streams are derived from a root seed plus a
/// label or index, so adding a consumer never shifts another stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);

  /// Uniform integer in [0, n), unbiased (rejection), n > 0.
  std::uint64_t uniform_below(std::uint64_t n);

  /// Standard normal via Box-Muller (second value cached).
  double normal();
  double normal(double mean, double stddev);

  static std::uint64_t derive(std::uint64_t seed, std::string_view stream);
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index);

 private:
  std::uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace coda
