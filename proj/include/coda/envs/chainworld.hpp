#pragma once

#include <cstdint>
#include <vector>

#include "coda/core/dataset.hpp"

namespace coda {

/// Discrete factored oracle environment: k state factors, one action
/// factor, and per-child conditional tables P_i(c_i' | c_i, a). Factors are
/// stored as integer-valued doubles in Transition vectors. Exact tables are
/// exposed so count models can be compared to the true law.
struct ChainworldConfig {
  /// Alphabet size per state factor (k = alphabets.size()).
  std::vector<std::size_t> alphabets;
  std::size_t action_alphabet = 2;
  /// tables[i] has alphabets[i] * action_alphabet rows (row index =
  /// value * action_alphabet + action), each row a distribution over
  /// alphabets[i] next values, summing to 1.
  std::vector<std::vector<std::vector<double>>> tables;

  std::size_t k() const { return alphabets.size(); }
  void validate() const;
};

/// Uniformly random (seeded) conditional tables.
ChainworldConfig make_chainworld(const std::vector<std::size_t>& alphabets,
                                 std::size_t action_alphabet, std::uint64_t seed);

FactorSpec chainworld_spec(const ChainworldConfig& cfg);

/// Exact joint next-state law at (s, a): product over factors, indexed by
/// mixed-radix encoding of the next state.
std::vector<double> chainworld_true_joint(const ChainworldConfig& cfg, const Vec& s,
                                          const Vec& a);

std::size_t chainworld_state_count(const ChainworldConfig& cfg);

/// Mixed-radix helpers over the state alphabets (factor 0 most significant).
std::size_t chainworld_encode_state(const ChainworldConfig& cfg, const Vec& s);
Vec chainworld_decode_state(const ChainworldConfig& cfg, std::size_t code);

/// Samples N transitions. With even_allocation the (s, a) pairs cycle
/// round-robin through the joint enumeration so every parent configuration
/// receives the same visit count (up to remainder); otherwise (s, a) is
/// uniform random. Next states are always drawn from the true tables.
Dataset chainworld_sample(const ChainworldConfig& cfg, std::size_t n, bool even_allocation,
                          std::uint64_t seed);

/// The same data flattened to a single super-factor state and one action
/// factor, for fitting an unfactored joint count model.
Dataset chainworld_flatten(const ChainworldConfig& cfg, const Dataset& ds);
FactorSpec chainworld_flat_spec(const ChainworldConfig& cfg);

}  // namespace coda
