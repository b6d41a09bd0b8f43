#pragma once

// Test-only oracles, independent of the implementation paths they check.

#include <cstddef>
#include <vector>

#include "coda/core/types.hpp"

namespace coda::testing {

/// Brute-force connected components over factor nodes by transitive
/// closure of the symmetric adjacency implied by a mask's edge list
/// (state factor i is one node for row i and column i).
inline std::vector<std::vector<std::size_t>> closure_components(
    std::size_t n_factors, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::vector<bool>> adj(n_factors, std::vector<bool>(n_factors, false));
  for (std::size_t i = 0; i < n_factors; ++i) adj[i][i] = true;
  for (auto [a, b] : edges) {
    adj[a][b] = true;
    adj[b][a] = true;
  }
  for (std::size_t k = 0; k < n_factors; ++k)
    for (std::size_t i = 0; i < n_factors; ++i)
      for (std::size_t j = 0; j < n_factors; ++j)
        if (adj[i][k] && adj[k][j]) adj[i][j] = true;
  std::vector<bool> seen(n_factors, false);
  std::vector<std::vector<std::size_t>> comps;
  for (std::size_t i = 0; i < n_factors; ++i) {
    if (seen[i]) continue;
    std::vector<std::size_t> comp;
    for (std::size_t j = 0; j < n_factors; ++j) {
      if (adj[i][j]) {
        comp.push_back(j);
        seen[j] = true;
      }
    }
    comps.push_back(comp);
  }
  return comps;
}

/// All nonempty proper unions of the given components (powerset oracle).
inline std::size_t powerset_proper_union_count(std::size_t n_components) {
  if (n_components < 2) return 0;
  return (std::size_t{1} << n_components) - 2;
}

}  // namespace coda::testing
