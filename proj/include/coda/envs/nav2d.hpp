#pragma once

#include <array>
#include <cstdint>

#include "coda/core/dataset.hpp"
#include "coda/lcm/mask.hpp"

namespace coda {

/// Point-mass navigation on the unit square. Outside the top-right quadrant
/// each sub-action moves only its own coordinate; strictly inside the
/// quadrant (x > 0.5 and y > 0.5) the displacement is mixed by `coupling`
/// and the coordinates additionally mix through [[1-m, m], [m, 1-m]]
/// (identity on the diagonal), so every input moves every coordinate and
/// the quadrant Jacobian is dense. Sparse reward: -1 everywhere except
/// within goal_radius of the goal, where it is 0. Episodes run for up to
/// `horizon` steps.
struct Nav2dConfig {
  double step_scale = 0.05;
  std::array<std::array<double, 2>, 2> coupling = {{{0.6, 0.4}, {0.4, 0.6}}};
  double state_mix = 0.05;
  std::array<double, 2> start = {0.1, 0.1};
  std::array<double, 2> goal = {0.9, 0.9};
  double goal_radius = 0.1;
  int horizon = 70;
  // Empirical data bands: left-to-right trajectories live in the bottom
  // band (y <= band_height), bottom-to-top ones in the right band
  // (x >= 1 - band_width).
  double band_height = 0.25;
  double band_width = 0.25;

  void validate() const;
};

FactorSpec nav2d_spec();

struct StepResult {
  Vec s_next;
  double r;
  bool at_goal;
};

/// Rejects out-of-box inputs (s in [0,1]^2, a in [-1,1]^2).
StepResult nav2d_step(const Vec& s, const Vec& a, const Nav2dConfig& cfg);

/// Deterministic next state only (for mask probing and oracles).
Vec nav2d_next(const Vec& s, const Vec& a, const Nav2dConfig& cfg);

double nav2d_reward(const Vec& s_next, const Nav2dConfig& cfg);

/// Local mask: block-diagonal base, all-ones strictly inside the top-right
/// quadrant (x > 0.5 and y > 0.5; boundary points keep the base mask).
LocalMask nav2d_mask(const Vec& s, const Vec& a);

LocalModel nav2d_local_model();

/// Parent sets of the sparsest local graph over flat (s|a) dims:
/// child x <- {x, ax}, child y <- {y, ay}.
std::vector<std::vector<std::size_t>> nav2d_parent_sets();

/// Left-to-right and bottom-to-top trajectories (n_per_kind transitions of
/// each kind) confined to the two bands, with per-trajectory noisy
/// headings. Deterministic for a fixed seed.
Dataset gen_emp_data(std::size_t n_per_kind, std::uint64_t seed, const Nav2dConfig& cfg);

}  // namespace coda
