#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "coda/core/dataset.hpp"
#include "coda/lcm/mask.hpp"
#include "coda/util/rng.hpp"

namespace coda {

using RewardFn = std::function<double(const Vec& s, const Vec& a, const Vec& s_next)>;

enum class CodaReject { kNone, kNoSharedSet, kPostMaskMismatch };

struct CodaProposal {
  std::size_t source_a = 0;
  std::size_t source_b = 0;
  std::vector<std::size_t> swapped_set;  // factor indices
  Transition result;                     // reward is NaN until relabeled
  bool accepted = false;
  CodaReject reject_reason = CodaReject::kNone;
};

/// One Algorithm-1 swap attempt between two transitions sharing a spec.
/// Samples the swapped set uniformly from the shared independent sets,
/// copies the per-factor (s, a, s') slices from t2 into a copy of t1,
/// re-evaluates the mask on the result and accepts only if the swapped set
/// is still independent there and all three transitions sit in one local
/// neighborhood (shared structural equations). The result's reward is left
/// NaN; callers relabel it.
CodaProposal coda_swap(const Transition& t1, const Transition& t2, const LocalModel& model,
                       const FactorSpec& spec, Rng& rng);

/// Deterministic variant: one proposal per shared independent set, in
/// enumeration order.
std::vector<CodaProposal> coda_swap_all(const Transition& t1, const Transition& t2,
                                        const LocalModel& model, const FactorSpec& spec);

/// Copy of t with r := reward_fn(s, a, s_next).
Transition relabel_reward(const Transition& t, const RewardFn& reward_fn);

/// Rewrites the goal dims (state factors with identity dynamics) of s and
/// s_next to g_new and recomputes the reward. Throws std::invalid_argument
/// if t's goal dims changed between t and t+1 (the independence argument
/// needs identity dynamics).
Transition relabel_goal(const Transition& t, const FactorSpec& spec,
                        const std::vector<std::size_t>& goal_factors, const Vec& g_new,
                        const RewardFn& reward_fn);

struct AmplifyStats {
  std::size_t attempts = 0;
  std::size_t accepted = 0;
  std::size_t rejected_no_shared_set = 0;
  std::size_t rejected_post_mask = 0;
  std::size_t truncated = 0;  // accepted proposals dropped by the ratio cap
};

/// Draws pair_budget source pairs uniformly with replacement, attempts
/// per_pair swaps each, relabels accepted results, and returns
/// real ∪ coda with |coda| <= max_ratio * |real|. Deterministic per seed
/// and independent of the worker schedule (per-pair RNG streams).
Dataset amplify(const Dataset& ds, const LocalModel& model, const RewardFn& reward_fn,
                std::size_t pair_budget, std::size_t per_pair, double max_ratio,
                std::uint64_t seed, AmplifyStats* stats = nullptr);

/// Counts the distinct (s, a, s') tuples reachable by choosing one source
/// per connected component, per shared component structure (strata counted
/// separately, total returned). Exhaustive; requires |ds| <= 64.
std::size_t enumerate_proposals(const Dataset& ds, const LocalModel& model);

}  // namespace coda
