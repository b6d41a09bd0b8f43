#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "coda/core/types.hpp"

namespace coda {

/// Factor-level adjacency from time-t state and action factors (rows, state
/// first) to time-t+1 state factors (columns). Entries are 0/1.
class LocalMask {
 public:
  LocalMask(std::size_t rows, std::size_t cols, std::uint8_t fill = 0)
      : rows_(rows), cols_(cols), entries_(rows * cols, fill) {}

  static LocalMask from_rows(const std::vector<std::vector<int>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint8_t at(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, bool v) { entries_[r * cols_ + c] = v ? 1 : 0; }
  const std::vector<std::uint8_t>& entries() const { return entries_; }

  /// Row-major 0/1 CSV (one line per row).
  std::string to_csv() const;
  static LocalMask from_csv(const std::string& text);

  bool operator==(const LocalMask&) const = default;

 private:
  std::size_t rows_, cols_;
  std::vector<std::uint8_t> entries_;
};

/// Connected components over the factor nodes of a LocalMask. A state
/// factor occupies one node across the time slice (row i and column i are
/// identified); an action factor is its own node (the dummy next-action
/// column collapses onto it). Components are sorted by smallest member.
struct ComponentPartition {
  std::vector<std::size_t> factor_to_component;
  std::vector<std::vector<std::size_t>> components;

  std::string to_json() const;
};

/// Nonempty proper unions of components: 2^c - 2 factor subsets, in
/// binary-counter order over the sorted component list. Empty when c <= 1.
struct IndependentSets {
  std::vector<std::vector<std::size_t>> sets;
};

using MaskFunction = std::function<LocalMask(const Vec& s, const Vec& a)>;
using DynamicsFn = std::function<Vec(const Vec& s, const Vec& a)>;

/// Mask function bundled with the identifier of the local neighborhood the
/// mask is valid in. Counterfactual swaps are only sound between transitions
/// whose neighborhoods share structural equations; by default a neighborhood
/// is identified with the mask pattern itself, which is exact whenever
/// distinct dynamics regimes produce distinct masks. Environments where the
/// same mask spans regimes with different equations must supply region().
class LocalModel {
 public:
  explicit LocalModel(MaskFunction mask);
  LocalModel(MaskFunction mask, std::function<std::string(const Vec&, const Vec&)> region);

  LocalMask mask(const Vec& s, const Vec& a) const { return mask_(s, a); }
  std::string region(const Vec& s, const Vec& a) const;

 private:
  MaskFunction mask_;
  std::function<std::string(const Vec&, const Vec&)> region_;
};

LocalMask eval_mask(const MaskFunction& mask_fn, const FactorSpec& spec, const Vec& s,
                    const Vec& a);

ComponentPartition components(const LocalMask& mask);

IndependentSets independent_sets(const ComponentPartition& partition);

struct JacobianMaskResult {
  LocalMask mask;
  /// True when a probe would have left the bounds and a one-sided
  /// difference was used for some input dim.
  bool used_one_sided = false;
};

/// Finite-difference ground-truth mask: entry (i, j) = 1 iff some dim of
/// input factor i moves some dim of next-state factor j by more than tau
/// per unit input (central differences of half-width probe_eps; one-sided
/// at the bounds, flagged in the result).
JacobianMaskResult jacobian_mask(const DynamicsFn& dynamics, const FactorSpec& spec,
                                 const Vec& s, const Vec& a, double probe_eps, double tau);

struct ProbeGrid {
  /// One value list per input dim (state dims then action dims).
  std::vector<std::vector<double>> values;
};

/// Evenly spaced grid over the spec bounds with count[i] points per dim.
ProbeGrid make_probe_grid(const FactorSpec& spec, const std::vector<std::size_t>& counts);

struct FalseNegative {
  std::vector<double> probe;   // flat (s|a) of the base probe
  std::size_t input_factor;    // factor whose change had an unmasked effect
  std::size_t child_factor;
  double alternative_value;    // grid value that exposed the effect
};

struct EdgeStat {
  std::size_t input_factor;
  std::size_t child_factor;
  std::size_t present_count = 0;    // probes whose mask carries the edge
  std::size_t exercised_count = 0;  // probe pairs with an observed direct effect
};

struct MinimalityReport {
  std::vector<FalseNegative> false_negatives;  // stored examples (capped)
  std::size_t false_negative_pairs = 0;        // total offending pairs
  std::vector<EdgeStat> edges;
  /// Edges present somewhere on the grid but never exercised by any probe
  /// pair: candidates for non-minimality. Report-only.
  std::vector<EdgeStat> unused_edges() const;
};

/// Probes the true dynamics over a grid: any pair of probes differing only
/// in one input factor whose next state differs in child factor j must have
/// the edge in at least one of the pair's masks, else it is recorded as a
/// false negative. effect_eps is the per-dim change threshold (0 = exact).
MinimalityReport verify_minimality(const DynamicsFn& env_true_step, const MaskFunction& mask_fn,
                                   const FactorSpec& spec, const ProbeGrid& grid,
                                   double effect_eps = 0.0);

}  // namespace coda
