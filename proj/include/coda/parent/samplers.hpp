#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coda/core/dataset.hpp"
#include "coda/parent/gmm.hpp"

namespace coda {

/// Causal structure of the transition dynamics: for each child state
/// factor, the set of parent dims over the flat (s|a) vector.
struct ParentGraph {
  std::vector<std::vector<std::size_t>> parents;  // one entry per state factor

  void validate(const FactorSpec& spec) const;

  std::string to_json() const;
  static ParentGraph from_json(const std::string& text);
};

enum class ParentSource { kEmp, kRand, kDyna, kMocoda, kMocodaU, kMocodaP };

const char* to_string(ParentSource s);

struct ParentSamples {
  DataMatrix rows;  // (s|a) concatenated
  ParentSource source = ParentSource::kEmp;
  std::size_t truncated_rollouts = 0;  // dyna only

  Vec row_vec(std::size_t i) const {
    return Vec(rows.row(i), rows.row(i) + rows.cols);
  }
};

/// One GMM per distinct parent set, keyed by its sorted dim list.
struct ParentSetModel {
  std::vector<std::size_t> dims;
  GMM gmm;
};

struct ParentModels {
  std::vector<ParentSetModel> sets;

  std::string to_json() const;
  static ParentModels from_json(const std::string& text);
};

/// (s|a) rows of a dataset as a matrix.
DataMatrix dataset_parent_rows(const Dataset& ds);

/// Fits one GMM per distinct parent set on the marginal of its dims.
/// Errors at setup if some (s|a) dim is covered by no parent set.
ParentModels fit_parent_models(const Dataset& ds, const ParentGraph& graph, std::size_t k,
                               const EmOptions& opts, std::uint64_t seed);

/// Maximum-entropy marginal-matching sampler: children are visited in graph
/// order (optionally shuffled per sample); each unseen parent set is drawn
/// from its GMM conditioned on any dims already assigned by earlier sets.
/// An optional region predicate rejects rows outside the neighborhood the
/// models were fit on.
ParentSamples sample_mocoda(const ParentModels& models, const ParentGraph& graph,
                            const FactorSpec& spec, std::size_t n, Rng& rng,
                            bool shuffle = false,
                            const std::function<bool(const Vec&)>& region_ok = nullptr);

/// Uniform state-actions within the spec bounds.
ParentSamples sample_rand(const FactorSpec& spec, std::size_t n, Rng& rng);

using DynamicsSampler = std::function<Vec(const Vec& s, const Vec& a, Rng& rng)>;

/// Short model rollouts from empirical start states with uniform random
/// actions, emitting every visited (s, a). Rollouts whose model output goes
/// non-finite are truncated and counted.
ParentSamples sample_dyna(const Dataset& ds, const DynamicsSampler& model,
                          std::size_t steps, std::size_t n, Rng& rng);

struct PruneOptions {
  std::vector<std::size_t> feature_dims;  // dims of the KDE feature map
  double bandwidth = 0.05;
  double floor_density = 0.01;
  std::size_t fit_window = 10000;  // KDE is fit on the last fit_window rows
};

/// Rejection-reweights toward the uniform distribution over the support of
/// the feature map: acceptance probability proportional to the clipped
/// inverse density, scaled so the expected kept count is about target_size.
ParentSamples prune_to_uniform(const ParentSamples& samples, const PruneOptions& opts,
                               std::size_t target_size, Rng& rng);

struct PrioritizedStats {
  std::size_t survivors = 0;
  bool kept_all = false;  // target exceeded the survivor count
};

/// Task-prioritized variant: applies filter_pred first, then iteratively
/// rescales the inverse-density scores (geometric 0.99 steps) until the
/// expected kept count is about target_size. Throws std::runtime_error when
/// the filter keeps fewer than target_size/10 rows.
ParentSamples prune_prioritized(const ParentSamples& samples,
                                const std::function<bool(const Vec&)>& filter_pred,
                                const PruneOptions& opts, std::size_t target_size, Rng& rng,
                                PrioritizedStats* stats = nullptr);

}  // namespace coda
