#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "coda/core/types.hpp"

namespace coda {

/// Immutable once constructed; safe to share read-only across workers.
class Dataset {
 public:
  explicit Dataset(FactorSpec spec) : spec_(std::move(spec)) {}
  Dataset(FactorSpec spec, std::vector<Transition> transitions,
          std::vector<Provenance> provenance);

  const FactorSpec& spec() const { return spec_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const std::vector<Provenance>& provenance() const { return provenance_; }
  std::size_t size() const { return transitions_.size(); }
  const Transition& operator[](std::size_t i) const { return transitions_[i]; }

  /// Validates shape and finiteness against the spec before appending.
  /// Throws std::invalid_argument naming the (0-based) row index on failure.
  void append(const Transition& t, Provenance p);

 private:
  FactorSpec spec_;
  std::vector<Transition> transitions_;
  std::vector<Provenance> provenance_;
};

/// Builds a Dataset from raw rows of n+m+n+1 finite entries
/// (s | a | s_next | r); provenance is all `real`, order preserved.
Dataset make_dataset(const FactorSpec& spec, const std::vector<Vec>& rows);

/// Disjoint uniform-random (train, val) split; byte-identical for a given
/// seed. Requires 0 < val_count < |ds|.
std::pair<Dataset, Dataset> split_train_val(const Dataset& ds, std::size_t val_count,
                                            std::uint64_t seed);

}  // namespace coda
