#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace coda {

using Vec = std::vector<double>;

struct Factor {
  std::string name;
  std::size_t dim = 1;

  bool operator==(const Factor&) const = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  bool operator==(const Interval&) const = default;
};

/// Layout of a factored state/action space. States decompose into ordered
/// named factors, actions likewise; every scalar dimension carries a bound.
/// Vectors are stored flat; factors address contiguous index ranges.
class FactorSpec {
 public:
  /// bounds covers state dims then action dims. Throws std::invalid_argument
  /// on empty state factors, duplicate names, non-positive dims or lo >= hi.
  FactorSpec(std::vector<Factor> state_factors, std::vector<Factor> action_factors,
             std::vector<Interval> bounds);

  const std::vector<Factor>& state_factors() const { return state_factors_; }
  const std::vector<Factor>& action_factors() const { return action_factors_; }
  const std::vector<Interval>& bounds() const { return bounds_; }

  std::size_t n_state_factors() const { return state_factors_.size(); }
  std::size_t n_action_factors() const { return action_factors_.size(); }
  /// Total factor count, state factors first then action factors.
  std::size_t n_factors() const { return state_factors_.size() + action_factors_.size(); }

  std::size_t state_dims() const { return state_dims_; }
  std::size_t action_dims() const { return action_dims_; }

  /// First flat dim of a state factor (within state vectors).
  std::size_t state_factor_offset(std::size_t f) const { return state_offsets_[f]; }
  std::size_t state_factor_dim(std::size_t f) const { return state_factors_[f].dim; }
  /// First flat dim of an action factor (within action vectors).
  std::size_t action_factor_offset(std::size_t f) const { return action_offsets_[f]; }
  std::size_t action_factor_dim(std::size_t f) const { return action_factors_[f].dim; }

  /// Bound for a state dim / action dim.
  const Interval& state_bound(std::size_t d) const { return bounds_[d]; }
  const Interval& action_bound(std::size_t d) const { return bounds_[state_dims_ + d]; }

  bool operator==(const FactorSpec&) const = default;

 private:
  std::vector<Factor> state_factors_;
  std::vector<Factor> action_factors_;
  std::vector<Interval> bounds_;
  std::vector<std::size_t> state_offsets_;
  std::vector<std::size_t> action_offsets_;
  std::size_t state_dims_ = 0;
  std::size_t action_dims_ = 0;
};

struct Transition {
  Vec s;
  Vec a;
  Vec s_next;
  double r = 0.0;

  bool operator==(const Transition&) const = default;
};

enum class Provenance { kReal, kCoda, kMocoda, kDyna, kRand };

const char* to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

}  // namespace coda
