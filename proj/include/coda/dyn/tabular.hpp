#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "coda/core/dataset.hpp"
#include "coda/parent/samplers.hpp"

namespace coda {

/// Maximum-likelihood count-based factored dynamics model over discrete
/// single-dim factors: per child i and parent configuration x, counts over
/// the child alphabet give P_i(c_ij | x) = theta_j / sum_k theta_k.
/// Unvisited parent configurations predict uniform over the child alphabet.
class TabularFactoredModel {
 public:
  TabularFactoredModel(ParentGraph graph, std::vector<std::size_t> dim_alphabets,
                       std::size_t n_state_dims);

  const ParentGraph& graph() const { return graph_; }
  const std::vector<std::size_t>& dim_alphabets() const { return dim_alphabets_; }
  std::size_t n_state_dims() const { return n_state_; }

  void observe(const Vec& s, const Vec& a, const Vec& s_next);

  /// P_i(. | parent config taken from (s|a)).
  std::vector<double> predict_child(std::size_t child, const Vec& s, const Vec& a) const;

  /// Product model over the joint next state, indexed by mixed-radix code
  /// (factor 0 most significant).
  std::vector<double> predict_joint(const Vec& s, const Vec& a) const;

  std::uint64_t total_count() const { return total_; }

  std::string to_json() const;
  static TabularFactoredModel from_json(const std::string& text);

 private:
  std::size_t parent_config_index(std::size_t child, const Vec& s, const Vec& a) const;
  std::size_t dim_value(std::size_t dim, const Vec& s, const Vec& a) const;

  ParentGraph graph_;
  std::vector<std::size_t> dim_alphabets_;  // per (s|a) dim
  std::size_t n_state_;
  std::vector<std::vector<std::uint64_t>> counts_;  // [child][config * alphabet + value]
  std::vector<std::size_t> config_counts_;          // parent configs per child
  std::uint64_t total_ = 0;
};

/// Counts every transition of a discrete dataset. All factors must be
/// single-dim with integral values inside their alphabets; offending rows
/// are rejected with std::invalid_argument.
TabularFactoredModel fit_count_model(const Dataset& ds, const ParentGraph& graph,
                                     const std::vector<std::size_t>& dim_alphabets);

using TrueJointFn = std::function<std::vector<double>(const Vec& s, const Vec& a)>;

struct L1Report {
  double max_joint_l1 = 0.0;
  Vec argmax_s, argmax_a;
  /// max over parent configs of the per-child conditional l1 error, and
  /// their sum (the union-style aggregation bound: joint <= sum of parts).
  std::vector<double> per_child_max_l1;
  double child_sum_bound = 0.0;
};

/// Exact max over every enumerable (s, a) of || P(s,a) - P_model(s,a) ||_1.
L1Report max_l1_error(const TabularFactoredModel& model, const TrueJointFn& true_joint);

}  // namespace coda
