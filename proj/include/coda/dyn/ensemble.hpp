#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coda/core/dataset.hpp"
#include "coda/dyn/mlp.hpp"
#include "coda/lcm/mask.hpp"
#include "coda/parent/samplers.hpp"

namespace coda {

enum class DynArch { kUnfactored, kGlobalFactored, kLocalFactored };

const char* to_string(DynArch a);
DynArch dyn_arch_from_string(const std::string& s);

struct RegressorHyper {
  std::size_t hidden_layers = 2;
  std::size_t width = 256;
  std::size_t embed_width = 0;  // masked-composer embedding width; 0 = width
  double lr = 1e-4;
  std::size_t batch = 512;
  std::size_t epochs = 600;
  std::size_t patience = 50;  // checkpoint window at the end of training
  double var_floor = 1e-8;
};

/// One Gaussian-output dynamics model. Unfactored: a single net over
/// (s|a). Globally factored: one net per child over its parent dims.
/// Locally factored: per child, a masked composer — per-parent-set linear
/// ReLU embeddings, zeroed by the child's mask column and summed, feeding
/// the child net. All variants predict next-state residuals with a
/// per-dim (mean, logvar) head.
class DynamicsMember {
 public:
  DynamicsMember(DynArch arch, const FactorSpec& spec, const ParentGraph& graph,
                 const RegressorHyper& hyper, std::uint64_t seed);

  DynArch arch() const { return arch_; }
  std::size_t n_sets() const { return set_dims_.size(); }

  /// Per-row gate vector (n_sets x n_children) from a local mask: a parent
  /// set is live for a child iff every factor it touches is unmasked.
  Vec gates_from_mask(const LocalMask& mask) const;

  /// x: batch rows of (s|a); gates: batch rows (empty unless local arch).
  void predict(const DataMatrix& x, const DataMatrix& gates, DataMatrix& mean,
               DataMatrix& logvar) const;

  /// Mean Gaussian NLL of the residual targets (s_next - s).
  double nll(const DataMatrix& x, const DataMatrix& gates, const DataMatrix& s_next) const;

  /// Forward + backward + Adam step on one batch; returns the batch NLL.
  double train_batch(const DataMatrix& x, const DataMatrix& gates, const DataMatrix& s_next);

  /// Max relative disagreement between analytic parameter gradients and
  /// central finite differences of the single-probe NLL.
  double grad_check(const Vec& x, const Vec& gates, const Vec& s_next, double eps);

  void reinit(std::uint64_t seed, double lr);

  const std::vector<Mlp>& nets() const { return nets_; }
  std::vector<Mlp>& nets() { return nets_; }

 private:
  struct Ws;
  void forward_raw(const DataMatrix& x, const DataMatrix& gates, DataMatrix& out) const;

  DynArch arch_;
  std::size_t n_state_dims_, in_dims_;
  std::vector<std::vector<std::size_t>> child_dims_;  // state dims per child factor
  std::vector<std::vector<std::size_t>> set_dims_;    // parent dims per distinct set
  std::vector<std::vector<std::size_t>> set_factors_; // factor rows each set touches
  double var_floor_;
  // nets_: unfactored -> [net]; global -> one per child;
  // local -> per child: [embed_0..embed_{k-1}, trunk] appended in child order
  std::vector<Mlp> nets_;
  std::vector<Adam> opts_;
  std::vector<Vec> grads_;
};

struct FitReport {
  std::vector<Vec> val_nll_per_epoch;   // per member
  std::vector<double> chosen_val_nll;   // at the selected checkpoint
  std::vector<bool> restarted;
  std::vector<bool> failed;
};

class RegressorEnsemble {
 public:
  static constexpr std::size_t kMembers = 5;

  RegressorEnsemble(DynArch arch, FactorSpec spec, ParentGraph graph, RegressorHyper hyper,
                    std::uint64_t seed);

  DynArch arch() const { return arch_; }
  const FactorSpec& spec() const { return spec_; }
  const ParentGraph& graph() const { return graph_; }
  const RegressorHyper& hyper() const { return hyper_; }
  std::vector<DynamicsMember>& members() { return members_; }
  const std::vector<DynamicsMember>& members() const { return members_; }
  const std::vector<bool>& failed() const { return failed_; }
  void set_failed(std::size_t m, bool v) { failed_[m] = v; }

  /// Mean prediction of one member (residual added back to s).
  Vec predict_mean(std::size_t member, const Vec& s, const Vec& a,
                   const LocalMask& mask) const;

  void save(const std::string& bin_path) const;  // manifest at <bin_path>.json
  static RegressorEnsemble load(const std::string& bin_path);

 private:
  DynArch arch_;
  FactorSpec spec_;
  ParentGraph graph_;
  RegressorHyper hyper_;
  std::uint64_t seed_;
  std::vector<DynamicsMember> members_;
  std::vector<bool> failed_;
};

/// Trains the 5 members in parallel (independent seed streams); Gaussian
/// NLL with validation-window checkpointing. A member whose loss goes
/// non-finite is restarted once at lr/10, else reported failed.
RegressorEnsemble fit_regressor(const Dataset& train, const Dataset& val, DynArch arch,
                                const MaskFunction& mask_fn, const ParentGraph& graph,
                                const RegressorHyper& hyper, std::uint64_t seed,
                                FitReport* report = nullptr);

/// Uniform-random member, per-dim draw N(mean, (std/shrink)^2), clipped to
/// the state bounds. A non-finite shrink collapses to the mean prediction.
Vec sample_next(const RegressorEnsemble& ens, const Vec& s, const Vec& a,
                const LocalMask& mask, double shrink, Rng& rng);

/// MSE of mean predictions against labeled ground truth, averaged over
/// members, rows and dims.
double eval_mse(const RegressorEnsemble& ens, const Dataset& eval_set,
                const MaskFunction& mask_fn);

}  // namespace coda
