#pragma once

#include <cstdint>
#include <vector>

#include "coda/parent/gmm.hpp"  // DataMatrix
#include "coda/util/rng.hpp"

namespace coda {

/// Fully connected ReLU net with a linear head, parameters in one flat
/// vector (weights then bias per layer). Batched forward/backward run on
/// the dispatched simd kernels. Initialization is fan-in-scaled uniform.
class Mlp {
 public:
  /// dims = [in, hidden..., out]
  Mlp(std::vector<std::size_t> dims, std::uint64_t seed);

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t in_dim() const { return dims_.front(); }
  std::size_t out_dim() const { return dims_.back(); }
  std::size_t param_count() const { return params_.size(); }
  Vec& params() { return params_; }
  const Vec& params() const { return params_; }

  struct Workspace {
    std::vector<DataMatrix> acts;    // post-activation per layer (last = output)
    std::vector<DataMatrix> deltas;  // gradients flowing backward
  };

  /// Computes activations for a batch; the output lives in ws.acts.back().
  void forward(const DataMatrix& x, Workspace& ws) const;

  /// dLdy must match ws.acts.back(); accumulates parameter gradients into
  /// grad (size param_count) and leaves dL/dx in ws.deltas.front().
  void backward(const DataMatrix& x, Workspace& ws, const DataMatrix& dldy, Vec& grad) const;

  /// Single-row convenience forward.
  Vec forward_one(const Vec& x) const;

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> w_offsets_, b_offsets_;
  Vec params_;
};

/// Adam over a flat parameter vector.
class Adam {
 public:
  Adam(std::size_t n, double lr) : lr_(lr), m_(n, 0.0), v_(n, 0.0) {}

  double lr() const { return lr_; }
  void set_lr(double lr) { lr_ = lr; }
  void step(Vec& params, const Vec& grad);

 private:
  double lr_;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  std::size_t t_ = 0;
  Vec m_, v_;
};

}  // namespace coda
