#include "coda/dyn/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "coda/simd/kernels.hpp"

namespace coda {

Mlp::Mlp(std::vector<std::size_t> dims, std::uint64_t seed) : dims_(std::move(dims)) {
  if (dims_.size() < 2) throw std::invalid_argument("Mlp: need at least [in, out]");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    w_offsets_.push_back(total);
    total += dims_[l] * dims_[l + 1];
    b_offsets_.push_back(total);
    total += dims_[l + 1];
  }
  params_.assign(total, 0.0);
  Rng rng(Rng::derive(seed, "mlp-init"));
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims_[l]));
    double* w = params_.data() + w_offsets_[l];
    for (std::size_t i = 0; i < dims_[l] * dims_[l + 1]; ++i) {
      w[i] = rng.uniform(-bound, bound);
    }
    double* b = params_.data() + b_offsets_[l];
    for (std::size_t i = 0; i < dims_[l + 1]; ++i) b[i] = rng.uniform(-bound, bound);
  }
}

void Mlp::forward(const DataMatrix& x, Workspace& ws) const {
  if (x.cols != dims_.front()) throw std::invalid_argument("Mlp::forward: input dim mismatch");
  const std::size_t layers = dims_.size() - 1;
  const std::size_t batch = x.rows;
  ws.acts.resize(layers);
  const auto& kn = simd::active();
  const DataMatrix* prev = &x;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t out = dims_[l + 1];
    DataMatrix& act = ws.acts[l];
    act.rows = batch;
    act.cols = out;
    act.values.assign(batch * out, 0.0);
    // bias broadcast then accumulate the product
    const double* b = params_.data() + b_offsets_[l];
    for (std::size_t r = 0; r < batch; ++r) {
      double* row = act.row(r);
      for (std::size_t j = 0; j < out; ++j) row[j] = b[j];
    }
    kn.mm_nn(act.values.data(), prev->values.data(), params_.data() + w_offsets_[l], batch,
             dims_[l], out);
    if (l + 1 < layers) {
      for (double& v : act.values) v = v > 0.0 ? v : 0.0;  // ReLU
    }
    prev = &act;
  }
}

void Mlp::backward(const DataMatrix& x, Workspace& ws, const DataMatrix& dldy,
                   Vec& grad) const {
  const std::size_t layers = dims_.size() - 1;
  const std::size_t batch = x.rows;
  if (grad.size() != params_.size())
    throw std::invalid_argument("Mlp::backward: grad buffer size mismatch");
  ws.deltas.resize(layers + 1);
  ws.deltas[layers] = dldy;
  const auto& kn = simd::active();
  for (std::size_t l = layers; l-- > 0;) {
    DataMatrix& delta = ws.deltas[l + 1];  // batch x dims_[l+1]
    const DataMatrix& input = l == 0 ? x : ws.acts[l - 1];
    // dW = input^T * delta
    kn.mm_tn(grad.data() + w_offsets_[l], input.values.data(), delta.values.data(),
             dims_[l], batch, dims_[l + 1]);
    // db = column sums of delta
    double* db = grad.data() + b_offsets_[l];
    for (std::size_t r = 0; r < batch; ++r) {
      kn.axpy(db, 1.0, delta.row(r), dims_[l + 1]);
    }
    // dX = delta * W^T, masked by the ReLU that produced `input`
    DataMatrix& dprev = ws.deltas[l];
    dprev.rows = batch;
    dprev.cols = dims_[l];
    dprev.values.assign(batch * dims_[l], 0.0);
    kn.mm_nt(dprev.values.data(), delta.values.data(), params_.data() + w_offsets_[l], batch,
             dims_[l + 1], dims_[l]);
    if (l > 0) {
      const DataMatrix& act = ws.acts[l - 1];
      for (std::size_t i = 0; i < dprev.values.size(); ++i) {
        if (act.values[i] <= 0.0) dprev.values[i] = 0.0;
      }
    }
  }
}

Vec Mlp::forward_one(const Vec& x) const {
  DataMatrix m(1, x.size());
  std::copy(x.begin(), x.end(), m.row(0));
  Workspace ws;
  forward(m, ws);
  const DataMatrix& out = ws.acts.back();
  return Vec(out.row(0), out.row(0) + out.cols);
}

void Adam::step(Vec& params, const Vec& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size())
    throw std::invalid_argument("Adam::step: size mismatch");
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / bc1) / (std::sqrt(v_[i] / bc2) + eps_);
  }
}

}  // namespace coda
