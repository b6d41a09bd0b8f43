#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coda/core/types.hpp"
#include "coda/util/rng.hpp"

namespace coda {

/// Dense row-major sample matrix.
struct DataMatrix {
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;

  DataMatrix() = default;
  DataMatrix(std::size_t r, std::size_t c) : values(r * c, 0.0), rows(r), cols(c) {}
  double* row(std::size_t i) { return values.data() + i * cols; }
  const double* row(std::size_t i) const { return values.data() + i * cols; }
};

struct Gaussian {
  Vec mean;  // d
  Vec cov;   // d*d row-major, symmetric positive-definite
};

/// Weighted Gaussian mixture with exact conditioning.
struct GMM {
  std::vector<double> weights;
  std::vector<Gaussian> comps;

  std::size_t components() const { return comps.size(); }
  std::size_t dim() const { return comps.empty() ? 0 : comps[0].mean.size(); }
  /// Checks weight normalization (1e-12) and that every covariance admits a
  /// Cholesky factorization; throws std::invalid_argument otherwise.
  void validate() const;

  /// Analytic mixture moments.
  Vec mean() const;
  Vec covariance() const;  // d*d row-major

  std::string to_json() const;
  static GMM from_json(const std::string& text);
};

/// log sum_k w_k N(x; mu_k, Sigma_k), computed via log-sum-exp.
double gmm_logpdf(const GMM& g, const Vec& x);

/// Conditional mixture given observed dims (sorted unique indices into the
/// GMM's dims) at `values`. Component weights are reweighted by the
/// observed-marginal densities; returns a GMM over the remaining dims in
/// their original relative order. With no observed dims returns g
/// unchanged. A singular observed covariance gets one 1e-9 jitter retry,
/// then throws std::runtime_error.
GMM condition_gmm(const GMM& g, const std::vector<std::size_t>& observed_idx,
                  const Vec& values);

Vec gmm_sample(const GMM& g, Rng& rng);

struct EmOptions {
  std::size_t max_iter = 200;
  double tol = 1e-4;       // mean val log-likelihood improvement threshold
  std::size_t patience = 10;
  double cov_floor = 1e-6;     // added to covariance diagonals
  double weight_floor = 1e-8;  // components below this are pruned
};

/// Expectation-maximization from k-means++-style initialization. A
/// deterministic internal 90/10 split provides the validation
/// log-likelihood; fitting stops when the best val LL has not improved by
/// more than tol for `patience` iterations (or at max_iter), returning the
/// best-validation parameters. Requires rows >= K.
GMM fit_gmm_em(const DataMatrix& data, std::size_t k, const EmOptions& opts,
               std::uint64_t seed);

}  // namespace coda
