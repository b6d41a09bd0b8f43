#include "coda/parent/gmm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "coda/simd/kernels.hpp"

namespace coda {
namespace {

constexpr double kLog2Pi = 1.8378770664093453;

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd cov_matrix(const Gaussian& g) {
  const std::size_t d = g.mean.size();
  return Eigen::Map<const MatrixXd>(g.cov.data(), d, d);  // symmetric, order moot
}

VectorXd mean_vector(const Gaussian& g) {
  return Eigen::Map<const VectorXd>(g.mean.data(), g.mean.size());
}

/// log N(x; mu, Sigma) given the Cholesky factor of Sigma and x - mu.
double gaussian_logpdf(const Eigen::LLT<MatrixXd>& llt, const VectorXd& centered,
                       std::size_t d) {
  const MatrixXd& l = llt.matrixLLT();
  double logdet = 0.0;
  for (std::size_t i = 0; i < d; ++i) logdet += 2.0 * std::log(l(i, i));
  const VectorXd z = llt.matrixL().solve(centered);
  return -0.5 * (static_cast<double>(d) * kLog2Pi + logdet + z.squaredNorm());
}

}  // namespace

void GMM::validate() const {
  if (weights.size() != comps.size())
    throw std::invalid_argument("GMM: weights/components size mismatch");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("GMM: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("GMM: weights must sum to 1 within 1e-12");
  const std::size_t d = dim();
  for (const Gaussian& g : comps) {
    if (g.mean.size() != d || g.cov.size() != d * d)
      throw std::invalid_argument("GMM: inconsistent component dimensions");
    Eigen::LLT<MatrixXd> llt(cov_matrix(g));
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("GMM: covariance is not positive-definite");
  }
}

Vec GMM::mean() const {
  const std::size_t d = dim();
  Vec out(d, 0.0);
  for (std::size_t k = 0; k < comps.size(); ++k) {
    for (std::size_t i = 0; i < d; ++i) out[i] += weights[k] * comps[k].mean[i];
  }
  return out;
}

Vec GMM::covariance() const {
  const std::size_t d = dim();
  const Vec mu = mean();
  Vec out(d * d, 0.0);
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const Gaussian& g = comps[k];
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        out[i * d + j] += weights[k] * (g.cov[i * d + j] + g.mean[i] * g.mean[j]);
      }
    }
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) out[i * d + j] -= mu[i] * mu[j];
  return out;
}

std::string GMM::to_json() const {
  nlohmann::json j;
  j["weights"] = weights;
  nlohmann::json comps_json = nlohmann::json::array();
  for (const Gaussian& g : comps) comps_json.push_back({{"mean", g.mean}, {"cov", g.cov}});
  j["components"] = comps_json;
  return j.dump();
}

GMM GMM::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  GMM g;
  g.weights = j.at("weights").get<std::vector<double>>();
  for (const auto& c : j.at("components")) {
    g.comps.push_back({c.at("mean").get<Vec>(), c.at("cov").get<Vec>()});
  }
  return g;
}

double gmm_logpdf(const GMM& g, const Vec& x) {
  if (x.size() != g.dim()) throw std::invalid_argument("gmm_logpdf: dimension mismatch");
  const std::size_t d = g.dim();
  std::vector<double> terms(g.components());
  const VectorXd xv = Eigen::Map<const VectorXd>(x.data(), d);
  for (std::size_t k = 0; k < g.components(); ++k) {
    Eigen::LLT<MatrixXd> llt(cov_matrix(g.comps[k]));
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("gmm_logpdf: covariance not positive-definite");
    terms[k] = std::log(g.weights[k]) +
               gaussian_logpdf(llt, xv - mean_vector(g.comps[k]), d);
  }
  const auto& kn = simd::active();
  const double m = kn.max(terms.data(), terms.size());
  if (!std::isfinite(m)) return m;
  return m + std::log(kn.exp_sum_shifted(terms.data(), m, terms.size()));
}

GMM condition_gmm(const GMM& g, const std::vector<std::size_t>& observed_idx,
                  const Vec& values) {
  if (observed_idx.empty()) return g;
  if (observed_idx.size() != values.size())
    throw std::invalid_argument("condition_gmm: index/value size mismatch");
  const std::size_t d = g.dim();
  for (std::size_t i = 0; i < observed_idx.size(); ++i) {
    if (observed_idx[i] >= d)
      throw std::invalid_argument("condition_gmm: index out of range");
    if (i > 0 && observed_idx[i] <= observed_idx[i - 1])
      throw std::invalid_argument("condition_gmm: indices must be sorted unique");
    if (!std::isfinite(values[i]))
      throw std::invalid_argument("condition_gmm: non-finite observed value");
  }
  if (observed_idx.size() == d)
    throw std::invalid_argument("condition_gmm: cannot observe every dimension");

  std::vector<std::size_t> free_idx;
  for (std::size_t i = 0; i < d; ++i) {
    if (!std::binary_search(observed_idx.begin(), observed_idx.end(), i))
      free_idx.push_back(i);
  }
  const std::size_t no = observed_idx.size();
  const std::size_t nu = free_idx.size();

  GMM out;
  std::vector<double> logw(g.components());
  const VectorXd v = Eigen::Map<const VectorXd>(values.data(), no);
  for (std::size_t k = 0; k < g.components(); ++k) {
    const Gaussian& comp = g.comps[k];
    MatrixXd s_oo(no, no), s_uo(nu, no), s_uu(nu, nu);
    VectorXd mu_o(no), mu_u(nu);
    for (std::size_t i = 0; i < no; ++i) {
      mu_o(i) = comp.mean[observed_idx[i]];
      for (std::size_t j = 0; j < no; ++j)
        s_oo(i, j) = comp.cov[observed_idx[i] * d + observed_idx[j]];
    }
    for (std::size_t i = 0; i < nu; ++i) {
      mu_u(i) = comp.mean[free_idx[i]];
      for (std::size_t j = 0; j < no; ++j)
        s_uo(i, j) = comp.cov[free_idx[i] * d + observed_idx[j]];
      for (std::size_t j = 0; j < nu; ++j)
        s_uu(i, j) = comp.cov[free_idx[i] * d + free_idx[j]];
    }

    Eigen::LLT<MatrixXd> llt(s_oo);
    if (llt.info() != Eigen::Success) {
      // one jitter retry on a singular observed block
      llt.compute(s_oo + 1e-9 * MatrixXd::Identity(no, no));
      if (llt.info() != Eigen::Success)
        throw std::runtime_error("condition_gmm: observed covariance block is singular");
    }
    const VectorXd delta = v - mu_o;
    const MatrixXd solve_uo = llt.solve(s_uo.transpose());  // Sigma_oo^-1 Sigma_ou
    const VectorXd mu_bar = mu_u + solve_uo.transpose() * delta;
    const MatrixXd s_bar = s_uu - s_uo * solve_uo;

    Gaussian cond;
    cond.mean.assign(mu_bar.data(), mu_bar.data() + nu);
    cond.cov.resize(nu * nu);
    for (std::size_t i = 0; i < nu; ++i)
      for (std::size_t j = 0; j < nu; ++j) cond.cov[i * nu + j] = s_bar(i, j);
    out.comps.push_back(std::move(cond));
    logw[k] = std::log(g.weights[k]) + gaussian_logpdf(llt, delta, no);
  }

  const auto& kn = simd::active();
  const double m = kn.max(logw.data(), logw.size());
  if (!std::isfinite(m))
    throw std::runtime_error("condition_gmm: observed values have zero density");
  const double z = std::log(kn.exp_sum_shifted(logw.data(), m, logw.size())) + m;
  out.weights.resize(g.components());
  double sum = 0.0;
  for (std::size_t k = 0; k < g.components(); ++k) {
    out.weights[k] = simd::kernel_exp(logw[k] - z);
    sum += out.weights[k];
  }
  for (double& w : out.weights) w /= sum;
  return out;
}

Vec gmm_sample(const GMM& g, Rng& rng) {
  const double u = rng.uniform();
  std::size_t k = 0;
  double acc = 0.0;
  for (; k + 1 < g.components(); ++k) {
    acc += g.weights[k];
    if (u < acc) break;
  }
  const Gaussian& comp = g.comps[k];
  const std::size_t d = comp.mean.size();
  Eigen::LLT<MatrixXd> llt(cov_matrix(comp));
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("gmm_sample: covariance not positive-definite");
  VectorXd z(d);
  for (std::size_t i = 0; i < d; ++i) z(i) = rng.normal();
  const VectorXd x = mean_vector(comp) + MatrixXd(llt.matrixL()) * z;
  return Vec(x.data(), x.data() + d);
}

namespace {

struct EmState {
  std::vector<double> weights;
  std::vector<VectorXd> means;
  std::vector<MatrixXd> covs;
};

GMM to_gmm(const EmState& st) {
  GMM g;
  g.weights = st.weights;
  const std::size_t d = st.means.empty() ? 0 : st.means[0].size();
  for (std::size_t k = 0; k < st.means.size(); ++k) {
    Gaussian comp;
    comp.mean.assign(st.means[k].data(), st.means[k].data() + d);
    comp.cov.resize(d * d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) comp.cov[i * d + j] = st.covs[k](i, j);
    g.comps.push_back(std::move(comp));
  }
  return g;
}

double mean_loglik(const EmState& st, const DataMatrix& data,
                   const std::vector<std::size_t>& rows) {
  const GMM g = to_gmm(st);
  double total = 0.0;
  for (std::size_t r : rows) {
    const double* x = data.row(r);
    total += gmm_logpdf(g, Vec(x, x + data.cols));
  }
  return total / static_cast<double>(rows.size());
}

}  // namespace

GMM fit_gmm_em(const DataMatrix& data, std::size_t k, const EmOptions& opts,
               std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("fit_gmm_em: k must be >= 1");
  if (data.rows < k) throw std::invalid_argument("fit_gmm_em: need rows >= k");
  if (data.cols == 0) throw std::invalid_argument("fit_gmm_em: need cols >= 1");
  const std::size_t d = data.cols;

  // Deterministic train/validation split for the patience rule.
  std::vector<std::size_t> idx(data.rows);
  std::iota(idx.begin(), idx.end(), 0);
  Rng split_rng(Rng::derive(seed, "em-split"));
  for (std::size_t i = idx.size() - 1; i > 0; --i) {
    std::swap(idx[i], idx[split_rng.uniform_below(i + 1)]);
  }
  std::size_t val_count = data.rows / 10;
  if (data.rows < k + 2) val_count = 0;  // too small to hold anything out
  val_count = std::min(val_count, data.rows - k);
  const std::vector<std::size_t> val_rows(idx.begin(), idx.begin() + val_count);
  const std::vector<std::size_t> train_rows(idx.begin() + val_count, idx.end());

  // k-means++-style seeding on the training rows.
  Rng rng(Rng::derive(seed, "em-init"));
  const auto& kn = simd::active();
  std::vector<std::size_t> centers;
  centers.push_back(train_rows[rng.uniform_below(train_rows.size())]);
  std::vector<double> dist2(train_rows.size(), 0.0);
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c : centers) {
        best = std::min(best, kn.sq_dist(data.row(train_rows[i]), data.row(c), d));
      }
      dist2[i] = best;
      total += best;
    }
    std::size_t pick = train_rows[rng.uniform_below(train_rows.size())];
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (std::size_t i = 0; i < train_rows.size(); ++i) {
        u -= dist2[i];
        if (u <= 0.0) {
          pick = train_rows[i];
          break;
        }
      }
    }
    centers.push_back(pick);
  }

  VectorXd global_mean = VectorXd::Zero(d);
  for (std::size_t r : train_rows)
    global_mean += Eigen::Map<const VectorXd>(data.row(r), d);
  global_mean /= static_cast<double>(train_rows.size());
  MatrixXd global_cov = MatrixXd::Zero(d, d);
  for (std::size_t r : train_rows) {
    const VectorXd c = Eigen::Map<const VectorXd>(data.row(r), d) - global_mean;
    global_cov += c * c.transpose();
  }
  global_cov /= static_cast<double>(train_rows.size());
  global_cov += opts.cov_floor * MatrixXd::Identity(d, d);

  EmState st;
  st.weights.assign(k, 1.0 / static_cast<double>(k));
  for (std::size_t c = 0; c < k; ++c) {
    st.means.push_back(Eigen::Map<const VectorXd>(data.row(centers[c]), d));
    st.covs.push_back(global_cov);
  }

  const std::vector<std::size_t>& conv_rows = val_count > 0 ? val_rows : train_rows;
  EmState best = st;
  double best_ll = mean_loglik(st, data, conv_rows);
  std::size_t since_best = 0;

  std::vector<double> resp;  // responsibilities, train_rows x K
  for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
    const std::size_t kk = st.weights.size();
    resp.assign(train_rows.size() * kk, 0.0);
    std::vector<Eigen::LLT<MatrixXd>> llts;
    std::vector<double> logw(kk);
    llts.reserve(kk);
    for (std::size_t c = 0; c < kk; ++c) {
      llts.emplace_back(st.covs[c]);
      if (llts.back().info() != Eigen::Success) {
        llts.back().compute(st.covs[c] + opts.cov_floor * MatrixXd::Identity(d, d));
        if (llts.back().info() != Eigen::Success)
          throw std::runtime_error("fit_gmm_em: covariance collapsed");
      }
      logw[c] = std::log(st.weights[c]);
    }
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      const VectorXd x = Eigen::Map<const VectorXd>(data.row(train_rows[i]), d);
      double* lr = resp.data() + i * kk;
      for (std::size_t c = 0; c < kk; ++c) {
        lr[c] = logw[c] + gaussian_logpdf(llts[c], x - st.means[c], d);
      }
      const double m = kn.max(lr, kk);
      const double z = m + std::log(kn.exp_sum_shifted(lr, m, kk));
      for (std::size_t c = 0; c < kk; ++c) lr[c] = simd::kernel_exp(lr[c] - z);
    }

    EmState next;
    std::vector<double> nk(kk, 0.0);
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      const double* lr = resp.data() + i * kk;
      for (std::size_t c = 0; c < kk; ++c) nk[c] += lr[c];
    }
    for (std::size_t c = 0; c < kk; ++c) {
      const double w = nk[c] / static_cast<double>(train_rows.size());
      if (w < opts.weight_floor) continue;  // prune degenerate component
      VectorXd mu = VectorXd::Zero(d);
      for (std::size_t i = 0; i < train_rows.size(); ++i) {
        mu += resp[i * kk + c] * Eigen::Map<const VectorXd>(data.row(train_rows[i]), d);
      }
      mu /= nk[c];
      MatrixXd cov = MatrixXd::Zero(d, d);
      for (std::size_t i = 0; i < train_rows.size(); ++i) {
        const VectorXd cvec = Eigen::Map<const VectorXd>(data.row(train_rows[i]), d) - mu;
        cov += resp[i * kk + c] * (cvec * cvec.transpose());
      }
      cov /= nk[c];
      cov += opts.cov_floor * MatrixXd::Identity(d, d);
      next.weights.push_back(w);
      next.means.push_back(std::move(mu));
      next.covs.push_back(std::move(cov));
    }
    if (next.weights.empty()) throw std::runtime_error("fit_gmm_em: all components pruned");
    double wsum = 0.0;
    for (double w : next.weights) wsum += w;
    for (double& w : next.weights) w /= wsum;
    st = std::move(next);

    const double ll = mean_loglik(st, data, conv_rows);
    if (ll > best_ll + opts.tol) {
      best_ll = ll;
      best = st;
      since_best = 0;
    } else {
      if (ll > best_ll) {
        best_ll = ll;
        best = st;
      }
      if (++since_best >= opts.patience) break;
    }
  }

  GMM out = to_gmm(best);
  out.validate();
  return out;
}

}  // namespace coda
