#include "coda/parent/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "coda/parent/kde.hpp"
#include "coda/simd/kernels.hpp"

namespace coda {

void ParentGraph::validate(const FactorSpec& spec) const {
  if (parents.size() != spec.n_state_factors())
    throw std::invalid_argument("ParentGraph: one parent set per state factor required");
  const std::size_t dims = spec.state_dims() + spec.action_dims();
  std::vector<bool> covered(dims, false);
  for (const auto& pa : parents) {
    if (pa.empty()) throw std::invalid_argument("ParentGraph: child with no parent dims");
    for (std::size_t d : pa) {
      if (d >= dims) throw std::invalid_argument("ParentGraph: parent dim out of range");
      covered[d] = true;
    }
  }
  for (std::size_t d = 0; d < dims; ++d) {
    if (!covered[d])
      throw std::invalid_argument("ParentGraph: dim " + std::to_string(d) +
                                  " is covered by no parent set");
  }
}

std::string ParentGraph::to_json() const {
  nlohmann::json j;
  j["parents"] = parents;
  return j.dump();
}

ParentGraph ParentGraph::from_json(const std::string& text) {
  ParentGraph g;
  g.parents = nlohmann::json::parse(text).at("parents")
                  .get<std::vector<std::vector<std::size_t>>>();
  return g;
}

const char* to_string(ParentSource s) {
  switch (s) {
    case ParentSource::kEmp: return "emp";
    case ParentSource::kRand: return "rand";
    case ParentSource::kDyna: return "dyna";
    case ParentSource::kMocoda: return "mocoda";
    case ParentSource::kMocodaU: return "mocoda-u";
    case ParentSource::kMocodaP: return "mocoda-p";
  }
  return "emp";
}

std::string ParentModels::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const ParentSetModel& m : sets) {
    j.push_back({{"dims", m.dims}, {"gmm", nlohmann::json::parse(m.gmm.to_json())}});
  }
  return j.dump();
}

ParentModels ParentModels::from_json(const std::string& text) {
  ParentModels out;
  for (const auto& m : nlohmann::json::parse(text)) {
    out.sets.push_back({m.at("dims").get<std::vector<std::size_t>>(),
                        GMM::from_json(m.at("gmm").dump())});
  }
  return out;
}

DataMatrix dataset_parent_rows(const Dataset& ds) {
  const std::size_t n = ds.spec().state_dims();
  const std::size_t m = ds.spec().action_dims();
  DataMatrix out(ds.size(), n + m);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    double* row = out.row(i);
    std::copy(ds[i].s.begin(), ds[i].s.end(), row);
    std::copy(ds[i].a.begin(), ds[i].a.end(), row + n);
  }
  return out;
}

ParentModels fit_parent_models(const Dataset& ds, const ParentGraph& graph, std::size_t k,
                               const EmOptions& opts, std::uint64_t seed) {
  graph.validate(ds.spec());
  const DataMatrix rows = dataset_parent_rows(ds);
  ParentModels out;
  for (const auto& pa : graph.parents) {
    std::vector<std::size_t> dims = pa;
    std::sort(dims.begin(), dims.end());
    dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
    bool seen = false;
    for (const auto& m : out.sets) {
      if (m.dims == dims) {
        seen = true;
        break;
      }
    }
    if (seen) continue;
    DataMatrix sub(rows.rows, dims.size());
    for (std::size_t i = 0; i < rows.rows; ++i) {
      for (std::size_t j = 0; j < dims.size(); ++j) sub.row(i)[j] = rows.row(i)[dims[j]];
    }
    const std::uint64_t set_seed = Rng::derive(seed, "parent-set-" + std::to_string(out.sets.size()));
    out.sets.push_back({dims, fit_gmm_em(sub, k, opts, set_seed)});
  }
  return out;
}

ParentSamples sample_mocoda(const ParentModels& models, const ParentGraph& graph,
                            const FactorSpec& spec, std::size_t n, Rng& rng, bool shuffle,
                            const std::function<bool(const Vec&)>& region_ok) {
  graph.validate(spec);
  const std::size_t dims = spec.state_dims() + spec.action_dims();

  // Resolve each child's parent set model once.
  std::vector<std::size_t> child_model(graph.parents.size());
  for (std::size_t c = 0; c < graph.parents.size(); ++c) {
    std::vector<std::size_t> want = graph.parents[c];
    std::sort(want.begin(), want.end());
    want.erase(std::unique(want.begin(), want.end()), want.end());
    bool found = false;
    for (std::size_t m = 0; m < models.sets.size(); ++m) {
      if (models.sets[m].dims == want) {
        child_model[c] = m;
        found = true;
        break;
      }
    }
    if (!found)
      throw std::invalid_argument("sample_mocoda: no fitted model for a parent set");
  }

  ParentSamples out;
  out.source = ParentSource::kMocoda;
  out.rows = DataMatrix(n, dims);
  std::vector<std::size_t> order(graph.parents.size());
  std::iota(order.begin(), order.end(), 0);
  Vec row(dims);
  std::vector<bool> assigned(dims);

  std::size_t made = 0;
  // Rejection against a region predicate needs headroom; bail out if the
  // acceptance rate collapses.
  std::size_t attempts = 0;
  const std::size_t max_attempts = region_ok ? 50 * std::max<std::size_t>(n, 1) : 0;
  while (made < n) {
    if (shuffle) {
      for (std::size_t i = order.size() - 1; i > 0; --i) {
        std::swap(order[i], order[rng.uniform_below(i + 1)]);
      }
    }
    std::fill(assigned.begin(), assigned.end(), false);
    for (std::size_t c : order) {
      const ParentSetModel& model = models.sets[child_model[c]];
      std::vector<std::size_t> obs_pos;  // positions within the set's dims
      Vec obs_val;
      std::vector<std::size_t> free_dims;
      for (std::size_t j = 0; j < model.dims.size(); ++j) {
        if (assigned[model.dims[j]]) {
          obs_pos.push_back(j);
          obs_val.push_back(row[model.dims[j]]);
        } else {
          free_dims.push_back(model.dims[j]);
        }
      }
      if (free_dims.empty()) continue;  // whole set already sampled
      Vec draw;
      if (obs_pos.empty()) {
        draw = gmm_sample(model.gmm, rng);
      } else {
        draw = gmm_sample(condition_gmm(model.gmm, obs_pos, obs_val), rng);
      }
      for (std::size_t j = 0; j < free_dims.size(); ++j) {
        row[free_dims[j]] = draw[j];
        assigned[free_dims[j]] = true;
      }
    }
    if (region_ok && !region_ok(row)) {
      if (++attempts > max_attempts)
        throw std::runtime_error("sample_mocoda: region predicate rejects nearly all samples");
      continue;
    }
    std::copy(row.begin(), row.end(), out.rows.row(made));
    ++made;
  }
  return out;
}

ParentSamples sample_rand(const FactorSpec& spec, std::size_t n, Rng& rng) {
  const std::size_t sd = spec.state_dims();
  const std::size_t ad = spec.action_dims();
  ParentSamples out;
  out.source = ParentSource::kRand;
  out.rows = DataMatrix(n, sd + ad);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = out.rows.row(i);
    for (std::size_t d = 0; d < sd; ++d) {
      row[d] = rng.uniform(spec.state_bound(d).lo, spec.state_bound(d).hi);
    }
    for (std::size_t d = 0; d < ad; ++d) {
      row[sd + d] = rng.uniform(spec.action_bound(d).lo, spec.action_bound(d).hi);
    }
  }
  return out;
}

ParentSamples sample_dyna(const Dataset& ds, const DynamicsSampler& model,
                          std::size_t steps, std::size_t n, Rng& rng) {
  if (ds.size() == 0) throw std::invalid_argument("sample_dyna: empty dataset");
  const FactorSpec& spec = ds.spec();
  const std::size_t sd = spec.state_dims();
  const std::size_t ad = spec.action_dims();
  ParentSamples out;
  out.source = ParentSource::kDyna;
  out.rows = DataMatrix(n, sd + ad);
  if (steps == 0 || n == 0) {
    out.rows = DataMatrix(0, sd + ad);
    return out;
  }
  std::size_t made = 0;
  while (made < n) {
    Vec s = ds[rng.uniform_below(ds.size())].s;
    for (std::size_t t = 0; t < steps && made < n; ++t) {
      Vec a(ad);
      for (std::size_t d = 0; d < ad; ++d) {
        a[d] = rng.uniform(spec.action_bound(d).lo, spec.action_bound(d).hi);
      }
      double* row = out.rows.row(made);
      std::copy(s.begin(), s.end(), row);
      std::copy(a.begin(), a.end(), row + sd);
      ++made;
      Vec next = model(s, a, rng);
      bool finite = true;
      for (double v : next) finite = finite && std::isfinite(v);
      if (!finite) {
        ++out.truncated_rollouts;
        break;
      }
      for (std::size_t d = 0; d < sd; ++d) {
        next[d] = std::clamp(next[d], spec.state_bound(d).lo, spec.state_bound(d).hi);
      }
      s = std::move(next);
    }
  }
  return out;
}

namespace {

DataMatrix feature_rows(const DataMatrix& rows, const std::vector<std::size_t>& dims,
                        std::size_t begin, std::size_t end) {
  DataMatrix out(end - begin, dims.size());
  for (std::size_t i = begin; i < end; ++i) {
    for (std::size_t j = 0; j < dims.size(); ++j) {
      out.row(i - begin)[j] = rows.row(i)[dims[j]];
    }
  }
  return out;
}

ParentSamples keep_rows(const ParentSamples& samples, const std::vector<std::size_t>& keep,
                        ParentSource source) {
  ParentSamples out;
  out.source = source;
  out.rows = DataMatrix(keep.size(), samples.rows.cols);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    std::copy(samples.rows.row(keep[i]), samples.rows.row(keep[i]) + samples.rows.cols,
              out.rows.row(i));
  }
  return out;
}

}  // namespace

ParentSamples prune_to_uniform(const ParentSamples& samples, const PruneOptions& opts,
                               std::size_t target_size, Rng& rng) {
  const std::size_t n = samples.rows.rows;
  if (n <= target_size)
    throw std::invalid_argument("prune_to_uniform: need more samples than target_size");
  if (opts.feature_dims.empty())
    throw std::invalid_argument("prune_to_uniform: empty feature map");

  const std::size_t fit_begin = n > opts.fit_window ? n - opts.fit_window : 0;
  const DataMatrix fit = feature_rows(samples.rows, opts.feature_dims, fit_begin, n);
  const DataMatrix all = feature_rows(samples.rows, opts.feature_dims, 0, n);
  Vec scores = kde_log_score(fit, opts.bandwidth, all);

  const double floor_log = std::log(opts.floor_density);
  double mean_w = 0.0;
  for (double& s : scores) {
    s = std::max(s, floor_log);
    s = simd::kernel_exp(-s);  // inverse density
    mean_w += s;
  }
  mean_w /= static_cast<double>(n);
  const double scale =
      static_cast<double>(target_size) / (mean_w * static_cast<double>(n));
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform() < scores[i] * scale) keep.push_back(i);
  }
  return keep_rows(samples, keep, ParentSource::kMocodaU);
}

ParentSamples prune_prioritized(const ParentSamples& samples,
                                const std::function<bool(const Vec&)>& filter_pred,
                                const PruneOptions& opts, std::size_t target_size, Rng& rng,
                                PrioritizedStats* stats) {
  const std::size_t n = samples.rows.rows;
  if (opts.feature_dims.empty())
    throw std::invalid_argument("prune_prioritized: empty feature map");
  std::vector<std::size_t> survivors;
  for (std::size_t i = 0; i < n; ++i) {
    if (filter_pred(samples.row_vec(i))) survivors.push_back(i);
  }
  PrioritizedStats local;
  local.survivors = survivors.size();
  if (survivors.size() * 10 < target_size) {
    throw std::runtime_error("prune_prioritized: filter keeps only " +
                             std::to_string(survivors.size()) + " of " + std::to_string(n) +
                             " rows (need at least target_size/10)");
  }
  if (survivors.size() <= target_size) {
    local.kept_all = true;
    if (stats) *stats = local;
    return keep_rows(samples, survivors, ParentSource::kMocodaP);
  }

  DataMatrix surv_rows(survivors.size(), samples.rows.cols);
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    std::copy(samples.rows.row(survivors[i]), samples.rows.row(survivors[i]) + samples.rows.cols,
              surv_rows.row(i));
  }
  const std::size_t window = std::min<std::size_t>(opts.fit_window, survivors.size());
  DataMatrix fit(window, opts.feature_dims.size());
  for (std::size_t i = 0; i < window; ++i) {
    const double* row = surv_rows.row(survivors.size() - window + i);
    for (std::size_t j = 0; j < opts.feature_dims.size(); ++j)
      fit.row(i)[j] = row[opts.feature_dims[j]];
  }
  DataMatrix feats(survivors.size(), opts.feature_dims.size());
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    for (std::size_t j = 0; j < opts.feature_dims.size(); ++j)
      feats.row(i)[j] = surv_rows.row(i)[opts.feature_dims[j]];
  }
  Vec scores = kde_log_score(fit, opts.bandwidth, feats);
  const double floor_log = std::log(opts.floor_density);
  for (double& s : scores) s = simd::kernel_exp(-std::max(s, floor_log));

  auto expected_kept = [&] {
    double total = 0.0;
    for (double s : scores) total += std::min(s, 1.0);
    return total;
  };
  const double target = static_cast<double>(target_size);
  std::size_t guard = 0;
  if (expected_kept() > target) {
    while (expected_kept() > target && ++guard < 1000000) {
      for (double& s : scores) s *= 0.99;
    }
  } else {
    while (expected_kept() < target && ++guard < 1000000) {
      for (double& s : scores) s /= 0.99;
    }
  }

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    if (rng.uniform() < scores[i]) keep.push_back(survivors[i]);
  }
  if (stats) *stats = local;
  return keep_rows(samples, keep, ParentSource::kMocodaP);
}

}  // namespace coda
