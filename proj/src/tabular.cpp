#include "coda/dyn/tabular.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace coda {
namespace {

std::size_t checked_value(double v, std::size_t alphabet, const char* what) {
  if (!(v >= 0.0) || v != std::floor(v) || v >= static_cast<double>(alphabet)) {
    throw std::invalid_argument(std::string(what) + ": value " + std::to_string(v) +
                                " outside alphabet of size " + std::to_string(alphabet));
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

TabularFactoredModel::TabularFactoredModel(ParentGraph graph,
                                           std::vector<std::size_t> dim_alphabets,
                                           std::size_t n_state_dims)
    : graph_(std::move(graph)), dim_alphabets_(std::move(dim_alphabets)), n_state_(n_state_dims) {
  if (graph_.parents.size() != n_state_)
    throw std::invalid_argument("TabularFactoredModel: one parent set per state dim");
  for (std::size_t a : dim_alphabets_) {
    if (a == 0) throw std::invalid_argument("TabularFactoredModel: empty alphabet");
  }
  for (std::size_t child = 0; child < n_state_; ++child) {
    std::size_t configs = 1;
    for (std::size_t d : graph_.parents[child]) {
      if (d >= dim_alphabets_.size())
        throw std::invalid_argument("TabularFactoredModel: parent dim out of range");
      configs *= dim_alphabets_[d];
    }
    config_counts_.push_back(configs);
    counts_.emplace_back(configs * dim_alphabets_[child], 0);
  }
}

std::size_t TabularFactoredModel::dim_value(std::size_t dim, const Vec& s, const Vec& a) const {
  const double raw = dim < n_state_ ? s[dim] : a[dim - n_state_];
  return checked_value(raw, dim_alphabets_[dim], "TabularFactoredModel");
}

std::size_t TabularFactoredModel::parent_config_index(std::size_t child, const Vec& s,
                                                      const Vec& a) const {
  std::size_t idx = 0;
  for (std::size_t d : graph_.parents[child]) {
    idx = idx * dim_alphabets_[d] + dim_value(d, s, a);
  }
  return idx;
}

void TabularFactoredModel::observe(const Vec& s, const Vec& a, const Vec& s_next) {
  for (std::size_t child = 0; child < n_state_; ++child) {
    const std::size_t cfg = parent_config_index(child, s, a);
    const std::size_t value =
        checked_value(s_next[child], dim_alphabets_[child], "TabularFactoredModel");
    ++counts_[child][cfg * dim_alphabets_[child] + value];
  }
  ++total_;
}

std::vector<double> TabularFactoredModel::predict_child(std::size_t child, const Vec& s,
                                                        const Vec& a) const {
  const std::size_t alphabet = dim_alphabets_[child];
  const std::size_t cfg = parent_config_index(child, s, a);
  const std::uint64_t* row = counts_[child].data() + cfg * alphabet;
  std::uint64_t sum = 0;
  for (std::size_t v = 0; v < alphabet; ++v) sum += row[v];
  std::vector<double> p(alphabet);
  if (sum == 0) {
    // unvisited configuration: uniform keeps the max-l1 metric total
    const double u = 1.0 / static_cast<double>(alphabet);
    for (double& x : p) x = u;
  } else {
    for (std::size_t v = 0; v < alphabet; ++v) {
      p[v] = static_cast<double>(row[v]) / static_cast<double>(sum);
    }
  }
  return p;
}

std::vector<double> TabularFactoredModel::predict_joint(const Vec& s, const Vec& a) const {
  std::size_t joint = 1;
  for (std::size_t child = 0; child < n_state_; ++child) joint *= dim_alphabets_[child];
  std::vector<double> out(joint, 1.0);
  std::vector<std::vector<double>> per_child;
  per_child.reserve(n_state_);
  for (std::size_t child = 0; child < n_state_; ++child) {
    per_child.push_back(predict_child(child, s, a));
  }
  for (std::size_t code = 0; code < joint; ++code) {
    std::size_t rem = code;
    double p = 1.0;
    for (std::size_t child = n_state_; child-- > 0;) {
      p *= per_child[child][rem % dim_alphabets_[child]];
      rem /= dim_alphabets_[child];
    }
    out[code] = p;
  }
  return out;
}

std::string TabularFactoredModel::to_json() const {
  nlohmann::json j;
  j["parents"] = graph_.parents;
  j["dim_alphabets"] = dim_alphabets_;
  j["n_state_dims"] = n_state_;
  j["counts"] = counts_;
  j["total"] = total_;
  return j.dump();
}

TabularFactoredModel TabularFactoredModel::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ParentGraph g;
  g.parents = j.at("parents").get<std::vector<std::vector<std::size_t>>>();
  TabularFactoredModel model(std::move(g),
                             j.at("dim_alphabets").get<std::vector<std::size_t>>(),
                             j.at("n_state_dims").get<std::size_t>());
  model.counts_ = j.at("counts").get<std::vector<std::vector<std::uint64_t>>>();
  model.total_ = j.at("total").get<std::uint64_t>();
  return model;
}

TabularFactoredModel fit_count_model(const Dataset& ds, const ParentGraph& graph,
                                     const std::vector<std::size_t>& dim_alphabets) {
  const FactorSpec& spec = ds.spec();
  for (const Factor& f : spec.state_factors()) {
    if (f.dim != 1)
      throw std::invalid_argument("fit_count_model: factors must be single-dim");
  }
  TabularFactoredModel model(graph, dim_alphabets, spec.state_dims());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Transition& t = ds[i];
    model.observe(t.s, t.a, t.s_next);
  }
  return model;
}

L1Report max_l1_error(const TabularFactoredModel& model, const TrueJointFn& true_joint) {
  const std::size_t n = model.n_state_dims();
  const auto& alphabets = model.dim_alphabets();
  const std::size_t dims = alphabets.size();

  L1Report report;
  report.per_child_max_l1.assign(n, 0.0);

  std::vector<std::size_t> config(dims, 0);
  Vec s(n), a(dims - n);
  for (;;) {
    for (std::size_t d = 0; d < dims; ++d) {
      if (d < n) {
        s[d] = static_cast<double>(config[d]);
      } else {
        a[d - n] = static_cast<double>(config[d]);
      }
    }
    const std::vector<double> want = true_joint(s, a);
    const std::vector<double> got = model.predict_joint(s, a);
    double l1 = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i) l1 += std::abs(want[i] - got[i]);
    if (l1 > report.max_joint_l1) {
      report.max_joint_l1 = l1;
      report.argmax_s = s;
      report.argmax_a = a;
    }
    // per-child conditional error at this (s, a): marginalize the true
    // joint onto each child
    for (std::size_t child = 0; child < n; ++child) {
      std::vector<double> marg(alphabets[child], 0.0);
      std::size_t block = 1;
      for (std::size_t c = child + 1; c < n; ++c) block *= alphabets[c];
      for (std::size_t code = 0; code < want.size(); ++code) {
        marg[(code / block) % alphabets[child]] += want[code];
      }
      const std::vector<double> got_child = model.predict_child(child, s, a);
      double cl1 = 0.0;
      for (std::size_t v = 0; v < alphabets[child]; ++v)
        cl1 += std::abs(marg[v] - got_child[v]);
      report.per_child_max_l1[child] = std::max(report.per_child_max_l1[child], cl1);
    }
    // odometer over all (s, a) configurations
    std::size_t d = dims;
    while (d-- > 0) {
      if (++config[d] < alphabets[d]) break;
      config[d] = 0;
      if (d == 0) {
        report.child_sum_bound = 0.0;
        for (double v : report.per_child_max_l1) report.child_sum_bound += v;
        return report;
      }
    }
  }
}

}  // namespace coda
