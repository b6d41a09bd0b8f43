#include "coda/lcm/mask.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace coda {

LocalMask LocalMask::from_rows(const std::vector<std::vector<int>>& rows) {
  if (rows.empty()) throw std::invalid_argument("LocalMask: empty rows");
  LocalMask m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols_) throw std::invalid_argument("LocalMask: ragged rows");
    for (std::size_t c = 0; c < m.cols_; ++c) m.set(r, c, rows[r][c] != 0);
  }
  return m;
}

std::string LocalMask::to_csv() const {
  std::string out;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      if (c) out += ',';
      out += at(r, c) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

LocalMask LocalMask::from_csv(const std::string& text) {
  std::vector<std::vector<int>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<int> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stoi(cell));
    rows.push_back(std::move(row));
  }
  return from_rows(rows);
}

std::string ComponentPartition::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& comp : components) j.push_back(comp);
  return j.dump();
}

LocalModel::LocalModel(MaskFunction mask) : mask_(std::move(mask)) {}

LocalModel::LocalModel(MaskFunction mask,
                       std::function<std::string(const Vec&, const Vec&)> region)
    : mask_(std::move(mask)), region_(std::move(region)) {}

std::string LocalModel::region(const Vec& s, const Vec& a) const {
  if (region_) return region_(s, a);
  const LocalMask m = mask_(s, a);
  return std::string(m.entries().begin(), m.entries().end());
}

LocalMask eval_mask(const MaskFunction& mask_fn, const FactorSpec& spec, const Vec& s,
                    const Vec& a) {
  if (s.size() != spec.state_dims() || a.size() != spec.action_dims())
    throw std::invalid_argument("eval_mask: input does not conform to spec");
  LocalMask m = mask_fn(s, a);
  if (m.rows() != spec.n_factors() || m.cols() != spec.n_state_factors())
    throw std::invalid_argument("eval_mask: mask shape does not match spec");
  return m;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

ComponentPartition components(const LocalMask& mask) {
  const std::size_t n_factors = mask.rows();
  UnionFind uf(n_factors);
  // State factor i is one node across the time slice (row i ~ column i);
  // action factors keep their dummy next-action columns as self-edges.
  for (std::size_t r = 0; r < mask.rows(); ++r) {
    for (std::size_t c = 0; c < mask.cols(); ++c) {
      if (mask.at(r, c)) uf.unite(r, c);
    }
  }
  ComponentPartition part;
  part.factor_to_component.assign(n_factors, 0);
  std::vector<std::size_t> root_to_comp(n_factors, n_factors);
  for (std::size_t f = 0; f < n_factors; ++f) {
    const std::size_t root = uf.find(f);
    if (root_to_comp[root] == n_factors) {
      root_to_comp[root] = part.components.size();
      part.components.emplace_back();
    }
    part.factor_to_component[f] = root_to_comp[root];
    part.components[root_to_comp[root]].push_back(f);
  }
  // Roots are component minima and factors are scanned in order, so the
  // component list is already sorted by smallest member.
  return part;
}

IndependentSets independent_sets(const ComponentPartition& partition) {
  IndependentSets out;
  const std::size_t c = partition.components.size();
  if (c < 2) return out;
  const std::size_t full = (std::size_t{1} << c) - 1;
  for (std::size_t bits = 1; bits < full; ++bits) {
    std::vector<std::size_t> set;
    for (std::size_t k = 0; k < c; ++k) {
      if (bits & (std::size_t{1} << k)) {
        const auto& comp = partition.components[k];
        set.insert(set.end(), comp.begin(), comp.end());
      }
    }
    std::sort(set.begin(), set.end());
    out.sets.push_back(std::move(set));
  }
  return out;
}

namespace {

std::size_t state_dim_to_factor(const FactorSpec& spec, std::size_t d) {
  for (std::size_t f = spec.n_state_factors(); f-- > 0;) {
    if (d >= spec.state_factor_offset(f)) return f;
  }
  return 0;
}

std::size_t action_dim_to_factor(const FactorSpec& spec, std::size_t d) {
  for (std::size_t f = spec.n_action_factors(); f-- > 0;) {
    if (d >= spec.action_factor_offset(f)) return f;
  }
  return 0;
}

}  // namespace

JacobianMaskResult jacobian_mask(const DynamicsFn& dynamics, const FactorSpec& spec,
                                 const Vec& s, const Vec& a, double probe_eps, double tau) {
  JacobianMaskResult result{LocalMask(spec.n_factors(), spec.n_state_factors()), false};
  const std::size_t n = spec.state_dims();
  const std::size_t m = spec.action_dims();
  Vec ps = s, pa = a;
  for (std::size_t d = 0; d < n + m; ++d) {
    const bool is_state = d < n;
    double& x = is_state ? ps[d] : pa[d - n];
    const double x0 = x;
    const Interval& bound = is_state ? spec.state_bound(d) : spec.action_bound(d - n);
    double hi = std::min(x0 + probe_eps, bound.hi);
    double lo = std::max(x0 - probe_eps, bound.lo);
    if (hi <= lo) continue;  // fully degenerate bound
    if (hi < x0 + probe_eps || lo > x0 - probe_eps) result.used_one_sided = true;
    x = hi;
    const Vec f_hi = dynamics(ps, pa);
    x = lo;
    const Vec f_lo = dynamics(ps, pa);
    x = x0;
    const std::size_t in_factor =
        is_state ? state_dim_to_factor(spec, d) : spec.n_state_factors() + action_dim_to_factor(spec, d - n);
    for (std::size_t j = 0; j < n; ++j) {
      const double deriv = (f_hi[j] - f_lo[j]) / (hi - lo);
      if (std::abs(deriv) > tau) {
        result.mask.set(in_factor, state_dim_to_factor(spec, j), true);
      }
    }
  }
  return result;
}

ProbeGrid make_probe_grid(const FactorSpec& spec, const std::vector<std::size_t>& counts) {
  const std::size_t dims = spec.state_dims() + spec.action_dims();
  if (counts.size() != dims)
    throw std::invalid_argument("make_probe_grid: one count per input dim required");
  ProbeGrid grid;
  grid.values.resize(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    const Interval& b = d < spec.state_dims() ? spec.state_bound(d)
                                              : spec.action_bound(d - spec.state_dims());
    const std::size_t c = std::max<std::size_t>(counts[d], 1);
    for (std::size_t i = 0; i < c; ++i) {
      const double t = c == 1 ? 0.5 : static_cast<double>(i) / (c - 1);
      grid.values[d].push_back(b.lo + t * (b.hi - b.lo));
    }
  }
  return grid;
}

std::vector<EdgeStat> MinimalityReport::unused_edges() const {
  std::vector<EdgeStat> out;
  for (const EdgeStat& e : edges) {
    if (e.present_count > 0 && e.exercised_count == 0) out.push_back(e);
  }
  return out;
}

MinimalityReport verify_minimality(const DynamicsFn& env_true_step,
                                   const MaskFunction& mask_fn, const FactorSpec& spec,
                                   const ProbeGrid& grid, double effect_eps) {
  const std::size_t n = spec.state_dims();
  const std::size_t m = spec.action_dims();
  const std::size_t dims = n + m;
  if (grid.values.size() != dims)
    throw std::invalid_argument("verify_minimality: grid does not match spec dims");

  std::vector<std::size_t> counts(dims), strides(dims);
  std::size_t total = 1;
  for (std::size_t d = 0; d < dims; ++d) counts[d] = grid.values[d].size();
  for (std::size_t d = dims; d-- > 0;) {
    strides[d] = total;
    total *= counts[d];
  }

  auto point_at = [&](std::size_t flat, Vec& s, Vec& a) {
    for (std::size_t d = 0; d < dims; ++d) {
      const std::size_t idx = (flat / strides[d]) % counts[d];
      if (d < n) {
        s[d] = grid.values[d][idx];
      } else {
        a[d - n] = grid.values[d][idx];
      }
    }
  };

  // Cache the dynamics outputs and masks over the whole grid.
  std::vector<double> outputs(total * n);
  std::vector<std::uint8_t> masks(total * spec.n_factors() * spec.n_state_factors());
  const std::size_t mask_len = spec.n_factors() * spec.n_state_factors();
  {
    Vec s(n), a(m);
    for (std::size_t p = 0; p < total; ++p) {
      point_at(p, s, a);
      const Vec out = env_true_step(s, a);
      std::copy(out.begin(), out.end(), outputs.begin() + p * n);
      const LocalMask mk = eval_mask(mask_fn, spec, s, a);
      std::copy(mk.entries().begin(), mk.entries().end(), masks.begin() + p * mask_len);
    }
  }

  const std::size_t n_f = spec.n_state_factors();
  MinimalityReport report;
  std::vector<EdgeStat> stats;
  stats.reserve(spec.n_factors() * n_f);
  for (std::size_t i = 0; i < spec.n_factors(); ++i) {
    for (std::size_t j = 0; j < n_f; ++j) stats.push_back({i, j, 0, 0});
  }
  auto stat = [&](std::size_t i, std::size_t j) -> EdgeStat& { return stats[i * n_f + j]; };

  for (std::size_t p = 0; p < total; ++p) {
    for (std::size_t i = 0; i < spec.n_factors(); ++i) {
      for (std::size_t j = 0; j < n_f; ++j) {
        if (masks[p * mask_len + i * n_f + j]) ++stat(i, j).present_count;
      }
    }
  }

  constexpr std::size_t kMaxStoredFalseNegatives = 1000;
  Vec s(n), a(m);
  for (std::size_t p = 0; p < total; ++p) {
    for (std::size_t d = 0; d < dims; ++d) {
      const std::size_t idx = (p / strides[d]) % counts[d];
      const std::size_t in_factor =
          d < n ? state_dim_to_factor(spec, d)
                : n_f + action_dim_to_factor(spec, d - n);
      for (std::size_t k = idx + 1; k < counts[d]; ++k) {
        const std::size_t q = p + (k - idx) * strides[d];
        for (std::size_t j_dim = 0; j_dim < n; ++j_dim) {
          const double delta = std::abs(outputs[p * n + j_dim] - outputs[q * n + j_dim]);
          if (delta <= effect_eps) continue;
          const std::size_t child = state_dim_to_factor(spec, j_dim);
          ++stat(in_factor, child).exercised_count;
          const bool masked_p = masks[p * mask_len + in_factor * n_f + child];
          const bool masked_q = masks[q * mask_len + in_factor * n_f + child];
          if (!masked_p && !masked_q) {
            ++report.false_negative_pairs;
            if (report.false_negatives.size() < kMaxStoredFalseNegatives) {
              point_at(p, s, a);
              FalseNegative fn;
              fn.probe = s;
              fn.probe.insert(fn.probe.end(), a.begin(), a.end());
              fn.input_factor = in_factor;
              fn.child_factor = child;
              fn.alternative_value = grid.values[d][k];
              report.false_negatives.push_back(std::move(fn));
            }
          }
        }
      }
    }
  }
  report.edges = std::move(stats);
  return report;
}

}  // namespace coda
