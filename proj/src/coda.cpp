#include "coda/aug/coda.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "coda/util/parallel.hpp"

namespace coda {
namespace {

bool contains_set(const std::vector<std::vector<std::size_t>>& family,
                  const std::vector<std::size_t>& set) {
  for (const auto& candidate : family) {
    if (candidate == set) return true;
  }
  return false;
}

std::vector<std::vector<std::size_t>> shared_sets(
    const std::vector<std::vector<std::size_t>>& d1,
    const std::vector<std::vector<std::size_t>>& d2) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& set : d1) {
    if (contains_set(d2, set)) out.push_back(set);
  }
  return out;
}

// Copies the (s, a, s') slices of every factor in `set` from src into dst.
void apply_swap(const FactorSpec& spec, const std::vector<std::size_t>& set,
                const Transition& src, Transition& dst) {
  for (std::size_t f : set) {
    if (f < spec.n_state_factors()) {
      const std::size_t off = spec.state_factor_offset(f);
      const std::size_t dim = spec.state_factor_dim(f);
      for (std::size_t d = 0; d < dim; ++d) {
        dst.s[off + d] = src.s[off + d];
        dst.s_next[off + d] = src.s_next[off + d];
      }
    } else {
      const std::size_t af = f - spec.n_state_factors();
      const std::size_t off = spec.action_factor_offset(af);
      const std::size_t dim = spec.action_factor_dim(af);
      for (std::size_t d = 0; d < dim; ++d) dst.a[off + d] = src.a[off + d];
    }
  }
}

CodaProposal attempt_swap(const Transition& t1, const Transition& t2,
                          const LocalModel& model, const FactorSpec& spec,
                          const std::vector<std::size_t>& set) {
  CodaProposal p;
  p.swapped_set = set;
  p.result = t1;
  apply_swap(spec, set, t2, p.result);
  p.result.r = std::numeric_limits<double>::quiet_NaN();
  const LocalMask m = eval_mask(
      [&](const Vec& s, const Vec& a) { return model.mask(s, a); }, spec, p.result.s,
      p.result.a);
  const IndependentSets d_new = independent_sets(components(m));
  const bool same_region =
      model.region(p.result.s, p.result.a) == model.region(t1.s, t1.a);
  if (contains_set(d_new.sets, set) && same_region) {
    p.accepted = true;
  } else {
    p.accepted = false;
    p.reject_reason = CodaReject::kPostMaskMismatch;
  }
  return p;
}

std::vector<std::vector<std::size_t>> swap_candidates(const Transition& t1,
                                                      const Transition& t2,
                                                      const LocalModel& model,
                                                      const FactorSpec& spec) {
  // Sources in different neighborhoods do not share structural equations,
  // so no swap set is valid between them.
  if (model.region(t1.s, t1.a) != model.region(t2.s, t2.a)) return {};
  const LocalMask m1 = eval_mask(
      [&](const Vec& s, const Vec& a) { return model.mask(s, a); }, spec, t1.s, t1.a);
  const LocalMask m2 = eval_mask(
      [&](const Vec& s, const Vec& a) { return model.mask(s, a); }, spec, t2.s, t2.a);
  const IndependentSets d1 = independent_sets(components(m1));
  const IndependentSets d2 = independent_sets(components(m2));
  return shared_sets(d1.sets, d2.sets);
}

}  // namespace

CodaProposal coda_swap(const Transition& t1, const Transition& t2, const LocalModel& model,
                       const FactorSpec& spec, Rng& rng) {
  const auto candidates = swap_candidates(t1, t2, model, spec);
  if (candidates.empty()) {
    CodaProposal p;
    p.accepted = false;
    p.reject_reason = CodaReject::kNoSharedSet;
    return p;
  }
  const auto& set = candidates[rng.uniform_below(candidates.size())];
  return attempt_swap(t1, t2, model, spec, set);
}

std::vector<CodaProposal> coda_swap_all(const Transition& t1, const Transition& t2,
                                        const LocalModel& model, const FactorSpec& spec) {
  std::vector<CodaProposal> out;
  for (const auto& set : swap_candidates(t1, t2, model, spec)) {
    out.push_back(attempt_swap(t1, t2, model, spec, set));
  }
  return out;
}

Transition relabel_reward(const Transition& t, const RewardFn& reward_fn) {
  Transition out = t;
  out.r = reward_fn(out.s, out.a, out.s_next);
  return out;
}

Transition relabel_goal(const Transition& t, const FactorSpec& spec,
                        const std::vector<std::size_t>& goal_factors, const Vec& g_new,
                        const RewardFn& reward_fn) {
  std::size_t total = 0;
  for (std::size_t f : goal_factors) {
    if (f >= spec.n_state_factors())
      throw std::invalid_argument("relabel_goal: goal factors must be state factors");
    const std::size_t off = spec.state_factor_offset(f);
    for (std::size_t d = 0; d < spec.state_factor_dim(f); ++d) {
      if (t.s[off + d] != t.s_next[off + d]) {
        throw std::invalid_argument(
            "relabel_goal: goal dims changed within the transition (identity "
            "dynamics violated)");
      }
    }
    total += spec.state_factor_dim(f);
  }
  if (g_new.size() != total)
    throw std::invalid_argument("relabel_goal: g_new has wrong dimension");
  Transition out = t;
  std::size_t k = 0;
  for (std::size_t f : goal_factors) {
    const std::size_t off = spec.state_factor_offset(f);
    for (std::size_t d = 0; d < spec.state_factor_dim(f); ++d, ++k) {
      out.s[off + d] = g_new[k];
      out.s_next[off + d] = g_new[k];
    }
  }
  return relabel_reward(out, reward_fn);
}

Dataset amplify(const Dataset& ds, const LocalModel& model, const RewardFn& reward_fn,
                std::size_t pair_budget, std::size_t per_pair, double max_ratio,
                std::uint64_t seed, AmplifyStats* stats) {
  if (ds.size() < 2) throw std::invalid_argument("amplify: need at least 2 transitions");
  if (!(max_ratio > 0.0)) throw std::invalid_argument("amplify: max_ratio must be > 0");

  struct PairOutcome {
    std::vector<Transition> accepted;
    std::size_t no_shared = 0;
    std::size_t post_mask = 0;
  };
  std::vector<PairOutcome> outcomes(pair_budget);
  const std::uint64_t base = Rng::derive(seed, "amplify");
  const FactorSpec& spec = ds.spec();

  parallel_for(pair_budget, [&](std::size_t p) {
    Rng rng(Rng::derive(base, p));
    const std::size_t i = rng.uniform_below(ds.size());
    const std::size_t j = rng.uniform_below(ds.size());
    for (std::size_t attempt = 0; attempt < per_pair; ++attempt) {
      CodaProposal prop = coda_swap(ds[i], ds[j], model, spec, rng);
      if (prop.accepted) {
        outcomes[p].accepted.push_back(relabel_reward(prop.result, reward_fn));
      } else if (prop.reject_reason == CodaReject::kNoSharedSet) {
        ++outcomes[p].no_shared;
      } else {
        ++outcomes[p].post_mask;
      }
    }
  });

  const std::size_t cap = static_cast<std::size_t>(max_ratio * static_cast<double>(ds.size()));
  Dataset out(spec);
  for (std::size_t i = 0; i < ds.size(); ++i) out.append(ds[i], ds.provenance()[i]);
  AmplifyStats local;
  local.attempts = pair_budget * per_pair;
  std::size_t kept = 0;
  for (const PairOutcome& o : outcomes) {
    local.rejected_no_shared_set += o.no_shared;
    local.rejected_post_mask += o.post_mask;
    for (const Transition& t : o.accepted) {
      ++local.accepted;
      if (kept < cap) {
        out.append(t, Provenance::kCoda);
        ++kept;
      } else {
        ++local.truncated;
      }
    }
  }
  if (stats) *stats = local;
  return out;
}

std::size_t enumerate_proposals(const Dataset& ds, const LocalModel& model) {
  if (ds.size() > 64)
    throw std::invalid_argument("enumerate_proposals: exhaustive mode needs |ds| <= 64");
  const FactorSpec& spec = ds.spec();

  // Stratify by component structure (and neighborhood, so only transitions
  // with shared structural equations combine).
  std::unordered_map<std::string, std::vector<std::size_t>> strata;
  std::unordered_map<std::string, ComponentPartition> structures;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const LocalMask m = eval_mask(
        [&](const Vec& s, const Vec& a) { return model.mask(s, a); }, spec, ds[i].s,
        ds[i].a);
    const ComponentPartition part = components(m);
    const std::string key = part.to_json() + "|" + model.region(ds[i].s, ds[i].a);
    strata[key].push_back(i);
    structures.emplace(key, part);
  }

  auto tuple_bytes = [](const Transition& t) {
    std::string bytes;
    bytes.reserve((t.s.size() + t.a.size() + t.s_next.size()) * sizeof(double));
    auto add = [&](const Vec& v) {
      const char* raw = reinterpret_cast<const char*>(v.data());
      bytes.append(raw, raw + v.size() * sizeof(double));
    };
    add(t.s);
    add(t.a);
    add(t.s_next);
    return bytes;
  };

  std::size_t total = 0;
  for (const auto& [key, indices] : strata) {
    const ComponentPartition& part = structures.at(key);
    const std::size_t c = part.components.size();
    std::unordered_set<std::string> distinct;
    std::vector<std::size_t> choice(c, 0);  // odometer over sources per component
    for (;;) {
      Transition assembled = ds[indices[choice[0]]];
      for (std::size_t k = 0; k < c; ++k) {
        apply_swap(spec, part.components[k], ds[indices[choice[k]]], assembled);
      }
      distinct.insert(tuple_bytes(assembled));
      std::size_t pos = 0;
      while (pos < c && ++choice[pos] == indices.size()) {
        choice[pos] = 0;
        ++pos;
      }
      if (pos == c) break;
    }
    total += distinct.size();
  }
  return total;
}

}  // namespace coda
