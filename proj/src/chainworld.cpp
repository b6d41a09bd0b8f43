#include "coda/envs/chainworld.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "coda/util/rng.hpp"

namespace coda {

void ChainworldConfig::validate() const {
  if (alphabets.empty()) throw std::invalid_argument("chainworld: need >= 1 factor");
  if (action_alphabet == 0) throw std::invalid_argument("chainworld: empty action alphabet");
  if (tables.size() != alphabets.size())
    throw std::invalid_argument("chainworld: one table per factor required");
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (tables[i].size() != alphabets[i] * action_alphabet)
      throw std::invalid_argument("chainworld: table " + std::to_string(i) +
                                  " has wrong row count");
    for (const auto& row : tables[i]) {
      if (row.size() != alphabets[i])
        throw std::invalid_argument("chainworld: table row width mismatch");
      double sum = 0.0;
      for (double p : row) sum += p;
      if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("chainworld: table rows must sum to 1");
    }
  }
}

ChainworldConfig make_chainworld(const std::vector<std::size_t>& alphabets,
                                 std::size_t action_alphabet, std::uint64_t seed) {
  ChainworldConfig cfg;
  cfg.alphabets = alphabets;
  cfg.action_alphabet = action_alphabet;
  Rng rng(Rng::derive(seed, "chainworld-tables"));
  for (std::size_t i = 0; i < alphabets.size(); ++i) {
    std::vector<std::vector<double>> table;
    for (std::size_t row = 0; row < alphabets[i] * action_alphabet; ++row) {
      std::vector<double> p(alphabets[i]);
      double sum = 0.0;
      for (double& v : p) {
        v = 0.05 + rng.uniform();  // bounded away from zero
        sum += v;
      }
      for (double& v : p) v /= sum;
      table.push_back(std::move(p));
    }
    cfg.tables.push_back(std::move(table));
  }
  cfg.validate();
  return cfg;
}

FactorSpec chainworld_spec(const ChainworldConfig& cfg) {
  std::vector<Factor> state;
  std::vector<Interval> bounds;
  for (std::size_t i = 0; i < cfg.k(); ++i) {
    state.push_back({"c" + std::to_string(i), 1});
    bounds.push_back({-0.5, static_cast<double>(cfg.alphabets[i]) - 0.5});
  }
  bounds.push_back({-0.5, static_cast<double>(cfg.action_alphabet) - 0.5});
  return FactorSpec(std::move(state), {{"u", 1}}, std::move(bounds));
}

std::size_t chainworld_state_count(const ChainworldConfig& cfg) {
  std::size_t total = 1;
  for (std::size_t a : cfg.alphabets) total *= a;
  return total;
}

std::size_t chainworld_encode_state(const ChainworldConfig& cfg, const Vec& s) {
  std::size_t code = 0;
  for (std::size_t i = 0; i < cfg.k(); ++i) {
    code = code * cfg.alphabets[i] + static_cast<std::size_t>(s[i]);
  }
  return code;
}

Vec chainworld_decode_state(const ChainworldConfig& cfg, std::size_t code) {
  Vec s(cfg.k());
  for (std::size_t i = cfg.k(); i-- > 0;) {
    s[i] = static_cast<double>(code % cfg.alphabets[i]);
    code /= cfg.alphabets[i];
  }
  return s;
}

std::vector<double> chainworld_true_joint(const ChainworldConfig& cfg, const Vec& s,
                                          const Vec& a) {
  const std::size_t total = chainworld_state_count(cfg);
  const std::size_t action = static_cast<std::size_t>(a[0]);
  std::vector<double> joint(total, 1.0);
  for (std::size_t code = 0; code < total; ++code) {
    const Vec next = chainworld_decode_state(cfg, code);
    for (std::size_t i = 0; i < cfg.k(); ++i) {
      const std::size_t row =
          static_cast<std::size_t>(s[i]) * cfg.action_alphabet + action;
      joint[code] *= cfg.tables[i][row][static_cast<std::size_t>(next[i])];
    }
  }
  return joint;
}

Dataset chainworld_sample(const ChainworldConfig& cfg, std::size_t n, bool even_allocation,
                          std::uint64_t seed) {
  cfg.validate();
  Dataset ds(chainworld_spec(cfg));
  Rng rng(Rng::derive(seed, "chainworld-sample"));
  const std::size_t n_states = chainworld_state_count(cfg);
  const std::size_t n_joint = n_states * cfg.action_alphabet;
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t joint_idx = even_allocation ? t % n_joint : rng.uniform_below(n_joint);
    const std::size_t action = joint_idx % cfg.action_alphabet;
    const Vec s = chainworld_decode_state(cfg, joint_idx / cfg.action_alphabet);
    Vec s_next(cfg.k());
    for (std::size_t i = 0; i < cfg.k(); ++i) {
      const std::size_t row = static_cast<std::size_t>(s[i]) * cfg.action_alphabet + action;
      const auto& p = cfg.tables[i][row];
      double u = rng.uniform();
      std::size_t v = 0;
      while (v + 1 < p.size() && u >= p[v]) {
        u -= p[v];
        ++v;
      }
      s_next[i] = static_cast<double>(v);
    }
    Transition tr;
    tr.s = s;
    tr.a = {static_cast<double>(action)};
    tr.s_next = s_next;
    tr.r = 0.0;
    ds.append(tr, Provenance::kReal);
  }
  return ds;
}

FactorSpec chainworld_flat_spec(const ChainworldConfig& cfg) {
  const double hi = static_cast<double>(chainworld_state_count(cfg)) - 0.5;
  return FactorSpec({{"joint", 1}}, {{"u", 1}},
                    {{-0.5, hi}, {-0.5, static_cast<double>(cfg.action_alphabet) - 0.5}});
}

Dataset chainworld_flatten(const ChainworldConfig& cfg, const Dataset& ds) {
  Dataset flat(chainworld_flat_spec(cfg));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Transition& t = ds[i];
    Transition f;
    f.s = {static_cast<double>(chainworld_encode_state(cfg, t.s))};
    f.a = t.a;
    f.s_next = {static_cast<double>(chainworld_encode_state(cfg, t.s_next))};
    f.r = t.r;
    flat.append(f, ds.provenance()[i]);
  }
  return flat;
}

}  // namespace coda
