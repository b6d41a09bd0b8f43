#include "coda/envs/nav2d.hpp"

#include <cmath>
#include <stdexcept>

#include "coda/util/rng.hpp"

namespace coda {
namespace {

double clip(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }

bool in_coupled_quadrant(const Vec& s) { return s[0] > 0.5 && s[1] > 0.5; }

}  // namespace

void Nav2dConfig::validate() const {
  if (!(goal_radius > 0.0 && goal_radius < 0.5))
    throw std::invalid_argument("Nav2dConfig: goal_radius must be in (0, 0.5)");
  for (const auto& row : coupling) {
    for (double v : row) {
      if (v == 0.0)
        throw std::invalid_argument("Nav2dConfig: coupling must have no zero entries");
    }
  }
  if (step_scale <= 0.0) throw std::invalid_argument("Nav2dConfig: step_scale must be > 0");
  if (!(state_mix > 0.0 && state_mix < 0.5))
    throw std::invalid_argument("Nav2dConfig: state_mix must be in (0, 0.5)");
}

FactorSpec nav2d_spec() {
  return FactorSpec({{"x", 1}, {"y", 1}}, {{"dx", 1}, {"dy", 1}},
                    {{0.0, 1.0}, {0.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}});
}

Vec nav2d_next(const Vec& s, const Vec& a, const Nav2dConfig& cfg) {
  if (!in_coupled_quadrant(s)) {
    return {clip(s[0] + cfg.step_scale * a[0], 0.0, 1.0),
            clip(s[1] + cfg.step_scale * a[1], 0.0, 1.0)};
  }
  const double mx = cfg.coupling[0][0] * a[0] + cfg.coupling[0][1] * a[1];
  const double my = cfg.coupling[1][0] * a[0] + cfg.coupling[1][1] * a[1];
  const double m = cfg.state_mix;
  const double bx = (1.0 - m) * s[0] + m * s[1];
  const double by = m * s[0] + (1.0 - m) * s[1];
  return {clip(bx + cfg.step_scale * mx, 0.0, 1.0), clip(by + cfg.step_scale * my, 0.0, 1.0)};
}

double nav2d_reward(const Vec& s_next, const Nav2dConfig& cfg) {
  const double dx = s_next[0] - cfg.goal[0];
  const double dy = s_next[1] - cfg.goal[1];
  return std::sqrt(dx * dx + dy * dy) <= cfg.goal_radius ? 0.0 : -1.0;
}

StepResult nav2d_step(const Vec& s, const Vec& a, const Nav2dConfig& cfg) {
  if (s.size() != 2 || a.size() != 2 || s[0] < 0.0 || s[0] > 1.0 || s[1] < 0.0 ||
      s[1] > 1.0 || a[0] < -1.0 || a[0] > 1.0 || a[1] < -1.0 || a[1] > 1.0) {
    throw std::invalid_argument("nav2d_step: input outside the state/action boxes");
  }
  StepResult out;
  out.s_next = nav2d_next(s, a, cfg);
  out.r = nav2d_reward(out.s_next, cfg);
  out.at_goal = out.r == 0.0;
  return out;
}

LocalMask nav2d_mask(const Vec& s, const Vec& /*a*/) {
  static const LocalMask base = LocalMask::from_rows({{1, 0}, {0, 1}, {1, 0}, {0, 1}});
  static const LocalMask dense = LocalMask(4, 2, 1);
  return in_coupled_quadrant(s) ? dense : base;
}

LocalModel nav2d_local_model() {
  return LocalModel([](const Vec& s, const Vec& a) { return nav2d_mask(s, a); });
}

std::vector<std::vector<std::size_t>> nav2d_parent_sets() { return {{0, 2}, {1, 3}}; }

namespace {

// One band-confined trajectory. `along` is the coordinate the trajectory
// advances (0 for left-to-right, 1 for bottom-to-top); the other
// coordinate stays within [across_lo, across_hi]. The band is part of the
// data-collecting policy, not of the environment, so confinement is
// enforced against the true next state (the coupled quadrant bends the
// across-drift for bottom-to-top trajectories).
void gen_band_trajectory(std::size_t along, double across_lo, double across_hi,
                         std::size_t want, Dataset& ds, Rng& rng,
                         const Nav2dConfig& cfg) {
  const std::size_t across = 1 - along;
  Vec s(2);
  s[along] = rng.uniform(0.0, 0.08);
  s[across] = rng.uniform(across_lo + 0.02, across_hi - 0.02);
  const double heading_bias = rng.uniform(-0.3, 0.3);
  std::size_t made = 0;
  for (int step = 0; step < cfg.horizon && made < want; ++step) {
    Vec a(2);
    a[along] = rng.uniform(0.45, 1.0);
    a[across] = clip(heading_bias + rng.uniform(-0.25, 0.25), -1.0, 1.0);
    Vec next = nav2d_next(s, a, cfg);
    if (next[across] < across_lo || next[across] > across_hi) {
      a[across] = -a[across];
      next = nav2d_next(s, a, cfg);
    }
    if (next[across] < across_lo || next[across] > across_hi) {
      a[across] = 0.0;
      next = nav2d_next(s, a, cfg);
    }
    if (next[across] < across_lo || next[across] > across_hi) break;
    Transition t;
    t.s = s;
    t.a = a;
    t.s_next = next;
    t.r = nav2d_reward(next, cfg);
    ds.append(t, Provenance::kReal);
    ++made;
    s = next;
    if (s[along] >= 0.98 || t.r == 0.0) break;
  }
}

}  // namespace

Dataset gen_emp_data(std::size_t n_per_kind, std::uint64_t seed, const Nav2dConfig& cfg) {
  cfg.validate();
  if (n_per_kind == 0) throw std::invalid_argument("gen_emp_data: n_per_kind must be > 0");
  Dataset ds(nav2d_spec());
  for (std::size_t kind = 0; kind < 2; ++kind) {
    Rng kind_rng(Rng::derive(seed, kind == 0 ? "emp-lr" : "emp-bt"));
    const std::size_t along = kind == 0 ? 0 : 1;
    const double lo = kind == 0 ? 0.0 : 1.0 - cfg.band_width;
    const double hi = kind == 0 ? cfg.band_height : 1.0;
    std::size_t before = ds.size();
    std::size_t traj = 0;
    while (ds.size() - before < n_per_kind) {
      Rng rng(Rng::derive(kind_rng.next_u64(), traj++));
      gen_band_trajectory(along, lo, hi, n_per_kind - (ds.size() - before), ds, rng, cfg);
    }
  }
  return ds;
}

}  // namespace coda
