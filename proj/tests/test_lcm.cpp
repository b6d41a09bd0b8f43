#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "coda/envs/nav2d.hpp"
#include "coda/lcm/mask.hpp"
#include "coda/util/rng.hpp"
#include "test_helpers.hpp"

using namespace coda;

namespace {

const FactorSpec kNavSpec = nav2d_spec();

LocalMask random_mask(std::size_t rows, std::size_t cols, Rng& rng, double density) {
  LocalMask m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m.set(r, c, rng.uniform() < density);
  return m;
}

std::vector<std::pair<std::size_t, std::size_t>> edge_list(const LocalMask& m) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (m.at(r, c)) edges.push_back({r, c});
  return edges;
}

}  // namespace

TEST_CASE("eval_mask returns the 2D-Nav base mask off the quadrant") {
  const LocalMask m = eval_mask(nav2d_mask, kNavSpec, {0.2, 0.3}, {0.0, 0.0});
  CHECK(m == LocalMask::from_rows({{1, 0}, {0, 1}, {1, 0}, {0, 1}}));
}

TEST_CASE("eval_mask returns all-ones inside the quadrant") {
  const LocalMask m = eval_mask(nav2d_mask, kNavSpec, {0.8, 0.9}, {0.0, 0.0});
  CHECK(m == LocalMask(4, 2, 1));
}

TEST_CASE("eval_mask of a constant function is constant") {
  MaskFunction identity_on_states = [](const Vec&, const Vec&) {
    return LocalMask::from_rows({{1, 0}, {0, 1}, {0, 0}, {0, 0}});
  };
  const LocalMask a = eval_mask(identity_on_states, kNavSpec, {0.1, 0.1}, {0.5, 0.5});
  const LocalMask b = eval_mask(identity_on_states, kNavSpec, {0.9, 0.9}, {-0.5, 0.5});
  CHECK(a == b);
}

TEST_CASE("components: 2D-Nav base mask gives the two axis components") {
  const auto part = components(eval_mask(nav2d_mask, kNavSpec, {0.2, 0.3}, {0, 0}));
  REQUIRE(part.components.size() == 2);
  CHECK(part.components[0] == std::vector<std::size_t>{0, 2});
  CHECK(part.components[1] == std::vector<std::size_t>{1, 3});
  CHECK(part.to_json() == "[[0,2],[1,3]]");
}

TEST_CASE("components: all-ones mask is one component") {
  const auto part = components(LocalMask(4, 2, 1));
  REQUIRE(part.components.size() == 1);
  CHECK(part.components[0] == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("components: 3-object block-diagonal toy matches the closure oracle") {
  // paddle / paddle / ball, each with its own sub-action
  LocalMask m(6, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    m.set(i, i, true);
    m.set(3 + i, i, true);
  }
  const auto part = components(m);
  REQUIRE(part.components.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(part.components[i] == std::vector<std::size_t>{i, 3 + i});
  }
  const auto oracle = testing::closure_components(6, edge_list(m));
  CHECK(part.components == oracle);
}

TEST_CASE("components agree with the closure oracle on random masks") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n_state = 1 + rng.uniform_below(4);
    const std::size_t n_action = rng.uniform_below(3);
    const LocalMask m = random_mask(n_state + n_action, n_state, rng, 0.3);
    const auto part = components(m);
    const auto oracle = testing::closure_components(n_state + n_action, edge_list(m));
    CHECK(part.components == oracle);
    // factor_to_component is consistent with the component list
    for (std::size_t c = 0; c < part.components.size(); ++c) {
      for (std::size_t f : part.components[c]) CHECK(part.factor_to_component[f] == c);
    }
  }
}

TEST_CASE("independent_sets sizes: 2 -> 2, 1 -> 0, 3 -> 6") {
  ComponentPartition two{{0, 1}, {{0}, {1}}};
  CHECK(independent_sets(two).sets.size() == 2);
  CHECK(independent_sets(two).sets.size() == testing::powerset_proper_union_count(2));

  ComponentPartition one{{0, 0}, {{0, 1}}};
  CHECK(independent_sets(one).sets.empty());

  ComponentPartition three{{0, 1, 2}, {{0}, {1}, {2}}};
  const auto sets = independent_sets(three).sets;
  CHECK(sets.size() == 6);
  CHECK(sets.size() == testing::powerset_proper_union_count(3));
  // binary-counter order: {0}, {1}, {0,1}, {2}, {0,2}, {1,2}
  CHECK(sets[0] == std::vector<std::size_t>{0});
  CHECK(sets[2] == std::vector<std::size_t>{0, 1});
  CHECK(sets[5] == std::vector<std::size_t>{1, 2});
}

TEST_CASE("no independent set has a mask edge crossing its boundary") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n_state = 1 + rng.uniform_below(4);
    const std::size_t n_action = rng.uniform_below(3);
    const LocalMask m = random_mask(n_state + n_action, n_state, rng, 0.25);
    const auto sets = independent_sets(components(m));
    for (const auto& set : sets.sets) {
      for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
          if (!m.at(r, c)) continue;
          const bool r_in = std::binary_search(set.begin(), set.end(), r);
          const bool c_in = std::binary_search(set.begin(), set.end(), c);
          CHECK(r_in == c_in);
        }
      }
    }
  }
}

TEST_CASE("jacobian_mask recovers the 2D-Nav masks") {
  const Nav2dConfig cfg;
  DynamicsFn step = [&](const Vec& s, const Vec& a) { return nav2d_next(s, a, cfg); };

  const auto factored = jacobian_mask(step, kNavSpec, {0.2, 0.2}, {0.1, -0.2}, 1e-5, 1e-6);
  CHECK(factored.mask == LocalMask::from_rows({{1, 0}, {0, 1}, {1, 0}, {0, 1}}));

  const auto coupled = jacobian_mask(step, kNavSpec, {0.8, 0.8}, {0.1, -0.2}, 1e-5, 1e-6);
  CHECK(coupled.mask == LocalMask(4, 2, 1));

  DynamicsFn constant = [](const Vec&, const Vec&) { return Vec{0.5, 0.5}; };
  const auto zero = jacobian_mask(constant, kNavSpec, {0.2, 0.2}, {0.0, 0.0}, 1e-5, 1e-6);
  CHECK(zero.mask == LocalMask(4, 2, 0));
}

TEST_CASE("jacobian_mask flags one-sided probes at the bounds") {
  const Nav2dConfig cfg;
  DynamicsFn step = [&](const Vec& s, const Vec& a) { return nav2d_next(s, a, cfg); };
  const auto r = jacobian_mask(step, kNavSpec, {0.0, 0.2}, {0.0, 0.0}, 1e-5, 1e-6);
  CHECK(r.used_one_sided);
}

TEST_CASE("jacobian mask equals nav2d_mask at probes off the quadrant boundary") {
  const Nav2dConfig cfg;
  DynamicsFn step = [&](const Vec& s, const Vec& a) { return nav2d_next(s, a, cfg); };
  Rng rng(31);
  int tested = 0;
  while (tested < 200) {
    const Vec s{rng.uniform(0.02, 0.98), rng.uniform(0.02, 0.98)};
    const Vec a{rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9)};
    if (std::abs(s[0] - 0.5) < 1e-3 || std::abs(s[1] - 0.5) < 1e-3) continue;
    // Skip states whose probe could clip against the walls: clipping
    // flattens the local Jacobian and legitimately sparsifies it.
    const Vec nxt = nav2d_next(s, a, cfg);
    if (nxt[0] < 0.01 || nxt[0] > 0.99 || nxt[1] < 0.01 || nxt[1] > 0.99) continue;
    const auto jac = jacobian_mask(step, kNavSpec, s, a, 1e-5, 1e-6);
    CHECK(jac.mask == nav2d_mask(s, a));
    ++tested;
  }
}

TEST_CASE("verify_minimality: ground-truth mask has zero false negatives") {
  const Nav2dConfig cfg;
  DynamicsFn step = [&](const Vec& s, const Vec& a) { return nav2d_next(s, a, cfg); };
  const ProbeGrid grid = make_probe_grid(kNavSpec, {21, 21, 9, 9});
  const auto report = verify_minimality(step, nav2d_mask, kNavSpec, grid);
  CHECK(report.false_negative_pairs == 0);
  CHECK(report.false_negatives.empty());
}

TEST_CASE("verify_minimality: deleting the coupled dx->y' edge is caught") {
  const Nav2dConfig cfg;
  DynamicsFn step = [&](const Vec& s, const Vec& a) { return nav2d_next(s, a, cfg); };
  MaskFunction broken = [](const Vec& s, const Vec& a) {
    LocalMask m = nav2d_mask(s, a);
    m.set(2, 1, false);  // drop dx -> y' even in the coupled quadrant
    return m;
  };
  const ProbeGrid grid = make_probe_grid(kNavSpec, {21, 21, 9, 9});
  const auto report = verify_minimality(step, broken, kNavSpec, grid);
  REQUIRE(report.false_negative_pairs > 0);
  bool in_quadrant = false;
  for (const auto& fn : report.false_negatives) {
    if (fn.probe[0] > 0.5 && fn.probe[1] > 0.5 && fn.input_factor == 2 &&
        fn.child_factor == 1) {
      in_quadrant = true;
    }
  }
  CHECK(in_quadrant);
}

TEST_CASE("verify_minimality: all-ones mask is sound but non-minimal off-diagonal") {
  const Nav2dConfig cfg;
  DynamicsFn step = [&](const Vec& s, const Vec& a) { return nav2d_next(s, a, cfg); };
  MaskFunction dense = [](const Vec&, const Vec&) { return LocalMask(4, 2, 1); };
  // Probe the factored region only (x, y below the quadrant).
  ProbeGrid grid;
  grid.values.resize(4);
  for (int i = 0; i < 5; ++i) {
    grid.values[0].push_back(0.05 + 0.1 * i);
    grid.values[1].push_back(0.05 + 0.1 * i);
    grid.values[2].push_back(-0.6 + 0.3 * i);
    grid.values[3].push_back(-0.6 + 0.3 * i);
  }
  const auto report = verify_minimality(step, dense, kNavSpec, grid);
  CHECK(report.false_negative_pairs == 0);
  const auto unused = report.unused_edges();
  // Off-diagonal factor edges are never exercised in the factored region.
  auto has = [&](std::size_t in, std::size_t child) {
    for (const auto& e : unused) {
      if (e.input_factor == in && e.child_factor == child) return true;
    }
    return false;
  };
  CHECK(has(0, 1));  // x  -> y'
  CHECK(has(1, 0));  // y  -> x'
  CHECK(has(2, 1));  // dx -> y'
  CHECK(has(3, 0));  // dy -> x'
}

TEST_CASE("LocalMask csv round-trip") {
  const LocalMask m = LocalMask::from_rows({{1, 0}, {0, 1}, {1, 1}});
  CHECK(m.to_csv() == "1,0\n0,1\n1,1\n");
  CHECK(LocalMask::from_csv(m.to_csv()) == m);
}
