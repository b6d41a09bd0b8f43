#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "coda/aug/coda.hpp"
#include "coda/core/io.hpp"
#include "coda/envs/icy_rooms.hpp"
#include "coda/envs/nav2d.hpp"

using namespace coda;

namespace {

const Nav2dConfig kCfg;
const FactorSpec kSpec = nav2d_spec();

Transition nav_transition(const Vec& s, const Vec& a) {
  const auto res = nav2d_step(s, a, kCfg);
  return Transition{s, a, res.s_next, res.r};
}

RewardFn nav_reward() {
  return [](const Vec&, const Vec&, const Vec& s_next) {
    return nav2d_reward(s_next, kCfg);
  };
}

bool matches_dynamics(const Transition& t) {
  return nav2d_next(t.s, t.a, kCfg) == t.s_next;
}

}  // namespace

TEST_CASE("coda_swap: factored sources accept and satisfy the dynamics oracle") {
  const Transition t1 = nav_transition({0.2, 0.1}, {0.8, 0.1});
  const Transition t2 = nav_transition({0.4, 0.15}, {0.6, -0.2});
  const LocalModel model = nav2d_local_model();

  const auto proposals = coda_swap_all(t1, t2, model, kSpec);
  REQUIRE(proposals.size() == 2);
  bool saw_y_swap = false;
  for (const auto& p : proposals) {
    REQUIRE(p.accepted);
    CHECK(std::isnan(p.result.r));
    Transition relabeled = relabel_reward(p.result, nav_reward());
    CHECK(matches_dynamics(relabeled));
    if (p.swapped_set == std::vector<std::size_t>{1, 3}) {
      saw_y_swap = true;
      // y-component slices come from t2, x-component stays from t1
      CHECK(relabeled.s == Vec{0.2, 0.15});
      CHECK(relabeled.a == Vec{0.8, -0.2});
      CHECK(relabeled.s_next[0] == t1.s_next[0]);
      CHECK(relabeled.s_next[1] == t2.s_next[1]);
    }
  }
  CHECK(saw_y_swap);
}

TEST_CASE("coda_swap: a coupled-quadrant source has no shared set") {
  const Transition t1 = nav_transition({0.7, 0.8}, {0.3, 0.3});  // single component
  const Transition t2 = nav_transition({0.2, 0.1}, {0.5, 0.0});
  const LocalModel model = nav2d_local_model();
  Rng rng(1);
  const auto p = coda_swap(t1, t2, model, kSpec, rng);
  CHECK_FALSE(p.accepted);
  CHECK(p.reject_reason == CodaReject::kNoSharedSet);
}

TEST_CASE("coda_swap: a result landing in the quadrant is rejected post-mask") {
  // both sources factored; keeping x from t1 and taking y from t2 lands the
  // result in the coupled quadrant, where the swapped set is no longer
  // independent
  const Transition t1 = nav_transition({0.7, 0.1}, {0.5, 0.0});
  const Transition t2 = nav_transition({0.2, 0.8}, {0.0, 0.5});
  const LocalModel model = nav2d_local_model();
  const auto proposals = coda_swap_all(t1, t2, model, kSpec);
  REQUIRE(proposals.size() == 2);
  for (const auto& p : proposals) {
    if (p.swapped_set == std::vector<std::size_t>{1, 3}) {
      REQUIRE_FALSE(p.accepted);
      CHECK(p.reject_reason == CodaReject::kPostMaskMismatch);
    } else {
      // the x-swap stays factored: (0.2, 0.1)
      CHECK(p.accepted);
    }
  }
}

TEST_CASE("relabel_reward recomputes the sparse goal reward") {
  Transition at_goal = nav_transition({0.85, 0.85}, {0.9, 0.9});
  REQUIRE(at_goal.r == 0.0);
  at_goal.r = -123.0;
  CHECK(relabel_reward(at_goal, nav_reward()).r == 0.0);

  const Transition off_goal = nav_transition({0.2, 0.2}, {0.5, 0.5});
  CHECK(relabel_reward(off_goal, nav_reward()).r == -1.0);

  RewardFn zero = [](const Vec&, const Vec&, const Vec&) { return 0.0; };
  CHECK(relabel_reward(off_goal, zero).r == 0.0);
}

TEST_CASE("relabel_goal rewrites identity goal dims and recomputes reward") {
  // state = (pos, goal), action moves pos only; goal has identity dynamics
  FactorSpec spec({{"pos", 1}, {"goal", 1}}, {{"u", 1}},
                  {{0, 1}, {0, 1}, {-1, 1}});
  RewardFn reward = [](const Vec&, const Vec&, const Vec& s_next) {
    return std::abs(s_next[0] - s_next[1]) <= 0.05 ? 0.0 : -1.0;
  };
  Transition t{{0.2, 0.9}, {0.5}, {0.25, 0.9}, -1.0};

  // relabel to the achieved position: failure flips to success
  const Transition hit = relabel_goal(t, spec, {1}, {0.25}, reward);
  CHECK(hit.s == Vec{0.2, 0.25});
  CHECK(hit.s_next == Vec{0.25, 0.25});
  CHECK(hit.r == 0.0);

  // relabel to the old goal: transition unchanged
  const Transition same = relabel_goal(t, spec, {1}, {0.9}, reward);
  CHECK(same == t);

  // violated identity precondition
  Transition moved = t;
  moved.s_next[1] = 0.8;
  CHECK_THROWS_AS(relabel_goal(moved, spec, {1}, {0.5}, reward), std::invalid_argument);
}

TEST_CASE("amplify: a dataset inside the coupled quadrant yields zero CoDA data") {
  Dataset ds(kSpec);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const Vec s{rng.uniform(0.55, 0.9), rng.uniform(0.55, 0.9)};
    const Vec a{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    ds.append(nav_transition(s, a), Provenance::kReal);
  }
  AmplifyStats stats;
  const Dataset out =
      amplify(ds, nav2d_local_model(), nav_reward(), 200, 2, 3.0, 11, &stats);
  CHECK(out.size() == ds.size());
  CHECK(stats.accepted == 0);
  CHECK(stats.rejected_no_shared_set == stats.attempts);
}

TEST_CASE("amplify: factored data augments, every sample passes the oracle") {
  Dataset ds(kSpec);
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const Vec s{rng.uniform(0.0, 0.95), rng.uniform(0.0, 0.2)};
    const Vec a{rng.uniform(-1.0, 1.0), rng.uniform(-0.5, 0.5)};
    ds.append(nav_transition(s, a), Provenance::kReal);
  }
  AmplifyStats stats;
  const Dataset out =
      amplify(ds, nav2d_local_model(), nav_reward(), 400, 2, 3.0, 17, &stats);
  REQUIRE(out.size() > ds.size());
  CHECK(out.size() - ds.size() <= 300);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out.provenance()[i] == Provenance::kCoda) {
      CHECK(matches_dynamics(out[i]));
      CHECK(out[i].r == nav2d_reward(out[i].s_next, kCfg));
    } else {
      CHECK(out.provenance()[i] == Provenance::kReal);
    }
  }
}

TEST_CASE("amplify honors the CoDA:real ratio caps exactly") {
  Dataset ds(kSpec);
  Rng rng(7);
  for (int i = 0; i < 40; ++i) {
    const Vec s{rng.uniform(0.0, 0.95), rng.uniform(0.0, 0.2)};
    const Vec a{rng.uniform(-1.0, 1.0), rng.uniform(-0.5, 0.5)};
    ds.append(nav_transition(s, a), Provenance::kReal);
  }
  for (double ratio : {1.0, 3.0, 5.0}) {
    AmplifyStats stats;
    const Dataset out =
        amplify(ds, nav2d_local_model(), nav_reward(), 2000, 2, ratio, 23, &stats);
    const std::size_t cap = static_cast<std::size_t>(ratio * 40);
    REQUIRE(stats.accepted > cap);  // enough raw acceptances to hit the cap
    CHECK(out.size() - ds.size() == cap);
    CHECK(stats.truncated == stats.accepted - cap);
  }
}

TEST_CASE("amplify is byte-deterministic per seed") {
  Dataset ds(kSpec);
  Rng rng(9);
  for (int i = 0; i < 60; ++i) {
    const Vec s{rng.uniform(0.0, 0.95), rng.uniform(0.0, 0.2)};
    const Vec a{rng.uniform(-1.0, 1.0), rng.uniform(-0.5, 0.5)};
    ds.append(nav_transition(s, a), Provenance::kReal);
  }
  auto dump = [&](const Dataset& d) {
    std::stringstream ss;
    write_jsonl(d, ss);
    return ss.str();
  };
  const auto a = dump(amplify(ds, nav2d_local_model(), nav_reward(), 300, 2, 3.0, 31));
  const auto b = dump(amplify(ds, nav2d_local_model(), nav_reward(), 300, 2, 3.0, 31));
  CHECK(a == b);
  const auto c = dump(amplify(ds, nav2d_local_model(), nav_reward(), 300, 2, 3.0, 32));
  CHECK(a != c);
}

namespace {

// Generic constant-structure spec: m single-dim state factors, m action
// factors, block-diagonal mask.
FactorSpec generic_spec(std::size_t m) {
  std::vector<Factor> sf, af;
  std::vector<Interval> bounds;
  for (std::size_t i = 0; i < m; ++i) sf.push_back({"s" + std::to_string(i), 1});
  for (std::size_t i = 0; i < m; ++i) af.push_back({"a" + std::to_string(i), 1});
  for (std::size_t i = 0; i < 2 * m; ++i) bounds.push_back({-10, 10});
  return FactorSpec(sf, af, bounds);
}

LocalModel generic_model(std::size_t m) {
  return LocalModel([m](const Vec&, const Vec&) {
    LocalMask mask(2 * m, m);
    for (std::size_t i = 0; i < m; ++i) {
      mask.set(i, i, true);
      mask.set(m + i, i, true);
    }
    return mask;
  });
}

Dataset generic_dataset(std::size_t n, std::size_t m, std::uint64_t seed) {
  Dataset ds(generic_spec(m));
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    Transition t;
    for (std::size_t d = 0; d < m; ++d) {
      t.s.push_back(rng.uniform(-1, 1));
      t.a.push_back(rng.uniform(-1, 1));
      t.s_next.push_back(rng.uniform(-1, 1));
    }
    t.r = 0.0;
    ds.append(t, Provenance::kReal);
  }
  return ds;
}

}  // namespace

TEST_CASE("enumerate_proposals: n sources, m components -> n^m") {
  CHECK(enumerate_proposals(generic_dataset(5, 2, 1), generic_model(2)) == 25);
  CHECK(enumerate_proposals(generic_dataset(1, 2, 2), generic_model(2)) == 1);
  CHECK(enumerate_proposals(generic_dataset(3, 3, 3), generic_model(3)) == 27);
}

TEST_CASE("enumerate_proposals stratifies heterogeneous structures") {
  // 3 transitions under the block mask plus 2 under an all-ones mask:
  // strata counted separately (3^2 + 2) and totalled.
  const FactorSpec spec = generic_spec(2);
  Dataset ds = generic_dataset(3, 2, 4);
  Rng rng(5);
  for (int i = 0; i < 2; ++i) {
    Transition t;
    for (std::size_t d = 0; d < 2; ++d) {
      t.s.push_back(rng.uniform(2, 3));  // sentinel region: x >= 2
      t.a.push_back(rng.uniform(-1, 1));
      t.s_next.push_back(rng.uniform(-1, 1));
    }
    ds.append(t, Provenance::kReal);
  }
  LocalModel model([&](const Vec& s, const Vec&) {
    LocalMask mask(4, 2);
    if (s[0] >= 2.0) return LocalMask(4, 2, 1);
    mask.set(0, 0, true);
    mask.set(1, 1, true);
    mask.set(2, 0, true);
    mask.set(3, 1, true);
    return mask;
  });
  CHECK(enumerate_proposals(ds, model) == 9 + 2);
}

TEST_CASE("icy rooms: naive mask check accepts invalid cross-room swaps, full check rejects") {
  const IcyRoomsConfig icy_cfg;
  const FactorSpec spec = icy_rooms_spec();
  auto make = [&](const Vec& s, const Vec& a) {
    return Transition{s, a, icy_rooms_step(s, a, icy_cfg), -1.0};
  };
  auto oracle_valid = [&](const Transition& t) {
    return icy_rooms_step(t.s, t.a, icy_cfg) == t.s_next;
  };

  const LocalModel naive = icy_rooms_naive_model();
  const LocalModel full = icy_rooms_full_model();

  Rng rng(13);
  std::size_t naive_accepted_invalid = 0;
  std::size_t full_accepted_invalid = 0;
  std::size_t full_cross_room_accepts = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Transition t1 = make({rng.uniform(0.05, 0.45), rng.uniform(0.1, 0.9)},
                               {rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const Transition t2 = make({rng.uniform(0.55, 0.95), rng.uniform(0.1, 0.9)},
                               {rng.uniform(-1, 1), rng.uniform(-1, 1)});
    for (const auto& p : coda_swap_all(t1, t2, naive, spec)) {
      if (p.accepted && !oracle_valid(p.result)) ++naive_accepted_invalid;
    }
    for (const auto& p : coda_swap_all(t1, t2, full, spec)) {
      ++full_cross_room_accepts;
      if (p.accepted && !oracle_valid(p.result)) ++full_accepted_invalid;
    }
  }
  CHECK(naive_accepted_invalid > 0);
  CHECK(full_accepted_invalid == 0);
  CHECK(full_cross_room_accepts == 0);  // cross-room pairs share no valid set

  // within-room swaps are valid under both models
  const Transition a = make({0.1, 0.2}, {0.5, 0.5});
  const Transition b = make({0.3, 0.7}, {-0.5, 0.2});
  for (const LocalModel* model : {&naive, &full}) {
    const auto proposals = coda_swap_all(a, b, *model, spec);
    REQUIRE(!proposals.empty());
    for (const auto& p : proposals) {
      REQUIRE(p.accepted);
      CHECK(oracle_valid(p.result));
    }
  }
}
