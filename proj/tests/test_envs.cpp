#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coda/core/io.hpp"
#include "coda/envs/chainworld.hpp"
#include "coda/envs/icy_rooms.hpp"
#include "coda/envs/nav2d.hpp"

using namespace coda;

TEST_CASE("nav2d_step: decoupled region moves one coordinate per sub-action") {
  const Nav2dConfig cfg;
  const auto res = nav2d_step({0.2, 0.2}, {1.0, 0.0}, cfg);
  CHECK(res.s_next[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(res.s_next[1] == 0.2);
  CHECK(res.r == -1.0);
}

TEST_CASE("nav2d_step: coupled quadrant mixes the sub-actions") {
  const Nav2dConfig cfg;
  const auto res = nav2d_step({0.8, 0.8}, {1.0, 0.0}, cfg);
  CHECK(res.s_next[0] == doctest::Approx(0.83).epsilon(1e-13));
  CHECK(res.s_next[1] == doctest::Approx(0.82).epsilon(1e-13));
}

TEST_CASE("nav2d_step: reward is 0 within the goal radius") {
  Nav2dConfig cfg;
  const auto res = nav2d_step({0.85, 0.85}, {1.0, 1.0}, cfg);
  const double dx = res.s_next[0] - cfg.goal[0];
  const double dy = res.s_next[1] - cfg.goal[1];
  REQUIRE(std::sqrt(dx * dx + dy * dy) <= cfg.goal_radius);
  CHECK(res.r == 0.0);
  CHECK(res.at_goal);
}

TEST_CASE("nav2d_step rejects out-of-box inputs") {
  const Nav2dConfig cfg;
  CHECK_THROWS_AS(nav2d_step({1.2, 0.2}, {0.0, 0.0}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(nav2d_step({0.2, 0.2}, {1.5, 0.0}, cfg), std::invalid_argument);
}

TEST_CASE("nav2d_mask: base, quadrant, and boundary") {
  CHECK(nav2d_mask({0.2, 0.3}, {0, 0}) ==
        LocalMask::from_rows({{1, 0}, {0, 1}, {1, 0}, {0, 1}}));
  CHECK(nav2d_mask({0.6, 0.7}, {0, 0}) == LocalMask(4, 2, 1));
  // strict inequality per the reference behavior
  CHECK(nav2d_mask({0.5, 0.5}, {0, 0}) ==
        LocalMask::from_rows({{1, 0}, {0, 1}, {1, 0}, {0, 1}}));
}

TEST_CASE("gen_emp_data: sizes, bands, and the empty center") {
  const Nav2dConfig cfg;
  const Dataset ds = gen_emp_data(20000, 42, cfg);
  REQUIRE(ds.size() == 40000);

  std::size_t center = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Transition& t = ds[i];
    const bool bottom = t.s[1] <= cfg.band_height && t.s_next[1] <= cfg.band_height;
    const bool right = t.s[0] >= 1.0 - cfg.band_width && t.s_next[0] >= 1.0 - cfg.band_width;
    // generation order: first the left-to-right kind, then bottom-to-top
    if (i < 20000) {
      REQUIRE(bottom);
    } else {
      REQUIRE(right);
    }
    auto in_center_offband = [&](double x, double y) {
      return x > 0.3 && x < 0.7 && y > 0.3 && y < 0.7;
    };
    center += in_center_offband(t.s[0], t.s[1]);
    center += in_center_offband(t.s_next[0], t.s_next[1]);
  }
  CHECK(center == 0);
}

TEST_CASE("gen_emp_data is deterministic per seed") {
  const Nav2dConfig cfg;
  const Dataset a = gen_emp_data(500, 7, cfg);
  const Dataset b = gen_emp_data(500, 7, cfg);
  CHECK(a.transitions() == b.transitions());
  const Dataset c = gen_emp_data(500, 8, cfg);
  CHECK(a.transitions() != c.transitions());
}

TEST_CASE("gen_emp_data covers the quadrant through the right band") {
  const Dataset ds = gen_emp_data(2000, 3, Nav2dConfig{});
  std::size_t quadrant = 0;
  for (const auto& t : ds.transitions()) quadrant += (t.s[0] > 0.5 && t.s[1] > 0.5);
  CHECK(quadrant > 200);
}

TEST_CASE("chainworld: deterministic tables reproduce exactly") {
  ChainworldConfig cfg;
  cfg.alphabets = {2, 2};
  cfg.action_alphabet = 2;
  // child value flips iff action == 1
  for (std::size_t i = 0; i < 2; ++i) {
    std::vector<std::vector<double>> table;
    for (std::size_t v = 0; v < 2; ++v) {
      for (std::size_t a = 0; a < 2; ++a) {
        std::vector<double> row(2, 0.0);
        row[a == 1 ? 1 - v : v] = 1.0;
        table.push_back(row);
      }
    }
    cfg.tables.push_back(table);
  }
  cfg.validate();
  const Dataset ds = chainworld_sample(cfg, 64, true, 5);
  for (const auto& t : ds.transitions()) {
    for (std::size_t i = 0; i < 2; ++i) {
      const double want = t.a[0] == 1.0 ? 1.0 - t.s[i] : t.s[i];
      CHECK(t.s_next[i] == want);
    }
  }
}

TEST_CASE("chainworld joint law is the product of the factor tables") {
  const ChainworldConfig cfg = make_chainworld({2, 3}, 2, 11);
  const Vec s{1.0, 2.0};
  const Vec a{1.0};
  const auto joint = chainworld_true_joint(cfg, s, a);
  REQUIRE(joint.size() == 6);
  double total = 0.0;
  for (std::size_t code = 0; code < joint.size(); ++code) {
    const Vec next = chainworld_decode_state(cfg, code);
    const double want = cfg.tables[0][1 * 2 + 1][static_cast<std::size_t>(next[0])] *
                        cfg.tables[1][2 * 2 + 1][static_cast<std::size_t>(next[1])];
    CHECK(joint[code] == doctest::Approx(want).epsilon(1e-12));
    total += joint[code];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("chainworld even allocation visits every (s,a) evenly") {
  const ChainworldConfig cfg = make_chainworld({2, 2}, 2, 1);
  const std::size_t joint = chainworld_state_count(cfg) * cfg.action_alphabet;
  const Dataset ds = chainworld_sample(cfg, joint * 5, true, 2);
  std::vector<int> visits(joint, 0);
  for (const auto& t : ds.transitions()) {
    ++visits[chainworld_encode_state(cfg, t.s) * cfg.action_alphabet +
             static_cast<std::size_t>(t.a[0])];
  }
  for (int v : visits) CHECK(v == 5);
}

TEST_CASE("icy rooms: same offset and action, different displacement") {
  const IcyRoomsConfig cfg;
  const Vec a{1.0, 0.5};
  const Vec n0 = icy_rooms_step({0.2, 0.4}, a, cfg);
  const Vec n1 = icy_rooms_step({0.7, 0.4}, a, cfg);
  CHECK(n0[0] - 0.2 == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(n1[0] - 0.7 == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(n0[1] - 0.4 == doctest::Approx(0.025).epsilon(1e-12));
  CHECK(n1[1] - 0.4 == doctest::Approx(0.075).epsilon(1e-12));
  CHECK(icy_rooms_mask({0.2, 0.4}, a) == icy_rooms_mask({0.7, 0.4}, a));
}
