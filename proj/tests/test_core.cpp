#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "coda/core/dataset.hpp"
#include "coda/core/io.hpp"
#include "coda/envs/nav2d.hpp"
#include "coda/util/rng.hpp"

using namespace coda;

namespace {

FactorSpec small_spec() {
  return FactorSpec({{"p", 1}, {"q", 1}}, {{"u", 1}, {"v", 1}},
                    {{0, 1}, {0, 1}, {-1, 1}, {-1, 1}});
}

}  // namespace

TEST_CASE("FactorSpec validates its invariants") {
  CHECK_THROWS_AS(FactorSpec({}, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(FactorSpec({{"a", 1}, {"a", 1}}, {}, {{0, 1}, {0, 1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(FactorSpec({{"a", 1}}, {}, {{1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(FactorSpec({{"a", 1}}, {}, {{0, 1}, {0, 1}}), std::invalid_argument);
  const FactorSpec spec = small_spec();
  CHECK(spec.state_dims() == 2);
  CHECK(spec.action_dims() == 2);
  CHECK(spec.n_factors() == 4);
}

TEST_CASE("make_dataset accepts the smallest well-formed input") {
  const auto ds = make_dataset(small_spec(), {{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, -1.0}});
  CHECK(ds.size() == 1);
  CHECK(ds.provenance()[0] == Provenance::kReal);
  CHECK(ds[0].s == Vec{0.1, 0.2});
  CHECK(ds[0].a == Vec{0.3, 0.4});
  CHECK(ds[0].s_next == Vec{0.5, 0.6});
  CHECK(ds[0].r == -1.0);
}

TEST_CASE("make_dataset rejects a NaN reward naming row 0") {
  const double nan = std::nan("");
  CHECK_THROWS_WITH_AS(
      make_dataset(small_spec(), {{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, nan}}),
      doctest::Contains("row 0"), std::invalid_argument);
}

TEST_CASE("make_dataset rejects a short row naming its index") {
  CHECK_THROWS_WITH_AS(make_dataset(small_spec(), {{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.0},
                                                   {0.1, 0.2, 0.3}}),
                       doctest::Contains("row 1"), std::invalid_argument);
}

TEST_CASE("generated 2D-Nav data builds a 40,000-row dataset") {
  const Dataset ds = gen_emp_data(20000, 9, Nav2dConfig{});
  CHECK(ds.size() == 40000);
  const auto [train, val] = split_train_val(ds, 5000, 1);
  CHECK(train.size() == 35000);
  CHECK(val.size() == 5000);
}

TEST_CASE("split_train_val splits 2 rows into disjoint singletons") {
  const auto ds = make_dataset(small_spec(), {{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.0},
                                              {0.7, 0.8, 0.9, 0.1, 0.2, 0.3, -1.0}});
  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
    const auto [train, val] = split_train_val(ds, 1, seed);
    CHECK(train.size() == 1);
    CHECK(val.size() == 1);
    CHECK(train[0] != val[0]);
  }
}

TEST_CASE("split_train_val is deterministic and partitions the index set") {
  std::vector<Vec> rows;
  for (int i = 0; i < 100; ++i)
    rows.push_back({i * 0.01, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
  const auto ds = make_dataset(small_spec(), rows);

  const auto [t1, v1] = split_train_val(ds, 30, 7);
  const auto [t2, v2] = split_train_val(ds, 30, 7);
  CHECK(t1.transitions() == t2.transitions());
  CHECK(v1.transitions() == v2.transitions());

  std::multiset<double> keys;
  for (const auto& t : t1.transitions()) keys.insert(t.s[0]);
  for (const auto& t : v1.transitions()) keys.insert(t.s[0]);
  std::multiset<double> all;
  for (const auto& r : rows) all.insert(r[0]);
  CHECK(keys == all);

  CHECK_THROWS_AS(split_train_val(ds, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_train_val(ds, 100, 1), std::invalid_argument);
}

TEST_CASE("jsonl round-trip recovers the dataset exactly") {
  Rng rng(13);
  std::vector<Vec> rows;
  for (int i = 0; i < 50; ++i) {
    Vec row;
    for (int j = 0; j < 6; ++j) row.push_back(rng.uniform(-1.0, 1.0));
    row.push_back(i % 2 ? -1.0 : rng.uniform(-1e9, 1e9));
    rows.push_back(row);
  }
  rows.push_back({0.1 + 0.2, 1.0 / 3.0, 5e-324, 0.4, 0.5, 0.6, -0.0});
  FactorSpec spec({{"p", 1}, {"q", 1}}, {{"u", 1}, {"v", 1}},
                  {{-2e9, 2e9}, {-2e9, 2e9}, {-2e9, 2e9}, {-2e9, 2e9}});
  const auto ds = make_dataset(spec, rows);

  std::stringstream ss;
  write_jsonl(ds, ss);
  const Dataset back = read_jsonl(spec, ss);
  REQUIRE(back.size() == ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(back[i] == ds[i]);
    CHECK(back.provenance()[i] == ds.provenance()[i]);
  }
}

TEST_CASE("spec json round-trips") {
  const FactorSpec spec = nav2d_spec();
  const FactorSpec back = spec_from_json(spec_to_json(spec));
  CHECK(back == spec);
}

TEST_CASE("csv export carries the documented header") {
  const auto ds = make_dataset(small_spec(), {{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, -1.0}});
  std::stringstream ss;
  write_csv(ds, ss);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "s0,s1,a0,a1,sp0,sp1,r,tag");
  std::string row;
  std::getline(ss, row);
  CHECK(row.find(",real") != std::string::npos);
}
