#include <random>

#include "doctest.h"
#include "ergo/errors.hpp"
#include "ergo/joinings.hpp"
#include "fixtures.hpp"

using namespace ergo;
using fx::Q;

TEST_CASE("furstenberg joining examples") {
  auto id = uniform_system<Q>(3, {identity_permutation(3), identity_permutation(3)});
  auto diag = furstenberg_joining(id);
  CHECK(diag.size() == 3);
  for (std::size_t r = 0; r < 3; ++r) CHECK(diag.tuple(r)[0] == diag.tuple(r)[1]);
  auto same = uniform_system<Q>(5, {oracle::shift(5, 2), oracle::shift(5, 2)});
  auto sj = furstenberg_joining(same);
  CHECK(sj.size() == 5);
  auto e4 = furstenberg_joining(fx::e4());
  CHECK(e4.size() == 8);
  for (std::size_t r = 0; r < e4.size(); ++r) {
    CHECK(e4.mass(r) == Q(1, 8));
    CHECK((e4.tuple(r)[1] + 4 - e4.tuple(r)[0]) % 2 == 0);
  }
}

TEST_CASE("pointwise joining examples") {
  auto p = pointwise_joining(fx::e4(), 0);
  CHECK(oracle::to_map(p) == oracle::Measure{{{0, 0}, Q(1, 4)}, {{1, 3}, Q(1, 4)}, {{2, 2}, Q(1, 4)}, {{3, 1}, Q(1, 4)}});
  auto id = uniform_system<Q>(3, {identity_permutation(3), identity_permutation(3)});
  auto pm = pointwise_joining(id, 1);
  REQUIRE(pm.size() == 1);
  CHECK(pm.tuple(0)[0] == 1);
  auto nul = validate_system<Q>(2, {Q(1), Q(0)}, {{0, 1}});
  CHECK_THROWS_AS(pointwise_joining(nul, 1), Error);
}

TEST_CASE("joinings match the orbit-average oracle") {
  std::mt19937_64 rng(31);
  for (int it = 0; it < 40; ++it) {
    std::size_t m = 2 + rng() % 11, d = 1 + rng() % 3;
    auto sys = oracle::random_power_system(rng, m, d);
    CHECK(oracle::to_map(furstenberg_joining(sys)) == oracle::furstenberg(sys));
    auto fam = pointwise_family(sys);
    for (Point x : sys.support()) {
      CHECK(oracle::to_map(pointwise_joining(sys, x)) == oracle::pointwise(sys, x));
      CHECK(fam.at(x) == pointwise_joining(sys, x));
    }
  }
}

TEST_CASE("H_d invariance and projection") {
  std::mt19937_64 rng(2);
  for (int it = 0; it < 20; ++it) {
    std::size_t m = 2 + rng() % 9, d = 2 + rng() % 2;
    auto sys = oracle::random_power_system(rng, m, d);
    auto j = furstenberg_joining(sys);
    for (const auto& g : furstenberg_group(sys)) CHECK(pushforward(j, g) == j);
    std::vector<std::size_t> tail(d - 1);
    std::iota(tail.begin(), tail.end(), std::size_t{1});
    CHECK(j.project(tail) == furstenberg_joining(relative_system(sys)));
  }
  CHECK_THROWS_AS(relative_system(fx::e1()), Error);
}

TEST_CASE("disintegration examples") {
  auto diag = SparseJoining<Q>::from_rows(2, 2, {0, 0, 1, 1}, {Q(1, 2), Q(1, 2)});
  auto parts = disintegrate(diag, Partition::from_atoms(2, {{0}, {1}}));
  REQUIRE(parts.size() == 2);
  CHECK(parts[0].mass == Q(1, 2));
  CHECK(parts[0].conditional.size() == 1);
  std::vector<Point> rows{0, 1};
  auto whole = disintegrate(diag, Partition::single_atom(2, rows));
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].conditional == diag);

  auto sys = fx::e4();
  auto j = furstenberg_joining(sys);
  std::vector<TupleMap> r{product_map(sys)};
  auto orbits = support_orbits(j, r);
  for (const auto& part : disintegrate(j, orbits)) {
    Point x = part.conditional.tuple(0)[0];
    bool found = false;
    for (Point y : sys.support())
      if (pointwise_joining(sys, y) == part.conditional) found = true;
    CHECK(found);
    (void)x;
  }
}

TEST_CASE("joining ergodicity examples") {
  auto sys = fx::e4();
  std::vector<TupleMap> r{product_map(sys)};
  CHECK(joining_ergodicity(pointwise_joining(sys, 0), r));
  auto e1 = fx::e1();
  auto prod = SparseJoining<Q>::from_rows(2, 2, {0, 0, 0, 1, 1, 0, 1, 1}, {Q(1, 4), Q(1, 4), Q(1, 4), Q(1, 4)});
  std::vector<TupleMap> tt{diagonal_map(2, e1.transform(0))};
  CHECK_FALSE(joining_ergodicity(prod, tt));
  auto point = SparseJoining<Q>::from_rows(2, 2, {1, 0}, {Q(1)});
  std::vector<TupleMap> idm{diagonal_map(2, identity_permutation(2))};
  CHECK(joining_ergodicity(point, idm));
  std::vector<TupleMap> moving{diagonal_map(2, e1.transform(0))};
  CHECK_THROWS_AS(joining_ergodicity(point, moving), Error);
}
