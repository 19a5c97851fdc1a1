#include <random>

#include "doctest.h"
#include "ergo/errors.hpp"
#include "ergo/sigma.hpp"
#include "fixtures.hpp"

using namespace ergo;
using fx::Q;

namespace {

std::vector<std::vector<Point>> atoms_of(const Partition& p) { return p.atoms(); }

}  // namespace

TEST_CASE("invariant_partition examples") {
  std::vector<std::size_t> one{0};
  CHECK(atoms_of(invariant_partition(fx::e1(), one)) == std::vector<std::vector<Point>>{{0, 1}});
  auto half = uniform_system<Q>(4, {oracle::shift(4, 2)});
  CHECK(atoms_of(invariant_partition(half, one)) == std::vector<std::vector<Point>>{{0, 2}, {1, 3}});
  auto id = uniform_system<Q>(3, {identity_permutation(3)});
  CHECK(invariant_partition(id, one).atom_count() == 3);
  std::vector<std::size_t> none;
  CHECK_THROWS_AS(invariant_partition(id, none), Error);
}

TEST_CASE("invariant_partition matches brute orbits") {
  std::mt19937_64 rng(21);
  for (int it = 0; it < 30; ++it) {
    std::size_t m = 2 + rng() % 11, d = 1 + rng() % 3;
    auto sys = oracle::random_power_system(rng, m, d);
    auto axes = all_axes(d);
    auto p = invariant_partition(sys, axes);
    std::set<oracle::Tuple> pts;
    for (Point x = 0; x < m; ++x) pts.insert({x});
    std::vector<std::vector<Permutation>> maps;
    for (const auto& t : sys.transforms()) maps.push_back({t});
    auto brute = oracle::orbits(pts, maps);
    CHECK(brute.size() == p.atom_count());
    for (const auto& atom : brute) {
      std::size_t id = p.atom_of((*atom.begin())[0]);
      for (const auto& u : atom) CHECK(p.atom_of(u[0]) == id);
    }
  }
}

TEST_CASE("join_partitions examples") {
  std::vector<Point> all{0, 1, 2, 3};
  auto full = Partition::single_atom(4, all);
  auto parity = Partition::from_atoms(4, {{0, 2}, {1, 3}});
  auto halves = Partition::from_atoms(4, {{0, 1}, {2, 3}});
  CHECK(join_partitions(full, parity) == parity);
  CHECK(join_partitions(halves, parity).atom_count() == 4);
  CHECK(join_partitions(parity, parity) == parity);
  std::vector<Point> some{0, 1};
  CHECK_THROWS_AS(join_partitions(full, Partition::single_atom(4, some)), Error);
}

TEST_CASE("partition construction rejects overlap") {
  CHECK_THROWS_AS(Partition::from_atoms(3, {{0, 1}, {1, 2}}), Error);
  CHECK_THROWS_AS(Partition::from_atoms(3, {{0, 5}}), Error);
}

TEST_CASE("cond_expectation examples") {
  std::vector<std::size_t> one{0};
  auto e1 = fx::e1();
  auto e = cond_expectation(e1, Observable<Q>{Q(1), Q(-1)}, invariant_partition(e1, one));
  CHECK(e == Observable<Q>{Q(0), Q(0)});
  auto z4 = uniform_system<Q>(4, {oracle::shift(4, 1)});
  auto parity = Partition::from_atoms(4, {{0, 2}, {1, 3}});
  CHECK(cond_expectation(z4, fx::e3_witness(), parity) == Observable<Q>::constant(4, Q(0)));
  Observable<Q> f{Q(3), Q(1), Q(4), Q(1)};
  std::vector<Point> all{0, 1, 2, 3};
  CHECK(cond_expectation(z4, f, Partition::singletons(4, all)) == f);
}

TEST_CASE("cond_expectation matches the definition on weighted systems") {
  std::mt19937_64 rng(8);
  for (int it = 0; it < 25; ++it) {
    std::size_t m = 2 + rng() % 9, d = 1 + rng() % 2;
    auto sys = oracle::random_power_system(rng, m, d);
    auto f = oracle::random_observable(rng, m);
    std::vector<std::size_t> ax{0};
    auto mine = cond_expectation(sys, f, invariant_partition(sys, ax));
    CHECK(mine == oracle::cond_exp(sys, f, {sys.transform(0)}));
  }
}

TEST_CASE("ergodic_decomposition examples") {
  std::vector<std::size_t> one{0}, both{0, 1};
  auto half = uniform_system<Q>(4, {oracle::shift(4, 2)});
  auto comps = ergodic_decomposition(half, one);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].weight == Q(1, 2));
  CHECK(comps[0].orbit == std::vector<Point>{0, 2});
  CHECK(comps[0].measure == std::vector<Q>{Q(1, 2), Q(0), Q(1, 2), Q(0)});
  auto e3 = fx::e3();
  auto single = ergodic_decomposition(e3, both);
  REQUIRE(single.size() == 1);
  CHECK(single[0].measure == e3.weights());
  CHECK(is_ergodic(e3, both));
  CHECK_FALSE(is_ergodic(half, one));
  // (Z/2)^2 with T adding 1 on the first coordinate; point (a,b) = 2a + b
  auto sq = uniform_system<Q>(4, {{2, 3, 0, 1}});
  auto c2 = ergodic_decomposition(sq, one);
  REQUIRE(c2.size() == 2);
  CHECK(c2[0].orbit == std::vector<Point>{0, 2});
  CHECK(c2[1].orbit == std::vector<Point>{1, 3});
}

TEST_CASE("quotient_system examples") {
  auto z4 = uniform_system<Q>(4, {oracle::shift(4, 1)});
  auto q = quotient_system(z4, Partition::from_atoms(4, {{0, 2}, {1, 3}}));
  CHECK(q.system.size() == 2);
  CHECK(q.system.transform(0) == Permutation{1, 0});
  CHECK(q.system.weight(0) == Q(1, 2));
  CHECK(q.factor_map == std::vector<Point>{0, 1, 0, 1});
  std::vector<Point> all{0, 1, 2, 3};
  auto same = quotient_system(z4, Partition::singletons(4, all));
  CHECK(same.system.transforms() == z4.transforms());
  auto one = quotient_system(z4, Partition::single_atom(4, all));
  CHECK(one.system.size() == 1);
  CHECK_THROWS_AS(quotient_system(z4, Partition::from_atoms(4, {{0, 1}, {2, 3}})), Error);
  auto g = Observable<Q>{Q(5), Q(7)};
  CHECK(pull_back(q, g) == Observable<Q>{Q(5), Q(7), Q(5), Q(7)});
}

TEST_CASE("disjoint set") {
  DisjointSet ds(5);
  ds.unite(0, 3);
  ds.unite(3, 4);
  CHECK(ds.find(0) == ds.find(4));
  CHECK(ds.find(1) != ds.find(0));
}
