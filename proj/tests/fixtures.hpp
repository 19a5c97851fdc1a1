#pragma once

#include "ergo/core.hpp"
#include "oracles.hpp"

namespace fx {

using Q = ergo::Rational;
using ergo::Observable;
using ergo::Permutation;

inline ergo::FiniteSystem<Q> e1() { return ergo::uniform_system<Q>(2, {{1, 0}}); }
inline ergo::FiniteSystem<Q> e3() { return ergo::uniform_system<Q>(4, {oracle::shift(4, 1), oracle::shift(4, 2)}); }
inline ergo::FiniteSystem<Q> e4() { return ergo::uniform_system<Q>(4, {oracle::shift(4, 1), oracle::shift(4, 3)}); }

template <class S>
ergo::FiniteSystem<S> e3_as() {
  return ergo::uniform_system<S>(4, {oracle::shift(4, 1), oracle::shift(4, 2)});
}

inline Observable<Q> e3_witness() { return Observable<Q>{Q(1), Q(0), Q(-1), Q(0)}; }

}  // namespace fx
