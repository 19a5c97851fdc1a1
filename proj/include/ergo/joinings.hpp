#pragma once

// Furstenberg self-joinings of X^d, their pointwise components, and
// disintegration / ergodicity of joinings.

#include <cstddef>
#include <span>
#include <vector>

#include "ergo/core.hpp"
#include "ergo/cubes.hpp"
#include "ergo/sigma.hpp"

namespace ergo {

/// R = T_1 × ... × T_d as a tuple map on X^d.
template <class S>
TupleMap product_map(const FiniteSystem<S>& sys);

/// Generators of H_d: R followed by the diagonals T_i × ... × T_i.
template <class S>
std::vector<TupleMap> furstenberg_group(const FiniteSystem<S>& sys);

/// μ^F_x: uniform on the R-orbit of (x, ..., x). Errors: ZeroMassPoint.
template <class S>
SparseJoining<S> pointwise_joining(const FiniteSystem<S>& sys, Point x);

/// x ↦ μ^F_x over the support. Points whose diagonals lie on a common R-orbit
/// share one stored measure.
template <class S>
struct PointwiseFamily {
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> key_of;  // point -> index into measures, kNone off the support
  std::vector<SparseJoining<S>> measures;
  std::vector<S> key_weights;  // μ of the points sharing each measure

  const SparseJoining<S>& at(Point x) const { return measures[key_of[x]]; }
};

template <class S>
PointwiseFamily<S> pointwise_family(const FiniteSystem<S>& sys, std::size_t cap = Limits{}.max_support);

/// μ^F = Σ_x μ(x) μ^F_x. Errors: SupportExplosion.
template <class S>
SparseJoining<S> furstenberg_joining(const FiniteSystem<S>& sys, std::size_t cap = Limits{}.max_support);

/// (X, T_1^{-1}T_2, ..., T_1^{-1}T_d); needs d ≥ 2.
template <class S>
FiniteSystem<S> relative_system(const FiniteSystem<S>& sys);

template <class S>
struct Disintegration {
  std::vector<Point> atom;  // rows of the disintegrated joining
  SparseJoining<S> conditional;
  S mass;
};

/// Normalized restrictions of j to the atoms of a partition of its rows.
/// Errors: SupportMismatch.
template <class S>
std::vector<Disintegration<S>> disintegrate(const SparseJoining<S>& j, const Partition& p);

/// Orbits on the rows of j of the group generated by `maps` (each must map
/// the support onto itself). Errors: NotInvariant.
template <class S>
Partition support_orbits(const SparseJoining<S>& j, std::span<const TupleMap> maps);

/// Every map preserves j, and together they act on its support with one orbit.
/// Errors: NotInvariant (a map moves the measure).
template <class S>
bool joining_ergodicity(const SparseJoining<S>& j, std::span<const TupleMap> maps);

}  // namespace ergo
