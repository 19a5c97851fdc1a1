#pragma once

// Finite invariant sigma-algebras as partitions of the positive-mass support.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ergo/core.hpp"

namespace ergo {

/// Union-find with path halving and union by size.
class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n);

  std::size_t find(std::size_t x);
  void unite(std::size_t a, std::size_t b);

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

/// Disjoint nonempty atoms over a subset (the covered set) of {0..universe-1}.
/// Stored canonically: elements sorted within atoms, atoms sorted by their
/// smallest element, so equal partitions compare equal.
class Partition {
 public:
  static constexpr std::size_t kNoAtom = static_cast<std::size_t>(-1);

  Partition() = default;
  /// Throws InvalidArgument if atoms overlap, are empty, or leave the universe.
  static Partition from_atoms(std::size_t universe, std::vector<std::vector<Point>> atoms);
  static Partition singletons(std::size_t universe, std::span<const Point> covered);
  static Partition single_atom(std::size_t universe, std::span<const Point> covered);

  std::size_t universe() const noexcept { return atom_of_.size(); }
  std::size_t atom_count() const noexcept { return atoms_.size(); }
  const std::vector<std::vector<Point>>& atoms() const noexcept { return atoms_; }
  const std::vector<Point>& atom(std::size_t id) const { return atoms_[id]; }
  /// kNoAtom for points outside the covered set.
  std::size_t atom_of(Point x) const { return atom_of_[x]; }
  bool covers(Point x) const { return atom_of_[x] != kNoAtom; }

  /// Every atom of *this is contained in an atom of `coarser`.
  bool refines(const Partition& coarser) const;

  bool operator==(const Partition& other) const { return atoms_ == other.atoms_ && universe() == other.universe(); }

 private:
  std::vector<std::vector<Point>> atoms_;
  std::vector<std::size_t> atom_of_;
};

/// Orbits of the group generated by `maps` on `covered` (each map must send
/// covered points to covered points).
Partition orbit_partition(std::size_t universe, std::span<const Point> covered, std::span<const Permutation> maps);

/// Orbits of <T_i : i in axes> on the support. Errors: EmptySubset, AxisOutOfRange.
template <class S>
Partition invariant_partition(const FiniteSystem<S>& sys, std::span<const std::size_t> axes);

/// Common refinement. Errors: SupportMismatch.
Partition join_partitions(const Partition& p, const Partition& q);

/// Atom-wise weighted mean over arbitrary masses; points outside the covered
/// set receive 0.
template <class S>
std::vector<S> cond_expectation(std::span<const S> masses, std::span<const S> values, const Partition& p);

template <class S>
Observable<S> cond_expectation(const FiniteSystem<S>& sys, const Observable<S>& f, const Partition& p);

template <class S>
struct ErgodicComponent {
  S weight;
  std::vector<Point> orbit;
  std::vector<S> measure;  // normalized restriction of the weights, length m
};

template <class S>
std::vector<ErgodicComponent<S>> ergodic_decomposition(const FiniteSystem<S>& sys, std::span<const std::size_t> axes);

/// The group generated by the listed generators acts with one orbit on the support.
template <class S>
bool is_ergodic(const FiniteSystem<S>& sys, std::span<const std::size_t> axes);

template <class S>
struct Quotient {
  FiniteSystem<S> system;
  std::vector<Point> factor_map;  // kNoPoint for zero-mass points
};

inline constexpr Point kNoPoint = static_cast<Point>(-1);

/// Factor system whose points are the atoms of an invariant partition.
/// Errors: NotInvariantPartition, SupportMismatch.
template <class S>
Quotient<S> quotient_system(const FiniteSystem<S>& sys, const Partition& p);

/// g ∘ π, with zero on null points.
template <class S>
Observable<S> pull_back(const Quotient<S>& q, const Observable<S>& g);

}  // namespace ergo
