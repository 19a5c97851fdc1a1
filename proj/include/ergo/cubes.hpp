#pragma once

// Host cube measures on X^{[k]} = X^{2^k}, tensor integration, face
// transformations, Host seminorms, the cube (magic) extension and magic tests.
//
// Cube coordinates: vertex ε = (ε_1..ε_k) in {0,1}^k sits at tuple position
// Σ ε_i 2^{i-1}, so the measure built from μ_{T_1..T_{k-1}} for ε_k = 0 fills
// the first half of each tuple and the copy for ε_k = 1 the second half.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ergo/core.hpp"
#include "ergo/sigma.hpp"

namespace ergo {

struct CubeIndex {
  unsigned dim = 0;
  std::uint32_t bits = 0;  // bit i-1 holds ε_i

  static CubeIndex all_ones(unsigned dim) { return {dim, (std::uint32_t{1} << dim) - 1}; }
  /// "101" means ε_1 = 1, ε_2 = 0, ε_3 = 1.
  static CubeIndex parse(std::string_view text);

  bool bit(unsigned i) const { return (bits >> i) & 1u; }
  unsigned weight() const { return static_cast<unsigned>(__builtin_popcount(bits)); }
  bool leq(const CubeIndex& other) const { return (bits & ~other.bits) == 0; }
  CubeIndex meet(const CubeIndex& other) const { return {dim, bits & other.bits}; }
  std::size_t position() const { return bits; }
  std::string to_string() const;

  bool operator==(const CubeIndex&) const = default;
};

/// A probability measure on a finite product X^arity, stored as its support.
/// Rows are unique and sorted lexicographically; masses are positive.
template <class S>
class SparseJoining {
 public:
  SparseJoining() = default;

  /// Sorts rows, merges duplicate tuples and drops zero masses.
  static SparseJoining from_rows(std::size_t arity, std::size_t base_points, std::vector<Point> coords,
                                 std::vector<S> masses);

  std::size_t arity() const noexcept { return arity_; }
  std::size_t base_points() const noexcept { return base_points_; }
  std::size_t size() const noexcept { return masses_.size(); }

  std::span<const Point> tuple(std::size_t row) const { return {coords_.data() + row * arity_, arity_}; }
  const S& mass(std::size_t row) const { return masses_[row]; }
  const std::vector<S>& masses() const noexcept { return masses_; }
  const std::vector<Point>& coords() const noexcept { return coords_; }

  /// Rows whose first coordinate equals p form the range [first, second).
  std::pair<std::size_t, std::size_t> rows_with_first(Point p) const {
    return {first_offsets_[p], first_offsets_[p + 1]};
  }
  std::optional<std::size_t> find(std::span<const Point> tuple) const;

  std::vector<S> marginal(std::size_t coord) const;
  SparseJoining project(std::span<const std::size_t> coords) const;
  S total_mass() const;

  /// Overwrites one mass (fault-injection fixtures only; breaks normalization).
  void set_mass(std::size_t row, S value) { masses_[row] = std::move(value); }

  bool operator==(const SparseJoining& other) const {
    return arity_ == other.arity_ && base_points_ == other.base_points_ && coords_ == other.coords_ &&
           masses_ == other.masses_;
  }

 private:
  std::size_t arity_ = 0;
  std::size_t base_points_ = 0;
  std::vector<Point> coords_;
  std::vector<S> masses_;
  std::vector<std::size_t> first_offsets_;
};

/// Same support and masses within tolerance (exact in rational mode).
template <class S>
bool joinings_match(const SparseJoining<S>& a, const SparseJoining<S>& b, double tol = kFloatTolerance);

/// Largest absolute mass difference over the union of supports.
template <class S>
double joining_distance(const SparseJoining<S>& a, const SparseJoining<S>& b);

/// Mixture Σ w_i j_i of joinings with a common arity.
template <class S>
SparseJoining<S> mixture(std::span<const SparseJoining<S>> parts, std::span<const S> weights);

/// One permutation of the base points per coordinate.
using TupleMap = std::vector<Permutation>;

TupleMap diagonal_map(std::size_t arity, const Permutation& t);
/// (a ∘ b) coordinatewise.
TupleMap compose_maps(const TupleMap& a, const TupleMap& b);
/// Applies T on the coordinates with ε_axis = side (axis is 0-based, < k).
/// Errors: AxisOutOfRange.
TupleMap face_transformation(std::size_t k, std::size_t axis, int side, const Permutation& t);

template <class S>
SparseJoining<S> pushforward(const SparseJoining<S>& j, const TupleMap& map);

struct TransformRef {
  std::size_t axis = 0;
  bool inverse = false;
  bool operator==(const TransformRef&) const = default;
};

std::vector<TransformRef> transform_refs(std::span<const std::size_t> axes);

template <class S>
const Permutation& resolve(const FiniteSystem<S>& sys, const TransformRef& ref) {
  return ref.inverse ? sys.inverse(ref.axis) : sys.transform(ref.axis);
}

/// μ itself as an arity-1 joining on the support.
template <class S>
SparseJoining<S> base_joining(const FiniteSystem<S>& sys);

/// j ×_P j: mass(u,v) = j(u) j(v) / j(A) for rows u, v in a common atom A of
/// `p` (a partition of the rows of j). Errors: SupportExplosion, ZeroMassAtom.
template <class S>
SparseJoining<S> relatively_independent_product(const SparseJoining<S>& j, const Partition& p,
                                                 std::size_t cap = Limits{}.max_support);

/// μ_{T_1..T_k} by iterated relatively independent products over the orbits
/// of the diagonal T_r^{[r-1]} on the previous support. As a measure it
/// depends on the order of `ts`; the seminorm value does not.
/// Well defined for non-ergodic systems too (callers may warn, see is_ergodic).
/// Errors: EmptySubset, AxisOutOfRange, SupportExplosion.
template <class S>
SparseJoining<S> host_measure(const FiniteSystem<S>& sys, std::span<const TransformRef> ts,
                              std::size_t cap = Limits{}.max_support);

/// Σ_rows mass · Π_ε f_ε(x_ε). A null entry stands for the constant 1.
/// Errors: ArityMismatch.
template <class S>
S integrate_tensor(const SparseJoining<S>& j, std::span<const Observable<S>* const> fs);

template <class S>
S integrate_tensor(const SparseJoining<S>& j, std::span<const Observable<S>> fs);

/// ∫ f ⊗ f ⊗ ... ⊗ f.
template <class S>
S integrate_uniform(const SparseJoining<S>& j, const Observable<S>& f);

/// The pre-root integral |||f|||^{2^k}; float values within -1e-12 of zero are clamped.
template <class S>
S seminorm_power(const SparseJoining<S>& cube, const Observable<S>& f);

template <class S>
S seminorm_power(const FiniteSystem<S>& sys, const Observable<S>& f, std::span<const TransformRef> ts,
                 std::size_t cap = Limits{}.max_support);

/// power^{1/2^k}.
template <class S>
double seminorm_from_power(const S& power, std::size_t k);

template <class S>
double host_seminorm(const FiniteSystem<S>& sys, const Observable<S>& f, std::span<const TransformRef> ts,
                     std::size_t cap = Limits{}.max_support);

/// Pre-root zero test: exact in rational mode, against 1e-12 in float mode.
template <class S>
bool seminorm_power_is_zero(const S& power);

template <class S>
struct CubeExtension {
  FiniteSystem<S> system;
  SparseJoining<S> measure;
  std::vector<Point> factor_map;  // extension point -> last (all-ones) coordinate
  std::vector<std::size_t> axes;
};

/// Points are the support tuples of μ_{T_a1..T_ak}, weighted by it. Generator
/// a_r acts by the upper face map F_r^1; every other generator b acts by the
/// diagonal T_b^{[k]}, so generator indices match the base system.
template <class S>
CubeExtension<S> cube_extension(const FiniteSystem<S>& sys, std::span<const std::size_t> axes,
                                 std::size_t cap = Limits{}.max_support);

template <class S>
struct MagicResult {
  bool magic = true;
  std::optional<Observable<S>> witness;
  S witness_power = 0;
  Partition z;
  std::size_t basis_size = 0;
};

/// Basis of ker E(·|Z): for each atom (a_1 < ... < a_r) and j ≥ 2, the
/// vector with w(a_j) at a_1 and -w(a_1) at a_j, scaled to sup-norm 1.
template <class S>
std::vector<Observable<S>> kernel_basis(const FiniteSystem<S>& sys, const Partition& z);

/// Z = ∨ I_{T_a}; {f : |||f||| = 0} is a linear subspace, so the system is magic
/// iff every kernel basis vector has zero pre-root integral. On failure the
/// first offending basis vector is returned as witness.
template <class S>
MagicResult<S> is_magic(const FiniteSystem<S>& sys, std::span<const std::size_t> axes,
                        std::size_t cap = Limits{}.max_support);

/// Header line "# joining arity=A points=M rows=N", then one row per line:
/// coordinates followed by the mass ("p/q" in rational mode).
template <class S>
void write_joining(std::ostream& os, const SparseJoining<S>& j);

/// Errors: ParseError with line/column.
template <class S>
SparseJoining<S> read_joining(std::istream& is);

}  // namespace ergo
