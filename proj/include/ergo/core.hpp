#pragma once

// Finite measure-preserving Z^d systems: a probability vector on {0..m-1} and
// d commuting permutations preserving it.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ergo/scalar.hpp"
#include "ergo/tuple_set.hpp"

namespace ergo {

using Permutation = std::vector<Point>;

/// Size caps. Cube measures live on up to m^(2^d) tuples, hence the small
/// defaults for user-supplied systems.
struct Limits {
  std::size_t max_points = 64;
  std::size_t max_generators = 4;
  std::size_t max_support = 5'000'000;
};

struct TransformWord {
  std::vector<std::int64_t> exponents;
};

template <class S>
struct Observable {
  std::vector<S> values;

  Observable() = default;
  explicit Observable(std::vector<S> v) : values(std::move(v)) {}
  Observable(std::initializer_list<S> v) : values(v) {}

  std::size_t size() const noexcept { return values.size(); }
  const S& operator[](Point x) const { return values[x]; }
  S& operator[](Point x) { return values[x]; }
  bool operator==(const Observable&) const = default;

  static Observable constant(std::size_t m, const S& c) { return Observable(std::vector<S>(m, c)); }
  static Observable indicator(std::size_t m, Point x) {
    Observable f = constant(m, S(0));
    f[x] = 1;
    return f;
  }
};

Permutation identity_permutation(std::size_t m);
/// (a ∘ b)(x) = a(b(x)).
Permutation compose(const Permutation& a, const Permutation& b);
Permutation invert(const Permutation& p);
bool is_permutation(const Permutation& p, std::size_t m);

/// Cycle decomposition of one permutation; answers p^n(x) in O(1).
class CycleTable {
 public:
  CycleTable() = default;
  explicit CycleTable(const Permutation& p);

  Point power(Point x, std::int64_t n) const;
  std::size_t cycle_length(Point x) const { return cycle_len_[cycle_of_[x]]; }
  std::size_t cycle_id(Point x) const { return cycle_of_[x]; }

 private:
  std::vector<std::uint32_t> cycle_of_;
  std::vector<std::uint32_t> position_;
  std::vector<std::uint32_t> cycle_start_;
  std::vector<std::uint32_t> cycle_len_;
  std::vector<Point> flat_;
};

template <class S>
class FiniteSystem {
 public:
  /// Validates and builds; see validate_system.
  static FiniteSystem create(std::size_t m, std::vector<S> weights, std::vector<Permutation> transforms,
                             const Limits& limits);

  std::size_t size() const noexcept { return weights_.size(); }
  std::size_t dim() const noexcept { return transforms_.size(); }

  const std::vector<S>& weights() const noexcept { return weights_; }
  const S& weight(Point x) const { return weights_[x]; }

  const Permutation& transform(std::size_t axis) const { return transforms_[axis]; }
  const Permutation& inverse(std::size_t axis) const { return inverses_[axis]; }
  const std::vector<Permutation>& transforms() const noexcept { return transforms_; }
  const CycleTable& cycles(std::size_t axis) const { return cycles_[axis]; }

  Point apply(std::size_t axis, Point x) const { return transforms_[axis][x]; }
  Point apply_power(std::size_t axis, Point x, std::int64_t n) const { return cycles_[axis].power(x, n); }

  /// Positive-mass points in increasing order.
  const std::vector<Point>& support() const noexcept { return support_; }
  bool in_support(Point x) const { return in_support_[x] != 0; }

 private:
  FiniteSystem() = default;

  std::vector<S> weights_;
  std::vector<Permutation> transforms_;
  std::vector<Permutation> inverses_;
  std::vector<CycleTable> cycles_;
  std::vector<Point> support_;
  std::vector<char> in_support_;
};

/// Checks bijectivity, weight normalization, measure preservation and
/// commutation. Errors: CommutationViolation, MeasureNotPreserved, BadWeights,
/// InvalidArgument (not a permutation), CapExceeded.
template <class S>
FiniteSystem<S> validate_system(std::size_t m, std::vector<S> weights, std::vector<Permutation> transforms,
                                const Limits& limits = {});

/// Uniform weights on {0..m-1}.
template <class S>
FiniteSystem<S> uniform_system(std::size_t m, std::vector<Permutation> transforms, const Limits& limits = {});

/// Π_i T_i^{n_i}(x); negative exponents use inverses.
template <class S>
Point apply_word(const FiniteSystem<S>& sys, const TransformWord& w, Point x);

/// Least L_i > 0 with T_i^{L_i} = id on the support, for each listed axis.
template <class S>
std::vector<std::uint64_t> joint_period(const FiniteSystem<S>& sys, std::span<const std::size_t> axes);

/// lcm of joint_period over `axes`.
template <class S>
std::uint64_t common_period(const FiniteSystem<S>& sys, std::span<const std::size_t> axes);

/// Point (i, j) is encoded as i * b.size() + j.
template <class S>
FiniteSystem<S> product_system(const FiniteSystem<S>& a, const FiniteSystem<S>& b, const Limits& limits = {});

/// Appends identity generators up to `d` generators.
template <class S>
FiniteSystem<S> pad_dimension(const FiniteSystem<S>& sys, std::size_t d);

/// Same system with weights restricted to `points` and renormalized.
template <class S>
FiniteSystem<S> restrict_weights(const FiniteSystem<S>& sys, std::span<const Point> points,
                                 std::span<const std::size_t> keep_axes);

std::vector<std::size_t> all_axes(std::size_t d);

std::uint64_t lcm_checked(std::uint64_t a, std::uint64_t b);

std::string describe_permutation(const Permutation& p);

}  // namespace ergo
