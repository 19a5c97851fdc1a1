#pragma once

// Multiple, cubic and averaged ergodic averages on finite systems, their exact
// Cesàro limits, convergence reports, and a sampled-orbit mode for affine
// torus maps.
//
// Every average here is (1/N^D) Σ_{n in [0,N)^D} F(n) with F periodic in each
// index (period ℓ_j, the joint period of the acting generator on the orbit of
// the base point). The residue box Π [0, ℓ_j) is tabulated once, cells
// grouped by the point tuple they evaluate; an average at any N is then an
// integer-weighted sum over the box, where residue r of index j carries weight
// #{n < N : n ≡ r mod ℓ_j}. The Cesàro limit is the unweighted box mean.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ergo/core.hpp"
#include "ergo/cubes.hpp"

namespace ergo {

enum class AverageKind { Multiple, Cubic, AveragedMultiple, AveragedCubic, SSigma };

std::string_view average_kind_name(AverageKind kind);
/// Accepts multiple, cubic, averaged_multiple, averaged_cubic, s_sigma.
std::optional<AverageKind> parse_average_kind(std::string_view name);

/// Function layout by kind:
///   Multiple, AveragedMultiple: d functions f_1..f_d;
///   Cubic: 2^d entries indexed by vertex position, entry 0 unused (may be empty);
///   AveragedCubic: 2^d entries indexed by vertex position;
///   SSigma: one function, evaluated at every vertex below sigma.
template <class S>
struct AverageSpec {
  AverageKind kind = AverageKind::Multiple;
  std::vector<Observable<S>> functions;
  CubeIndex sigma;
  Point x = 0;
};

/// Tabulated residue box of one average at one base point.
template <class S>
class AverageBox {
 public:
  /// Errors: ArityMismatch, InvalidArgument, SupportExplosion (box above cap).
  static AverageBox build(const FiniteSystem<S>& sys, const AverageSpec<S>& spec,
                          std::size_t cap = Limits{}.max_support);

  /// Cube-shaped box with an explicit function per vertex (null = 1),
  /// including vertex 0: (1/N^d) Σ Π_ε f_ε(T^{n·ε} x).
  static AverageBox cube(const FiniteSystem<S>& sys, std::span<const Observable<S>* const> fs, Point x,
                         std::size_t cap = Limits{}.max_support);

  S value(std::uint64_t n) const;
  S limit() const;
  /// The same average with other functions on the tuple coordinates (null = 1).
  S value_with(std::uint64_t n, std::span<const Observable<S>* const> fs) const;
  S limit_with(std::span<const Observable<S>* const> fs) const;
  /// Per distinct tuple, Σ over its cells of Π_j #{n < N : n ≡ r_j mod ℓ_j}.
  std::vector<Count> tuple_weights(std::uint64_t n) const;
  /// Limit of the empirical tuple distribution: cells per tuple / cells.
  SparseJoining<S> limit_measure(std::size_t base_points) const;
  std::size_t arity() const { return arity_; }
  /// lcm of the index periods: the average equals its limit at multiples of it.
  std::uint64_t period() const { return period_; }
  std::size_t cells() const { return cell_tuple_.size(); }
  std::size_t distinct_tuples() const { return products_.size(); }

 private:
  std::vector<std::uint64_t> periods_;
  std::uint64_t period_ = 1;
  std::size_t arity_ = 0;
  std::vector<Point> tuple_coords_;        // distinct tuples, flat
  std::vector<std::uint32_t> cell_tuple_;  // row-major, last index fastest
  std::vector<S> products_;                // Π f over each distinct tuple
  std::vector<std::uint64_t> cell_counts_; // box cells per distinct tuple
};

/// Orbit of x under the group generated by all transforms, in BFS order.
template <class S>
std::vector<Point> group_orbit(const FiniteSystem<S>& sys, Point x);

template <class S>
S evaluate_average(const FiniteSystem<S>& sys, const AverageSpec<S>& spec, std::uint64_t n);

template <class S>
S multiple_average(const FiniteSystem<S>& sys, std::span<const Observable<S>> fs, Point x, std::uint64_t n);
/// fs holds the 2^d - 1 functions for ε ≠ 0, in position order 1..2^d-1.
template <class S>
S cubic_average(const FiniteSystem<S>& sys, std::span<const Observable<S>> fs, Point x, std::uint64_t n);
template <class S>
S averaged_multiple_average(const FiniteSystem<S>& sys, std::span<const Observable<S>> fs, Point x,
                            std::uint64_t n);
template <class S>
S averaged_cubic_average(const FiniteSystem<S>& sys, std::span<const Observable<S>> fs, Point x, std::uint64_t n);
template <class S>
S s_sigma_statistic(const FiniteSystem<S>& sys, const Observable<S>& f, CubeIndex sigma, Point x, std::uint64_t n);

/// Cesàro limit of the spec's average as N → ∞ (the period-box mean).
template <class S>
S exact_limit(const FiniteSystem<S>& sys, const AverageSpec<S>& spec, std::size_t cap = Limits{}.max_support);

template <class S>
struct ConvergenceReport {
  std::vector<std::uint64_t> grid;
  std::vector<S> values;
  std::vector<S> tail;  // max - min of values over the suffix starting at each grid point
  std::optional<S> exact_limit;
  bool converged = false;
};

/// Errors: InvalidArgument (grid empty, not increasing, or containing 0).
template <class S>
ConvergenceReport<S> convergence_report(const FiniteSystem<S>& sys, const AverageSpec<S>& spec,
                                        std::span<const std::uint64_t> grid, std::size_t cap = Limits{}.max_support);

/// Columns N,value,tail,exact_limit; exact_limit is blank when absent.
template <class S>
void write_report_csv(std::ostream& os, const ConvergenceReport<S>& report);

/// 16, 32, ..., 4096.
std::vector<std::uint64_t> default_grid();

// ---- sampled-orbit mode -------------------------------------------------

/// x ↦ A x + b (mod 1) on the n-torus; A is an integer matrix.
struct TorusMap {
  std::vector<std::vector<std::int64_t>> matrix;
  std::vector<double> shift;

  void apply(std::span<const double> in, std::span<double> out) const;
};

struct StreamSystem {
  std::size_t space_dim = 1;
  std::vector<TorusMap> maps;
};

/// Rotation of the circle by each alpha.
StreamSystem rotation_stream(std::span<const double> alphas);
/// (x, y) ↦ (x + alpha, y + x) together with (x, y) ↦ (x, y + beta).
StreamSystem skew_stream(double alpha, double beta);

struct StreamFunction {
  enum class Kind { Constant, Cosine, Sine, Interval };
  Kind kind = Kind::Constant;
  std::vector<std::int64_t> freq;  // Cosine/Sine: evaluates cos/sin(2π freq·x)
  std::size_t coord = 0;           // Interval: indicator of lo <= x[coord] < hi
  double lo = 0, hi = 1;
  double value = 1;                // Constant

  double operator()(std::span<const double> x) const;
};

/// Errors: NonCommutingStream when a seeded sample of points shows
/// |T_i T_j x - T_j T_i x| > 1e-9 (torus distance).
void check_stream_commutation(const StreamSystem& stream, std::uint64_t seed = 0x5eed);

/// kind is Multiple (functions f_1..f_d) or Cubic (2^d entries by vertex
/// position, entry 0 ignored). The report never carries an exact limit and
/// never sets converged. Errors: NonCommutingStream, CapExceeded, ArityMismatch.
ConvergenceReport<double> stream_average(const StreamSystem& stream, AverageKind kind,
                                         std::span<const StreamFunction> fs, std::span<const double> x0,
                                         std::span<const std::uint64_t> grid,
                                         std::size_t cap = 200'000'000);

}  // namespace ergo
