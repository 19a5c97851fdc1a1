#pragma once

// Property checks binding the other modules: each produces a CheckReport with
// one record per assertion. In rational mode every pass is an exact
// (in)equality; in float mode comparisons use the 1e-9 tolerance.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ergo/averages.hpp"
#include "ergo/core.hpp"
#include "ergo/cubes.hpp"

namespace ergo {

enum class CheckStatus { Pass, Fail, ReportOnly };

std::string_view status_name(CheckStatus s);

struct Assertion {
  std::string name;
  std::string lhs;
  std::string rhs;
  double residual = 0;
  CheckStatus status = CheckStatus::Pass;
  std::string witness;
};

struct CheckReport {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::vector<Assertion> assertions;
  std::string witness;  // set when status is Fail
  std::vector<std::string> notes;

  bool failed() const { return status == CheckStatus::Fail; }
  std::size_t failures() const;
};

template <class S>
struct VerifyOptions {
  std::size_t cap = Limits{}.max_support;
  std::uint64_t seed = 7;
  std::size_t random_assignments = 16;
  /// Applied to the primary cube measure before the seminorm checks (fault
  /// injection in tests).
  std::function<void(SparseJoining<S>&)> measure_hook;
};

/// Indicators of the support points, the constant 1, and the kernel basis of
/// E(·|Z) for Z the join of the invariant partitions of the listed generators.
template <class S>
std::vector<Observable<S>> default_family(const FiniteSystem<S>& sys, std::span<const std::size_t> axes);

/// Seeded ±1 observables.
template <class S>
std::vector<Observable<S>> random_sign_functions(std::size_t m, std::size_t count, std::uint64_t seed);

/// Cauchy–Schwarz–Gowers, single-inverse invariance, order invariance,
/// zero seminorm ⇒ E(f|Z) = 0, factor compatibility for the quotients by the
/// invariant partition of every nonempty generator subset, and the
/// ergodic-decomposition identity.
template <class S>
CheckReport check_seminorm_properties(const FiniteSystem<S>& sys, std::span<const Observable<S>> family,
                                      std::span<const std::size_t> axes, const VerifyOptions<S>& options = {});

/// For N = 1..nmax: (cube average of f_ε over |ε| ≤ k)^{2^k} ≤ S_{σ,N}(f_σ) and
/// S_{σ,N} ≥ 0, where k = |σ|. fs holds 2^d functions by vertex position;
/// they are rescaled to sup-norm 1 when larger (recorded as a note).
template <class S>
CheckReport check_van_der_corput(const FiniteSystem<S>& sys, std::span<const Observable<S>> fs, CubeIndex sigma,
                                 Point x, std::uint64_t nmax, const VerifyOptions<S>& options = {});

/// The cube extension is magic for its face maps, its factor map is
/// measure-preserving and equivariant; base magic status is reported.
template <class S>
CheckReport check_magic_extension(const FiniteSystem<S>& sys, std::span<const std::size_t> axes,
                                  const VerifyOptions<S>& options = {});

/// For each ergodic component and each of its points x: the limit measure of
/// the averaged multiple average at x equals the component's μ^F, and the
/// limits of the listed tuples equal their μ^F integrals.
template <class S>
CheckReport check_averaged_multiple(const FiniteSystem<S>& sys, std::span<const std::vector<Observable<S>>> tuples,
                                    const VerifyOptions<S>& options = {});

/// Pointwise limits equal μ^F_x (as measures and on the listed tuples), each
/// μ^F_x is a single R-orbit, Σ μ(x) μ^F_x = μ^F, μ^F is invariant under H_d,
/// and the projection to the last d-1 coordinates is the joining of
/// (T_1^{-1}T_2, ..., T_1^{-1}T_d).
template <class S>
CheckReport check_limit_formula(const FiniteSystem<S>& sys, std::span<const std::vector<Observable<S>>> tuples,
                                const VerifyOptions<S>& options = {});

/// lim S_{σ,N}(f, x) = |||f|||^{2^k} on each ergodic component of the listed
/// generators, σ being their indicator. Errors: InvalidArgument on repeated axes.
template <class S>
CheckReport check_seminorm_limit(const FiniteSystem<S>& sys, std::span<const Observable<S>> fs,
                                 std::span<const std::size_t> axes, const VerifyOptions<S>& options = {});

/// Report only: ∫⊗f versus ∫⊗E(f|Z) on the cube measure, and ∫⊗f versus
/// ∫⊗E(f | ∨_{j≠i} I_{T_i^{-1}T_j}) on μ^F.
template <class S>
CheckReport report_relative_independence(const FiniteSystem<S>& sys, std::span<const std::size_t> axes,
                                         const VerifyOptions<S>& options = {});

/// E(⊗f_ε | I_{T_k^{[k-1]}}) = E(⊗E(f_ε|Z_k) | I_{T_k^{[k-1]}}) on μ_{T_1..T_{k-1}}.
/// Downgraded to report-only when the system is not magic for the generators.
template <class S>
CheckReport check_cube_invariant_measurability(const FiniteSystem<S>& sys, std::span<const std::size_t> axes,
                                               const VerifyOptions<S>& options = {});

struct SuiteOptions {
  std::vector<std::size_t> axes;  // empty: all generators
  std::uint64_t nmax = 32;
  std::uint64_t seed = 7;
  std::size_t cap = Limits{}.max_support;
};

/// All checks with default families, run concurrently, reported in a fixed order.
template <class S>
std::vector<CheckReport> run_verify_suite(const FiniteSystem<S>& sys, std::span<const Observable<S>> user_functions,
                                          const SuiteOptions& options);

/// One JSON object per assertion, then one summary object per check.
void write_check_records(std::ostream& os, const CheckReport& report);

}  // namespace ergo
