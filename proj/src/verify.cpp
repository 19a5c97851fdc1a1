#include "ergo/verify.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <ostream>
#include <random>

#include "json.hpp"

#include "ergo/errors.hpp"
#include "ergo/joinings.hpp"
#include "ergo/parallel.hpp"
#include "ergo/sigma.hpp"

namespace ergo {

std::string_view status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::ReportOnly: return "report-only";
  }
  return "?";
}

std::size_t CheckReport::failures() const {
  return static_cast<std::size_t>(std::count_if(assertions.begin(), assertions.end(),
                                                [](const Assertion& a) { return a.status == CheckStatus::Fail; }));
}

namespace {

template <class S>
std::string describe(const Observable<S>& f) {
  std::string s = "(";
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) s += ',';
    s += format_scalar(f.values[i]);
  }
  return s + ")";
}

// Collects assertions; `soft` turns every verdict into report-only.
template <class S>
class Recorder {
 public:
  Recorder(CheckReport& report, bool soft = false) : r_(report), soft_(soft) {}

  void set_soft(bool soft) { soft_ = soft; }

  void equal(std::string name, const S& lhs, const S& rhs, std::string witness = {}) {
    S diff = lhs - rhs;
    double residual = to_double(abs_value(diff));
    bool ok = is_exact_v<S> ? sgn_zero(diff) : residual <= kFloatTolerance;
    add(std::move(name), format_scalar(lhs), format_scalar(rhs), residual, ok, std::move(witness));
  }

  void less_equal(std::string name, const S& lhs, const S& rhs, std::string witness = {}) {
    S diff = lhs - rhs;
    double residual = std::max(0.0, to_double(diff));
    bool ok = approx_le(lhs, rhs);
    add(std::move(name), format_scalar(lhs), format_scalar(rhs), residual, ok, std::move(witness));
  }

  void holds(std::string name, bool ok, std::string lhs, std::string rhs, double residual, std::string witness = {}) {
    add(std::move(name), std::move(lhs), std::move(rhs), residual, ok, std::move(witness));
  }

  void info(std::string name, std::string lhs, std::string rhs, double residual, std::string witness = {}) {
    r_.assertions.push_back({std::move(name), std::move(lhs), std::move(rhs), residual, CheckStatus::ReportOnly,
                             std::move(witness)});
  }

 private:
  static bool sgn_zero(const S& v) {
    if constexpr (is_exact_v<S>)
      return sgn(v) == 0;
    else
      return v == 0;
  }

  void add(std::string name, std::string lhs, std::string rhs, double residual, bool ok, std::string witness) {
    CheckStatus st = soft_ ? CheckStatus::ReportOnly : (ok ? CheckStatus::Pass : CheckStatus::Fail);
    r_.assertions.push_back({std::move(name), std::move(lhs), std::move(rhs), residual, st, std::move(witness)});
  }

  CheckReport& r_;
  bool soft_;
};

void finalize(CheckReport& r, bool report_only = false) {
  for (const auto& a : r.assertions)
    if (a.status == CheckStatus::Fail) {
      r.status = CheckStatus::Fail;
      r.witness = a.witness.empty() ? a.name : a.witness;
      return;
    }
  r.status = report_only ? CheckStatus::ReportOnly : CheckStatus::Pass;
}

template <class S>
Partition z_partition(const FiniteSystem<S>& sys, std::span<const std::size_t> axes) {
  Partition z;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    Partition p = invariant_partition(sys, axes.subspan(i, 1));
    z = i == 0 ? p : join_partitions(z, p);
  }
  return z;
}

std::vector<std::size_t> iota_axes(std::size_t k) {
  std::vector<std::size_t> v(k);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

// Vertex assignments of family members: uniform, cyclic shifts, seeded random.
std::vector<std::vector<std::size_t>> assignments(std::size_t family, std::size_t vertices, std::size_t random,
                                                  std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < family; ++i) out.emplace_back(vertices, i);
  for (std::size_t s = 0; s < family; ++s) {
    std::vector<std::size_t> a(vertices);
    for (std::size_t e = 0; e < vertices; ++e) a[e] = (s + e) % family;
    out.push_back(std::move(a));
  }
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < random; ++t) {
    std::vector<std::size_t> a(vertices);
    for (auto& v : a) v = static_cast<std::size_t>(rng() % family);
    out.push_back(std::move(a));
  }
  return out;
}

std::string describe_assignment(const std::vector<std::size_t>& a) {
  std::string s = "family members [";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(a[i]);
  }
  return s + "]";
}

std::string axes_label(std::span<const std::size_t> axes) {
  std::string s = "{";
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(axes[i] + 1);
  }
  return s + "}";
}

template <class S>
std::string joining_residual_text(double residual) {
  return is_exact_v<S> ? (residual == 0 ? "equal" : "different") : format_scalar(residual);
}

}  // namespace

template <class S>
std::vector<Observable<S>> default_family(const FiniteSystem<S>& sys, std::span<const std::size_t> axes) {
  std::vector<Observable<S>> out;
  for (Point x : sys.support()) out.push_back(Observable<S>::indicator(sys.size(), x));
  out.push_back(Observable<S>::constant(sys.size(), S(1)));
  auto basis = kernel_basis(sys, z_partition(sys, axes));
  out.insert(out.end(), basis.begin(), basis.end());
  return out;
}

template <class S>
std::vector<Observable<S>> random_sign_functions(std::size_t m, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Observable<S>> out;
  for (std::size_t i = 0; i < count; ++i) {
    Observable<S> f = Observable<S>::constant(m, S(0));
    for (auto& v : f.values) v = (rng() & 1u) ? S(1) : S(-1);
    out.push_back(std::move(f));
  }
  return out;
}

template <class S>
CheckReport check_seminorm_properties(const FiniteSystem<S>& sys, std::span<const Observable<S>> family,
                                      std::span<const std::size_t> axes, const VerifyOptions<S>& options) {
  CheckReport report;
  report.name = "seminorm_properties " + axes_label(axes);
  Recorder<S> rec(report);
  if (axes.empty()) fail(ErrorCode::EmptySubset, "seminorm properties need at least one generator");
  for (const auto& f : family)
    if (f.size() != sys.size()) fail(ErrorCode::ArityMismatch, "family member has the wrong length");
  std::size_t k = axes.size();
  std::size_t vertices = std::size_t{1} << k;
  auto refs = transform_refs(axes);
  SparseJoining<S> cube = host_measure(sys, refs, options.cap);
  if (options.measure_hook) options.measure_hook(cube);

  std::vector<S> p;
  for (const auto& f : family) p.push_back(seminorm_power(cube, f));
  for (std::size_t i = 0; i < family.size(); ++i)
    rec.less_equal("nonnegative seminorm power f" + std::to_string(i), S(0), p[i], describe(family[i]));

  // (1) Cauchy–Schwarz–Gowers, compared after raising to the 2^k-th power
  if (!family.empty()) {
    for (const auto& a : assignments(family.size(), vertices, options.random_assignments, options.seed)) {
      std::vector<const Observable<S>*> ptrs;
      S rhs = 1;
      for (std::size_t e = 0; e < vertices; ++e) {
        ptrs.push_back(&family[a[e]]);
        rhs *= p[a[e]];
      }
      S integral = integrate_tensor<S>(cube, ptrs);
      rec.less_equal("cauchy-schwarz-gowers " + describe_assignment(a), power(integral, static_cast<unsigned>(vertices)),
                     rhs, describe_assignment(a));
    }
  }

  // (2) inverting any single transform
  for (std::size_t r = 0; r < k; ++r) {
    auto inv = refs;
    inv[r].inverse = true;
    SparseJoining<S> other = host_measure(sys, inv, options.cap);
    for (std::size_t i = 0; i < family.size(); ++i)
      rec.equal("inverse of T" + std::to_string(axes[r] + 1) + " f" + std::to_string(i), seminorm_power(other, family[i]),
                p[i], describe(family[i]));
  }

  // (3) every reordering of the transforms
  std::vector<std::size_t> order = iota_axes(k);
  while (std::next_permutation(order.begin(), order.end())) {
    std::vector<TransformRef> perm;
    std::string label = "order (";
    for (std::size_t t = 0; t < k; ++t) {
      perm.push_back(refs[order[t]]);
      label += (t ? "," : "") + std::to_string(axes[order[t]] + 1);
    }
    label += ")";
    SparseJoining<S> other = host_measure(sys, perm, options.cap);
    for (std::size_t i = 0; i < family.size(); ++i)
      rec.equal(label + " f" + std::to_string(i), seminorm_power(other, family[i]), p[i], describe(family[i]));
  }

  // (4) zero seminorm forces E(f|Z) = 0
  Partition z = z_partition(sys, axes);
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (!seminorm_power_is_zero(p[i])) continue;
    auto e = cond_expectation(sys, family[i], z);
    S worst = 0;
    for (const auto& v : e.values)
      if (worst < abs_value(v)) worst = abs_value(v);
    rec.equal("zero seminorm implies E(f|Z)=0 f" + std::to_string(i), worst, S(0), describe(family[i]));
  }

  // (5) factor compatibility for the quotient by each subgroup's orbits
  std::size_t d = sys.dim();
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << d); ++mask) {
    std::vector<std::size_t> sub;
    for (std::size_t i = 0; i < d; ++i)
      if ((mask >> i) & 1u) sub.push_back(i);
    auto q = quotient_system(sys, invariant_partition(sys, sub));
    SparseJoining<S> qcube = host_measure(q.system, refs, options.cap);
    std::vector<Observable<S>> gs;
    for (Point a = 0; a < q.system.size(); ++a) gs.push_back(Observable<S>::indicator(q.system.size(), a));
    auto signs = random_sign_functions<S>(q.system.size(), 2, options.seed + mask);
    gs.insert(gs.end(), signs.begin(), signs.end());
    for (std::size_t g = 0; g < gs.size(); ++g)
      rec.equal("factor by orbits of " + axes_label(sub) + " g" + std::to_string(g), seminorm_power(qcube, gs[g]),
                seminorm_power(cube, pull_back(q, gs[g])), describe(gs[g]));
  }

  // (6) ergodic decomposition under the listed generators
  auto comps = ergodic_decomposition(sys, axes);
  std::vector<S> mixed(family.size(), S(0));
  auto local = transform_refs(iota_axes(k));
  for (const auto& c : comps) {
    auto part = restrict_weights(sys, c.orbit, axes);
    SparseJoining<S> ccube = host_measure(part, local, options.cap);
    for (std::size_t i = 0; i < family.size(); ++i) mixed[i] += c.weight * seminorm_power(ccube, family[i]);
  }
  for (std::size_t i = 0; i < family.size(); ++i)
    rec.equal("ergodic decomposition f" + std::to_string(i), mixed[i], p[i], describe(family[i]));

  finalize(report);
  return report;
}

template <class S>
CheckReport check_van_der_corput(const FiniteSystem<S>& sys, std::span<const Observable<S>> fs, CubeIndex sigma,
                                 Point x, std::uint64_t nmax, const VerifyOptions<S>& options) {
  CheckReport report;
  report.name = "van_der_corput sigma=" + sigma.to_string() + " x=" + std::to_string(x);
  Recorder<S> rec(report);
  std::size_t d = sys.dim();
  std::size_t vertices = std::size_t{1} << d;
  if (fs.size() != vertices) fail(ErrorCode::ArityMismatch, "van der Corput check needs 2^d functions");
  if (sigma.dim != d || sigma.bits == 0) fail(ErrorCode::InvalidArgument, "sigma must be a nonzero vertex of {0,1}^d");
  unsigned k = sigma.weight();

  S sup = 0;
  for (const auto& f : fs) {
    if (f.size() != sys.size()) fail(ErrorCode::ArityMismatch, "function has the wrong length");
    for (const auto& v : f.values)
      if (sup < abs_value(v)) sup = abs_value(v);
  }
  std::vector<Observable<S>> scaled(fs.begin(), fs.end());
  if (sup > 1) {
    for (auto& f : scaled)
      for (auto& v : f.values) v /= sup;
    report.notes.push_back("functions rescaled by 1/" + format_scalar(sup));
  }
  std::vector<const Observable<S>*> lower;
  for (std::size_t e = 0; e < vertices; ++e)
    lower.push_back(static_cast<unsigned>(__builtin_popcount(static_cast<unsigned>(e))) <= k ? &scaled[e] : nullptr);
  auto lhs_box = AverageBox<S>::cube(sys, lower, x, options.cap);
  AverageSpec<S> spec{AverageKind::SSigma, {scaled[sigma.position()]}, sigma, x};
  auto rhs_box = AverageBox<S>::build(sys, spec, options.cap);
  for (std::uint64_t n = 1; n <= nmax; ++n) {
    S rhs = rhs_box.value(n);
    S lhs = power(lhs_box.value(n), 1u << k);
    rec.less_equal("N=" + std::to_string(n) + " power bound", lhs, rhs, "N=" + std::to_string(n));
    rec.less_equal("N=" + std::to_string(n) + " S nonnegative", S(0), rhs, "N=" + std::to_string(n));
  }
  finalize(report);
  return report;
}

template <class S>
CheckReport check_magic_extension(const FiniteSystem<S>& sys, std::span<const std::size_t> axes,
                                  const VerifyOptions<S>& options) {
  CheckReport report;
  report.name = "magic_extension " + axes_label(axes);
  Recorder<S> rec(report);
  auto ext = cube_extension(sys, axes, options.cap);
  auto mr = is_magic(ext.system, axes, options.cap);
  rec.holds("extension is magic for its face maps", mr.magic, mr.magic ? "magic" : "not magic",
            "kernel basis of size " + std::to_string(mr.basis_size), mr.magic ? 0.0 : to_double(mr.witness_power),
            mr.witness ? describe(*mr.witness) : std::string{});

  std::vector<S> pushed(sys.size(), S(0));
  for (Point u = 0; u < ext.system.size(); ++u) pushed[ext.factor_map[u]] += ext.system.weight(u);
  for (Point y = 0; y < sys.size(); ++y)
    rec.equal("factor map pushes weight to point " + std::to_string(y), pushed[y], sys.weight(y));
  for (std::size_t g = 0; g < sys.dim(); ++g) {
    std::size_t bad = 0;
    for (Point u = 0; u < ext.system.size(); ++u)
      if (ext.factor_map[ext.system.apply(g, u)] != sys.apply(g, ext.factor_map[u])) ++bad;
    rec.holds("factor map equivariant for T" + std::to_string(g + 1), bad == 0, std::to_string(bad) + " violations", "0",
              static_cast<double>(bad));
  }
  auto base = is_magic(sys, axes, options.cap);
  rec.info("base system magic", base.magic ? "magic" : "not magic",
           base.magic ? "" : "witness seminorm power " + format_scalar(base.witness_power),
           base.magic ? 0.0 : to_double(base.witness_power), base.witness ? describe(*base.witness) : std::string{});
  finalize(report);
  return report;
}

template <class S>
CheckReport check_averaged_multiple(const FiniteSystem<S>& sys, std::span<const std::vector<Observable<S>>> tuples,
                                    const VerifyOptions<S>& options) {
  CheckReport report;
  report.name = "averaged_multiple_limit";
  Recorder<S> rec(report);
  std::size_t d = sys.dim();
  auto all = iota_axes(d);
  auto comps = ergodic_decomposition(sys, all);
  if (comps.size() > 1) report.notes.push_back("not ergodic: checked per component (" + std::to_string(comps.size()) + ")");
  std::vector<Observable<S>> ones(d, Observable<S>::constant(sys.size(), S(1)));
  for (const auto& t : tuples)
    if (t.size() != d) fail(ErrorCode::ArityMismatch, "each tuple needs one function per generator");
  for (std::size_t ci = 0; ci < comps.size(); ++ci) {
    auto part = restrict_weights(sys, comps[ci].orbit, all);
    auto joining = furstenberg_joining(part, options.cap);
    std::vector<S> integrals;
    for (const auto& t : tuples) integrals.push_back(integrate_tensor<S>(joining, std::span<const Observable<S>>(t)));
    for (Point x : comps[ci].orbit) {
      AverageSpec<S> spec{AverageKind::AveragedMultiple, ones, {}, x};
      auto box = AverageBox<S>::build(sys, spec, options.cap);
      auto lm = box.limit_measure(sys.size());
      double dist = joining_distance(lm, joining);
      rec.holds("x=" + std::to_string(x) + " limit measure equals mu^F", joinings_match(lm, joining), "limit measure",
                "mu^F of component " + std::to_string(ci), dist, "x=" + std::to_string(x));
      for (std::size_t ti = 0; ti < tuples.size(); ++ti) {
        std::vector<const Observable<S>*> ptrs;
        for (const auto& f : tuples[ti]) ptrs.push_back(&f);
        rec.equal("x=" + std::to_string(x) + " tuple " + std::to_string(ti), box.limit_with(ptrs), integrals[ti],
                  "x=" + std::to_string(x));
      }
    }
  }
  finalize(report);
  return report;
}

template <class S>
CheckReport check_limit_formula(const FiniteSystem<S>& sys, std::span<const std::vector<Observable<S>>> tuples,
                                const VerifyOptions<S>& options) {
  CheckReport report;
  report.name = "pointwise_limit_formula";
  Recorder<S> rec(report);
  std::size_t d = sys.dim();
  for (const auto& t : tuples)
    if (t.size() != d) fail(ErrorCode::ArityMismatch, "each tuple needs one function per generator");
  auto family = pointwise_family(sys, options.cap);
  auto joining = furstenberg_joining(sys, options.cap);
  std::vector<TupleMap> r_only{product_map(sys)};
  std::vector<Observable<S>> ones(d, Observable<S>::constant(sys.size(), S(1)));
  std::vector<SparseJoining<S>> parts;
  std::vector<S> weights;
  for (Point x : sys.support()) {
    const auto& mx = family.at(x);
    AverageSpec<S> spec{AverageKind::Multiple, ones, {}, x};
    auto box = AverageBox<S>::build(sys, spec, options.cap);
    auto lm = box.limit_measure(sys.size());
    std::string wx = "x=" + std::to_string(x);
    rec.holds(wx + " limit measure equals mu^F_x", joinings_match(lm, mx), "limit measure", "mu^F_x",
              joining_distance(lm, mx), wx);
    for (std::size_t ti = 0; ti < tuples.size(); ++ti) {
      std::vector<const Observable<S>*> ptrs;
      for (const auto& f : tuples[ti]) ptrs.push_back(&f);
      rec.equal(wx + " tuple " + std::to_string(ti), box.limit_with(ptrs),
                integrate_tensor<S>(mx, std::span<const Observable<S>* const>(ptrs)), wx);
    }
    bool ergodic = joining_ergodicity(mx, std::span<const TupleMap>(r_only));
    rec.holds(wx + " mu^F_x is one R-orbit", ergodic, ergodic ? "single orbit" : "several orbits", "single orbit",
              ergodic ? 0.0 : 1.0, wx);
    parts.push_back(pointwise_joining(sys, x));
    weights.push_back(sys.weight(x));
  }
  auto mixed = mixture<S>(parts, weights);
  double dist = joining_distance(mixed, joining);
  rec.holds("mixture of mu^F_x equals mu^F", joinings_match(mixed, joining), "sum mu(x) mu^F_x", "mu^F", dist);

  auto group = furstenberg_group(sys);
  for (std::size_t g = 0; g < group.size(); ++g) {
    auto moved = pushforward(joining, group[g]);
    std::string label = g == 0 ? "R" : "diagonal T" + std::to_string(g);
    rec.holds("mu^F invariant under " + label, joinings_match(moved, joining), "pushforward", "mu^F",
              joining_distance(moved, joining));
  }
  for (std::size_t c = 0; c < d; ++c) {
    auto marg = joining.marginal(c);
    S worst = 0;
    for (Point y = 0; y < sys.size(); ++y) {
      S diff = abs_value(S(marg[y] - sys.weight(y)));
      if (worst < diff) worst = diff;
    }
    rec.equal("marginal " + std::to_string(c + 1) + " of mu^F equals mu", worst, S(0));
  }
  if (d >= 2) {
    std::vector<std::size_t> tail_coords(d - 1);
    std::iota(tail_coords.begin(), tail_coords.end(), std::size_t{1});
    auto projected = joining.project(tail_coords);
    auto relative = furstenberg_joining(relative_system(sys), options.cap);
    rec.holds("projection to last d-1 coordinates", joinings_match(projected, relative), "projected mu^F",
              "joining of T1^-1 Tj", joining_distance(projected, relative));
  } else {
    report.notes.push_back("projection identity needs d >= 2");
  }
  finalize(report);
  return report;
}

template <class S>
CheckReport check_seminorm_limit(const FiniteSystem<S>& sys, std::span<const Observable<S>> fs,
                                 std::span<const std::size_t> axes, const VerifyOptions<S>& options) {
  CheckReport report;
  report.name = "seminorm_limit " + axes_label(axes);
  Recorder<S> rec(report);
  if (axes.empty()) fail(ErrorCode::EmptySubset, "seminorm limit needs at least one generator");
  CubeIndex sigma{static_cast<unsigned>(sys.dim()), 0};
  for (std::size_t a : axes) {
    if (a >= sys.dim()) fail(ErrorCode::AxisOutOfRange, "axis " + std::to_string(a + 1) + " out of range");
    if (sigma.bit(static_cast<unsigned>(a))) fail(ErrorCode::InvalidArgument, "repeated generator in subset");
    sigma.bits |= std::uint32_t{1} << a;
  }
  // S_σ visits the generators in increasing order
  std::vector<std::size_t> sorted(axes.begin(), axes.end());
  std::sort(sorted.begin(), sorted.end());
  auto comps = ergodic_decomposition(sys, sorted);
  auto local = transform_refs(iota_axes(sorted.size()));
  Observable<S> one = Observable<S>::constant(sys.size(), S(1));
  std::size_t vertices = std::size_t{1} << sorted.size();
  for (std::size_t ci = 0; ci < comps.size(); ++ci) {
    auto part = restrict_weights(sys, comps[ci].orbit, sorted);
    auto cube = host_measure(part, local, options.cap);
    std::vector<S> powers;
    for (const auto& f : fs) powers.push_back(seminorm_power(cube, f));
    for (Point x : comps[ci].orbit) {
      AverageSpec<S> spec{AverageKind::SSigma, {one}, sigma, x};
      auto box = AverageBox<S>::build(sys, spec, options.cap);
      for (std::size_t i = 0; i < fs.size(); ++i) {
        std::vector<const Observable<S>*> ptrs(vertices, &fs[i]);
        rec.equal("component " + std::to_string(ci) + " x=" + std::to_string(x) + " f" + std::to_string(i),
                  box.limit_with(ptrs), powers[i], describe(fs[i]) + " at x=" + std::to_string(x));
      }
    }
  }
  finalize(report);
  return report;
}

template <class S>
CheckReport report_relative_independence(const FiniteSystem<S>& sys, std::span<const std::size_t> axes,
                                         const VerifyOptions<S>& options) {
  CheckReport report;
  report.name = "relative_independence " + axes_label(axes);
  Recorder<S> rec(report, true);
  auto cube = host_measure(sys, transform_refs(axes), options.cap);
  Partition z = z_partition(sys, axes);
  auto family = default_family(sys, axes);
  for (std::size_t i = 0; i < family.size(); ++i) {
    S lhs = integrate_uniform(cube, family[i]);
    S rhs = integrate_uniform(cube, cond_expectation(sys, family[i], z));
    rec.equal("cube f" + std::to_string(i) + " vs E(f|Z)", lhs, rhs, describe(family[i]));
  }
  std::size_t d = sys.dim();
  if (d >= 2) {
    auto joining = furstenberg_joining(sys, options.cap);
    std::vector<Partition> parts;
    for (std::size_t i = 0; i < d; ++i) {
      Partition acc;
      bool first = true;
      for (std::size_t j = 0; j < d; ++j) {
        if (j == i) continue;
        Permutation rel = compose(sys.inverse(i), sys.transform(j));
        Partition p = orbit_partition(sys.size(), sys.support(), std::span<const Permutation>(&rel, 1));
        acc = first ? p : join_partitions(acc, p);
        first = false;
      }
      parts.push_back(std::move(acc));
    }
    for (std::size_t i = 0; i < family.size(); ++i) {
      std::vector<Observable<S>> plain(d, family[i]);
      std::vector<Observable<S>> projected;
      for (std::size_t c = 0; c < d; ++c) projected.push_back(cond_expectation(sys, family[i], parts[c]));
      S lhs = integrate_tensor<S>(joining, std::span<const Observable<S>>(plain));
      S rhs = integrate_tensor<S>(joining, std::span<const Observable<S>>(projected));
      rec.equal("joining f" + std::to_string(i) + " vs conditioned", lhs, rhs, describe(family[i]));
    }
  }
  finalize(report, true);
  return report;
}

template <class S>
CheckReport check_cube_invariant_measurability(const FiniteSystem<S>& sys, std::span<const std::size_t> axes,
                                               const VerifyOptions<S>& options) {
  CheckReport report;
  report.name = "cube_invariant_measurability " + axes_label(axes);
  if (axes.empty()) fail(ErrorCode::EmptySubset, "measurability check needs at least one generator");
  bool magic = is_magic(sys, axes, options.cap).magic;
  if (!magic) report.notes.push_back("system is not magic for these generators: report only");
  Recorder<S> rec(report, !magic);
  std::size_t k = axes.size();
  SparseJoining<S> base = k == 1 ? base_joining(sys)
                                 : host_measure(sys, transform_refs(axes.first(k - 1)), options.cap);
  const Permutation& last = sys.transform(axes[k - 1]);
  std::vector<TupleMap> diag{diagonal_map(base.arity(), last)};
  Partition rows = support_orbits(base, std::span<const TupleMap>(diag));
  Partition zk = z_partition(sys, axes);
  auto family = default_family(sys, axes);
  std::vector<Observable<S>> projected;
  for (const auto& f : family) projected.push_back(cond_expectation(sys, f, zk));
  std::size_t vertices = base.arity();
  for (const auto& a : assignments(family.size(), vertices, options.random_assignments, options.seed)) {
    std::vector<S> plain(base.size(), S(1)), proj(base.size(), S(1));
    for (std::size_t r = 0; r < base.size(); ++r) {
      auto t = base.tuple(r);
      for (std::size_t e = 0; e < vertices; ++e) {
        plain[r] *= family[a[e]][t[e]];
        proj[r] *= projected[a[e]][t[e]];
      }
    }
    auto lhs = cond_expectation<S>(base.masses(), plain, rows);
    auto rhs = cond_expectation<S>(base.masses(), proj, rows);
    S worst = 0;
    for (std::size_t r = 0; r < base.size(); ++r) {
      S diff = abs_value(S(lhs[r] - rhs[r]));
      if (worst < diff) worst = diff;
    }
    rec.equal("max row difference " + describe_assignment(a), worst, S(0), describe_assignment(a));
  }
  finalize(report, !magic);
  return report;
}

template <class S>
std::vector<CheckReport> run_verify_suite(const FiniteSystem<S>& sys, std::span<const Observable<S>> user_functions,
                                          const SuiteOptions& options) {
  std::size_t d = sys.dim();
  std::size_t m = sys.size();
  std::vector<std::size_t> axes = options.axes.empty() ? iota_axes(d) : options.axes;
  VerifyOptions<S> vo;
  vo.cap = options.cap;
  vo.seed = options.seed;
  auto family = default_family(sys, axes);
  Point x0 = sys.support().front();

  std::vector<std::vector<Observable<S>>> tuples;
  if (user_functions.size() >= d) tuples.emplace_back(user_functions.begin(), user_functions.begin() + d);
  for (std::size_t i = 0; i < sys.support().size() && i < 3; ++i)
    tuples.emplace_back(d, Observable<S>::indicator(m, sys.support()[i]));
  tuples.push_back(random_sign_functions<S>(m, d, options.seed + 1));
  std::vector<Observable<S>> limit_fs(user_functions.begin(), user_functions.end());
  limit_fs.insert(limit_fs.end(), family.begin(), family.end());
  auto vdc_fs = random_sign_functions<S>(m, std::size_t{1} << d, options.seed + 2);

  std::vector<std::function<CheckReport()>> checks;
  checks.push_back([&] { return check_seminorm_properties<S>(sys, family, axes, vo); });
  for (std::uint32_t bits = 1; bits < (std::uint32_t{1} << d); ++bits)
    checks.push_back([&, bits] {
      return check_van_der_corput<S>(sys, vdc_fs, CubeIndex{static_cast<unsigned>(d), bits}, x0, options.nmax, vo);
    });
  checks.push_back([&] { return check_magic_extension<S>(sys, axes, vo); });
  checks.push_back([&] { return check_averaged_multiple<S>(sys, tuples, vo); });
  checks.push_back([&] { return check_limit_formula<S>(sys, tuples, vo); });
  checks.push_back([&] { return check_seminorm_limit<S>(sys, limit_fs, axes, vo); });
  checks.push_back([&] { return report_relative_independence<S>(sys, axes, vo); });
  checks.push_back([&] { return check_cube_invariant_measurability<S>(sys, axes, vo); });

  std::vector<CheckReport> reports(checks.size());
  std::vector<std::exception_ptr> errors(checks.size());
  parallel_for(checks.size(), [&](std::size_t i) {
    try {
      reports[i] = checks[i]();
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return reports;
}

void write_check_records(std::ostream& os, const CheckReport& report) {
  for (const auto& a : report.assertions) {
    nlohmann::ordered_json j;
    j["check"] = report.name;
    j["assertion"] = a.name;
    j["lhs"] = a.lhs;
    j["rhs"] = a.rhs;
    j["residual"] = a.residual;
    j["status"] = status_name(a.status);
    if (!a.witness.empty()) j["witness"] = a.witness;
    os << j.dump() << '\n';
  }
  nlohmann::ordered_json s;
  s["check"] = report.name;
  s["summary"] = true;
  s["status"] = status_name(report.status);
  s["assertions"] = report.assertions.size();
  s["failures"] = report.failures();
  if (!report.witness.empty()) s["witness"] = report.witness;
  if (!report.notes.empty()) s["notes"] = report.notes;
  os << s.dump() << '\n';
}

#define ERGO_INSTANTIATE_VERIFY(S)                                                                                    \
  template std::vector<Observable<S>> default_family<S>(const FiniteSystem<S>&, std::span<const std::size_t>);        \
  template std::vector<Observable<S>> random_sign_functions<S>(std::size_t, std::size_t, std::uint64_t);              \
  template CheckReport check_seminorm_properties<S>(const FiniteSystem<S>&, std::span<const Observable<S>>,           \
                                                    std::span<const std::size_t>, const VerifyOptions<S>&);           \
  template CheckReport check_van_der_corput<S>(const FiniteSystem<S>&, std::span<const Observable<S>>, CubeIndex,     \
                                               Point, std::uint64_t, const VerifyOptions<S>&);                        \
  template CheckReport check_magic_extension<S>(const FiniteSystem<S>&, std::span<const std::size_t>,                 \
                                                const VerifyOptions<S>&);                                             \
  template CheckReport check_averaged_multiple<S>(const FiniteSystem<S>&, std::span<const std::vector<Observable<S>>>, \
                                                  const VerifyOptions<S>&);                                           \
  template CheckReport check_limit_formula<S>(const FiniteSystem<S>&, std::span<const std::vector<Observable<S>>>,    \
                                              const VerifyOptions<S>&);                                               \
  template CheckReport check_seminorm_limit<S>(const FiniteSystem<S>&, std::span<const Observable<S>>,                \
                                               std::span<const std::size_t>, const VerifyOptions<S>&);                \
  template CheckReport report_relative_independence<S>(const FiniteSystem<S>&, std::span<const std::size_t>,          \
                                                       const VerifyOptions<S>&);                                      \
  template CheckReport check_cube_invariant_measurability<S>(const FiniteSystem<S>&, std::span<const std::size_t>,    \
                                                             const VerifyOptions<S>&);                                \
  template std::vector<CheckReport> run_verify_suite<S>(const FiniteSystem<S>&, std::span<const Observable<S>>,       \
                                                        const SuiteOptions&);

ERGO_INSTANTIATE_VERIFY(double)
ERGO_INSTANTIATE_VERIFY(Rational)

}  // namespace ergo
