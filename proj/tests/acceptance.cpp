// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ergo/averages.hpp"
#include "ergo/config.hpp"
#include "ergo/cubes.hpp"
#include "ergo/errors.hpp"
#include "ergo/joinings.hpp"
#include "ergo/parallel.hpp"
#include "ergo/sigma.hpp"
#include "ergo/verify.hpp"

using namespace ergo;
using Q = Rational;

namespace {

struct Entry {
  std::string label;
  SystemSpec spec;
};

// 50 seeded random commuting systems, m in 2..12, d in 1..3; every fifth
// one has nonuniform weights.
std::vector<Entry> corpus() {
  std::vector<Entry> out;
  for (int i = 0; i < 50; ++i) {
    int m = 2 + (i * 7) % 11;
    int d = 1 + i % 3;
    std::string text = "random_commuting m=" + std::to_string(m) + " d=" + std::to_string(d) +
                       " seed=" + std::to_string(1000 + i);
    if (i % 5 == 4) text += " nonuniform=1";
    out.push_back({text, parse_generator_text(text)});
  }
  return out;
}

// Hand-picked systems run alongside the random ones.
std::vector<Entry> named() {
  std::vector<Entry> out;
  for (const char* text : {"cyclic_rotations q=2 steps=[1]", "cyclic_rotations q=4 steps=[1,2]",
                           "cyclic_rotations q=4 steps=[1,3]", "cyclic_rotations q=6 steps=[1,2,3]",
                           "power_system q=7 a=[1,3]", "skew_product q=3 a=1 b=1", "cyclic_rotations q=5 steps=[0,0]"})
    out.push_back({text, parse_generator_text(text)});
  SystemSpec product;
  product.generator = "product_of";
  product.factors = {parse_generator_text("cyclic_rotations q=2 steps=[1,1]"),
                     parse_generator_text("cyclic_rotations q=3 steps=[1,2]")};
  out.push_back({"product_of (Z/2, Z/3)", product});
  return out;
}

template <class S>
FiniteSystem<S> build(const Entry& e) {
  return generate_system<S>(e.spec);
}

struct Outcome {
  bool pass = true;
  std::string detail;
  std::string first_failure;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) first_failure = what;
    pass = pass && ok;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Observable<Q> ind(std::size_t m, Point x) { return Observable<Q>::indicator(m, x); }

// ---- criteria ------------------------------------------------------------------

Outcome marginals(const std::vector<Entry>& c) {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  std::size_t rows = 0;
  for (const auto& e : c) {
    auto sys = build<Q>(e);
    auto cube = host_measure(sys, transform_refs(all_axes(sys.dim())));
    rows += cube.size();
    for (std::size_t k = 0; k < cube.arity(); ++k)
      o.require(cube.marginal(k) == sys.weights(), e.label + " coordinate " + std::to_string(k));
  }
  double secs = seconds_since(t0);
  o.require(secs < 60.0, "runtime " + std::to_string(secs) + " s");
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu systems, %zu cube rows, %.2f s", c.size(), rows, secs);
  o.detail = buf;
  return o;
}

Outcome face_invariance(const std::vector<Entry>& c) {
  Outcome o;
  std::size_t maps = 0;
  for (const auto& e : c) {
    auto sys = build<Q>(e);
    std::size_t d = sys.dim();
    auto cube = host_measure(sys, transform_refs(all_axes(d)));
    for (std::size_t i = 0; i < d; ++i) {
      auto lower = face_transformation(d, i, 0, sys.transform(i));
      auto upper = face_transformation(d, i, 1, sys.transform(i));
      o.require(pushforward(cube, lower) == cube, e.label + " F" + std::to_string(i + 1) + "^0");
      o.require(pushforward(cube, upper) == cube, e.label + " F" + std::to_string(i + 1) + "^1");
      o.require(compose_maps(lower, upper) == diagonal_map(cube.arity(), sys.transform(i)),
                e.label + " F^0 F^1 vs diagonal");
      maps += 2;
    }
  }
  o.detail = std::to_string(maps) + " face maps checked";
  return o;
}

template <class S>
void seminorm_suite(const std::vector<Entry>& c, Outcome& o, std::size_t& assertions, double& worst) {
  for (const auto& e : c) {
    auto sys = build<S>(e);
    auto axes = all_axes(sys.dim());
    auto family = default_family(sys, axes);
    auto r = check_seminorm_properties<S>(sys, family, axes);
    o.require(r.status == CheckStatus::Pass, e.label + " (" + r.witness + ")");
    assertions += r.assertions.size();
    for (const auto& a : r.assertions) worst = std::max(worst, a.residual);
  }
}

Outcome seminorm_properties(const std::vector<Entry>& c) {
  Outcome o;
  std::size_t exact = 0, approx = 0;
  double worst_exact = 0, worst_float = 0;
  seminorm_suite<Q>(c, o, exact, worst_exact);
  o.require(worst_exact == 0, "nonzero exact residual");
  seminorm_suite<double>(c, o, approx, worst_float);
  o.require(worst_float < 1e-9, "float residual above 1e-9");
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu exact assertions, %zu float assertions, max float residual %.3g", exact, approx,
                worst_float);
  o.detail = buf;
  return o;
}

Outcome magic_extension(const std::vector<Entry>& c) {
  Outcome o;
  std::size_t count = 0;
  for (const auto& e : c) {
    auto sys = build<Q>(e);
    if (sys.size() > 6 || sys.dim() != 2) continue;
    ++count;
    auto axes = all_axes(2);
    auto ext = cube_extension(sys, axes);
    auto z = is_magic(ext.system, axes);
    o.require(z.magic, e.label + " extension not magic");
    // every kernel basis vector integrates to exactly zero
    auto cube = host_measure(ext.system, transform_refs(axes));
    for (const auto& b : kernel_basis(ext.system, z.z))
      o.require(integrate_uniform(cube, b) == 0, e.label + " basis vector with nonzero integral");
  }
  o.require(count > 0, "no corpus system with m <= 6 and d = 2");
  auto e3 = generate_system<Q>(parse_generator_text("cyclic_rotations q=4 steps=[1,2]"));
  auto base = is_magic(e3, all_axes(2));
  o.require(!base.magic, "E3 reported magic");
  o.require(base.witness_power == Q(1, 4), "E3 witness power " + format_scalar(base.witness_power));
  double seminorm = seminorm_from_power(base.witness_power, 2);
  o.require(std::abs(seminorm - std::sqrt(0.5)) < 1e-15, "E3 witness seminorm");
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%zu extensions magic; E3 base not magic, witness power %s, seminorm %.6f", count,
                format_scalar(base.witness_power).c_str(), seminorm);
  o.detail = buf;
  return o;
}

// Systems whose period boxes keep the N = 1..64 sweep quick.
bool small_boxes(const FiniteSystem<Q>& sys) {
  auto p = common_period(sys, all_axes(sys.dim()));
  double cells = std::pow(static_cast<double>(p), 2.0 * static_cast<double>(sys.dim()));
  return cells <= 50000;
}

Outcome van_der_corput(const std::vector<Entry>& c) {
  Outcome o;
  std::size_t systems = 0, assertions = 0;
  std::uint64_t seed = 100;
  for (const auto& e : c) {
    if (systems == 20) break;
    auto sys = build<Q>(e);
    if (!small_boxes(sys)) continue;
    ++systems;
    std::size_t d = sys.dim();
    auto fs = random_sign_functions<Q>(sys.size(), std::size_t{1} << d, seed++);
    Point x = sys.support()[seed % sys.support().size()];
    for (std::uint32_t bits = 1; bits < (1u << d); ++bits) {
      auto r = check_van_der_corput<Q>(sys, fs, CubeIndex{static_cast<unsigned>(d), bits}, x, 64);
      o.require(r.status == CheckStatus::Pass, e.label + " sigma " + CubeIndex{static_cast<unsigned>(d), bits}.to_string());
      assertions += r.assertions.size();
    }
  }
  o.require(systems == 20, "only " + std::to_string(systems) + " systems with small period boxes");
  o.detail = std::to_string(systems) + " systems, " + std::to_string(assertions) + " inequalities, 0 violations";
  if (!o.pass) o.detail = std::to_string(systems) + " systems";
  return o;
}

Outcome seminorm_limit(const std::vector<Entry>& c) {
  Outcome o;
  std::size_t assertions = 0;
  for (const auto& e : c) {
    auto sys = build<Q>(e);
    auto axes = all_axes(sys.dim());
    auto fs = default_family(sys, axes);
    auto r = check_seminorm_limit<Q>(sys, fs, axes);
    o.require(r.status == CheckStatus::Pass, e.label + " (" + r.witness + ")");
    assertions += r.assertions.size();
  }
  auto e3 = generate_system<Q>(parse_generator_text("cyclic_rotations q=4 steps=[1,2]"));
  Observable<Q> f{Q(1), Q(0), Q(-1), Q(0)};
  AverageSpec<Q> spec{AverageKind::SSigma, {f}, CubeIndex::all_ones(2), 0};
  Q lim = exact_limit(e3, spec);
  Q power = seminorm_power(e3, f, transform_refs(all_axes(2)));
  o.require(lim == Q(1, 4) && power == Q(1, 4), "E3 sides " + format_scalar(lim) + " vs " + format_scalar(power));
  o.detail = std::to_string(assertions) + " per-point identities; E3: limit " + format_scalar(lim) + ", power " +
             format_scalar(power);
  return o;
}

Outcome averaged_multiple(const std::vector<Entry>& c) {
  Outcome o;
  std::size_t ergodic = 0, assertions = 0;
  std::uint64_t seed = 500;
  for (const auto& e : c) {
    auto sys = build<Q>(e);
    if (!is_ergodic(sys, all_axes(sys.dim()))) continue;
    ++ergodic;
    std::size_t d = sys.dim(), m = sys.size();
    std::vector<std::vector<Observable<Q>>> tuples{random_sign_functions<Q>(m, d, seed++),
                                                   std::vector<Observable<Q>>(d, ind(m, 0))};
    auto r = check_averaged_multiple<Q>(sys, tuples);
    o.require(r.status == CheckStatus::Pass, e.label + " (" + r.witness + ")");
    assertions += r.assertions.size();
  }
  auto e4 = generate_system<Q>(parse_generator_text("cyclic_rotations q=4 steps=[1,3]"));
  std::vector<Observable<Q>> fs(2, ind(4, 0));
  AverageSpec<Q> spec{AverageKind::AveragedMultiple, fs, {}, 0};
  Q lim = exact_limit(e4, spec);
  Q integral = integrate_tensor<Q>(furstenberg_joining(e4), std::span<const Observable<Q>>(fs));
  o.require(lim == Q(1, 8) && integral == Q(1, 8), "E4 sides " + format_scalar(lim) + " vs " + format_scalar(integral));
  o.detail = std::to_string(ergodic) + " ergodic systems, " + std::to_string(assertions) + " assertions; E4: " +
             format_scalar(lim);
  return o;
}

Outcome limit_formula(const std::vector<Entry>& c) {
  Outcome o;
  std::size_t assertions = 0;
  std::uint64_t seed = 900;
  for (const auto& e : c) {
    auto sys = build<Q>(e);
    std::size_t d = sys.dim(), m = sys.size();
    std::vector<std::vector<Observable<Q>>> tuples{random_sign_functions<Q>(m, d, seed++)};
    auto r = check_limit_formula<Q>(sys, tuples);
    o.require(r.status == CheckStatus::Pass, e.label + " (" + r.witness + ")");
    assertions += r.assertions.size();
  }
  o.detail = std::to_string(assertions) + " assertions (per-point limits, R-orbits, mixture, projection)";
  return o;
}

Outcome convergence(const std::vector<Entry>& c) {
  Outcome o;
  std::size_t finite = 0;
  std::uint64_t seed = 1300;
  for (const auto& e : c) {
    auto sys = build<Q>(e);
    std::size_t d = sys.dim(), m = sys.size();
    for (auto kind : {AverageKind::Multiple, AverageKind::AveragedMultiple}) {
      AverageSpec<Q> spec{kind, random_sign_functions<Q>(m, d, seed++), {}, sys.support().front()};
      auto box = AverageBox<Q>::build(sys, spec);
      std::uint64_t p = box.period();
      std::vector<std::uint64_t> grid{p, 2 * p, 3 * p, 5 * p};
      auto rep = convergence_report(sys, spec, grid);
      o.require(rep.tail.front() == 0 && rep.converged, e.label + " tail at the joint period");
      ++finite;
    }
  }

  // rational rotations against Z/q
  std::size_t streams = 0;
  struct Rot {
    std::vector<std::int64_t> steps;
    std::int64_t q;
  };
  for (const Rot& r : {Rot{{1}, 5}, Rot{{3}, 7}, Rot{{1, 2}, 4}, Rot{{2, 5}, 9}, Rot{{1, 3}, 8}}) {
    std::vector<double> alphas;
    std::string steps;
    for (auto s : r.steps) {
      alphas.push_back(static_cast<double>(s) / static_cast<double>(r.q));
      steps += (steps.empty() ? "" : ",") + std::to_string(s);
    }
    auto stream = rotation_stream(alphas);
    auto sys = generate_system<double>(
        parse_generator_text("cyclic_rotations q=" + std::to_string(r.q) + " steps=[" + steps + "]"));
    std::size_t d = r.steps.size();
    double cell = 1.0 / static_cast<double>(r.q);
    std::vector<double> x0{0.5 * cell};
    // cell j of the circle is point j of Z/q; x0 sits in cell 0
    std::vector<StreamFunction> sf;
    std::vector<Observable<double>> ff;
    for (std::size_t i = 0; i < d; ++i) {
      StreamFunction f;
      f.kind = StreamFunction::Kind::Interval;
      f.lo = static_cast<double>(i) * cell;
      f.hi = static_cast<double>(i + 1) * cell;
      sf.push_back(f);
      ff.push_back(Observable<double>::indicator(static_cast<std::size_t>(r.q), static_cast<Point>(i)));
    }
    std::vector<std::uint64_t> grid;
    for (std::uint64_t k = 1; k <= 64; k *= 2) grid.push_back(k * static_cast<std::uint64_t>(r.q));
    auto rep = stream_average(stream, AverageKind::Multiple, sf, x0, grid);
    AverageSpec<double> spec{AverageKind::Multiple, ff, {}, 0};
    double lim = exact_limit(sys, spec);
    for (double v : rep.values) o.require(std::abs(v - lim) <= 1e-9, "rotation p/q=" + steps + "/" + std::to_string(r.q));
    // cubic average as well: vertices ε ≠ 0 get cell indicators
    std::vector<StreamFunction> cub(std::size_t{1} << d);
    std::vector<Observable<double>> cubf(std::size_t{1} << d, Observable<double>::constant(static_cast<std::size_t>(r.q), 1.0));
    for (std::size_t v = 1; v < cub.size(); ++v) {
      cub[v].kind = StreamFunction::Kind::Interval;
      cub[v].lo = 0;
      cub[v].hi = static_cast<double>(v % 2 + 1) * cell;
      cubf[v] = Observable<double>::constant(static_cast<std::size_t>(r.q), 0.0);
      cubf[v][0] = 1;
      if (v % 2) cubf[v][1] = 1;
    }
    std::vector<std::uint64_t> cgrid{static_cast<std::uint64_t>(r.q), 4 * static_cast<std::uint64_t>(r.q)};
    auto crep = stream_average(stream, AverageKind::Cubic, cub, x0, cgrid);
    AverageSpec<double> cspec{AverageKind::Cubic, cubf, {}, 0};
    double clim = exact_limit(sys, cspec);
    for (double v : crep.values) o.require(std::abs(v - clim) <= 1e-9, "cubic rotation " + steps + "/" + std::to_string(r.q));
    ++streams;
  }

  // irrational rotations: diagnostic oscillation tails over the default grid
  std::string tails;
  for (const auto& alphas : {std::vector<double>{0.6180339887498949}, std::vector<double>{std::sqrt(2.0) - 1, std::sqrt(3.0) - 1}}) {
    auto stream = rotation_stream(alphas);
    std::vector<StreamFunction> sf;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      StreamFunction f;
      f.kind = StreamFunction::Kind::Cosine;
      f.freq = {1};
      sf.push_back(f);
    }
    std::vector<double> x0{0.1};
    auto grid = default_grid();
    auto rep = stream_average(stream, AverageKind::Multiple, sf, x0, grid);
    for (std::size_t i = 1; i < rep.tail.size(); ++i) o.require(rep.tail[i] <= rep.tail[i - 1], "tail increased");
    // the last tail is trivially 0; the one before it spans two grid points
    o.require(rep.tail[rep.tail.size() - 2] < rep.tail.front(), "tail did not decrease");
    o.require(!rep.converged && !rep.exact_limit, "stream report claimed convergence");
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s%.3g->%.3g (value %.2g at N=%llu)", tails.empty() ? "" : ", ",
                  rep.tail.front(), rep.tail[rep.tail.size() - 2], rep.values.back(),
                  static_cast<unsigned long long>(rep.grid.back()));
    tails += buf;
  }
  o.detail = std::to_string(finite) + " finite reports with tail 0 at the period, " + std::to_string(streams) +
             " rational rotations within 1e-9, irrational tails " + tails;
  return o;
}

Outcome determinism(const std::vector<Entry>& c) {
  Outcome o;
  std::vector<Entry> picks;
  for (std::size_t i = 0; i < c.size(); i += 6) picks.push_back(c[i]);
  std::size_t bytes = 0;
  auto render = [&](const Entry& e) {
    std::ostringstream os;
    auto sys = build<Q>(e);
    SuiteOptions opts;
    opts.nmax = 16;
    std::vector<Observable<Q>> none;
    for (const auto& r : run_verify_suite<Q>(sys, none, opts)) write_check_records(os, r);
    auto fsys = build<double>(e);
    std::vector<Observable<double>> fnone;
    for (const auto& r : run_verify_suite<double>(fsys, fnone, opts)) write_check_records(os, r);
    return os.str();
  };
  for (const auto& e : picks) {
    set_thread_count(1);
    std::string one = render(e);
    set_thread_count(8);
    std::string eight = render(e);
    set_thread_count(1);
    o.require(one == eight, e.label + " output differs");
    o.require(one.find("\"status\":\"fail\"") == std::string::npos, e.label + " suite has failures");
    bytes += one.size();
  }
  o.detail = std::to_string(picks.size()) + " systems, " + std::to_string(bytes) + " bytes identical at 1 and 8 threads";
  return o;
}

}  // namespace

int main() {
  auto c = corpus();
  for (auto& e : named()) c.push_back(std::move(e));
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> criteria{
      {"1 host-measure marginals", [&] { return marginals(c); }},
      {"2 face invariance", [&] { return face_invariance(c); }},
      {"3 seminorm properties", [&] { return seminorm_properties(c); }},
      {"4 magic extension", [&] { return magic_extension(c); }},
      {"5 van der Corput bound", [&] { return van_der_corput(c); }},
      {"6 seminorm limit", [&] { return seminorm_limit(c); }},
      {"7 averaged multiple limit", [&] { return averaged_multiple(c); }},
      {"8 pointwise limit formula", [&] { return limit_formula(c); }},
      {"9 convergence at desk scale", [&] { return convergence(c); }},
      {"10 determinism across threads", [&] { return determinism(c); }},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.first_failure = std::string("error: ") + e.what();
    }
    double secs = seconds_since(t0);
    std::printf("%s  %s  [%s] (%.2f s)%s%s\n", o.pass ? "PASS" : "FAIL", cr.name, o.detail.c_str(), secs,
                o.pass ? "" : "  first failure: ", o.first_failure.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
