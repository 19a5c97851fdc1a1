#include "ergo/averages.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>

#include "ergo/errors.hpp"
#include "ergo/parallel.hpp"

namespace ergo {

std::string_view average_kind_name(AverageKind kind) {
  switch (kind) {
    case AverageKind::Multiple: return "multiple";
    case AverageKind::Cubic: return "cubic";
    case AverageKind::AveragedMultiple: return "averaged_multiple";
    case AverageKind::AveragedCubic: return "averaged_cubic";
    case AverageKind::SSigma: return "s_sigma";
  }
  return "?";
}

std::optional<AverageKind> parse_average_kind(std::string_view name) {
  for (auto k : {AverageKind::Multiple, AverageKind::Cubic, AverageKind::AveragedMultiple, AverageKind::AveragedCubic,
                 AverageKind::SSigma})
    if (average_kind_name(k) == name) return k;
  return std::nullopt;
}

template <class S>
std::vector<Point> group_orbit(const FiniteSystem<S>& sys, Point x) {
  if (x >= sys.size()) fail(ErrorCode::InvalidArgument, "base point " + std::to_string(x) + " out of range");
  std::vector<char> seen(sys.size(), 0);
  std::vector<Point> orbit{x};
  seen[x] = 1;
  for (std::size_t head = 0; head < orbit.size(); ++head) {
    for (std::size_t i = 0; i < sys.dim(); ++i) {
      Point y = sys.apply(i, orbit[head]);
      if (!seen[y]) {
        seen[y] = 1;
        orbit.push_back(y);
      }
    }
  }
  return orbit;
}

namespace {

template <class S>
std::vector<std::uint64_t> orbit_periods(const FiniteSystem<S>& sys, Point x) {
  auto orbit = group_orbit(sys, x);
  std::vector<std::uint64_t> out(sys.dim(), 1);
  for (std::size_t i = 0; i < sys.dim(); ++i)
    for (Point y : orbit) out[i] = lcm_checked(out[i], sys.cycles(i).cycle_length(y));
  return out;
}

template <class S>
void check_observable(const FiniteSystem<S>& sys, const Observable<S>& f) {
  if (f.size() != sys.size())
    fail(ErrorCode::ArityMismatch, "observable has " + std::to_string(f.size()) + " values, system has " +
                                       std::to_string(sys.size()) + " points");
}

}  // namespace

namespace detail {

// Shared builder: periods per index, tuple arity, per-coordinate functions and
// the cell -> tuple map.
template <class S>
struct BoxPlan {
  std::vector<std::uint64_t> periods;
  std::size_t arity = 0;
  std::vector<const Observable<S>*> fs;
  std::function<void(const std::uint64_t*, Point*)> fill;
};

}  // namespace detail

template <class S>
static void build_from_plan(detail::BoxPlan<S>& plan, std::size_t cap,
                            std::vector<std::uint64_t>& periods_out, std::uint64_t& period_out,
                            std::vector<std::uint32_t>& cells_out, std::vector<S>& products_out,
                            std::vector<std::uint64_t>& counts_out, std::vector<Point>& tuples_out) {
  std::size_t cells = 1;
  std::uint64_t period = 1;
  for (auto p : plan.periods) {
    if (p == 0 || cells > cap / p) fail(ErrorCode::SupportExplosion, "period box exceeds " + std::to_string(cap) + " cells");
    cells *= p;
    period = lcm_checked(period, p);
  }
  std::size_t dims = plan.periods.size();
  TupleSet tuples(plan.arity);
  cells_out.resize(cells);
  std::vector<std::uint64_t> digit(dims, 0);
  std::vector<Point> tuple(plan.arity);
  for (std::size_t c = 0; c < cells; ++c) {
    plan.fill(digit.data(), tuple.data());
    std::size_t before = tuples.size();
    std::size_t id = tuples.insert(tuple);
    if (tuples.size() > before) counts_out.push_back(0);
    ++counts_out[id];
    cells_out[c] = static_cast<std::uint32_t>(id);
    for (std::size_t j = dims; j-- > 0;) {
      if (++digit[j] < plan.periods[j]) break;
      digit[j] = 0;
    }
  }
  products_out.resize(tuples.size());
  for (std::size_t t = 0; t < tuples.size(); ++t) {
    auto row = tuples.row(t);
    S prod = 1;
    for (std::size_t c = 0; c < plan.arity; ++c)
      if (plan.fs[c]) prod *= (*plan.fs[c])[row[c]];
    products_out[t] = std::move(prod);
  }
  periods_out = plan.periods;
  period_out = period;
  tuples_out = tuples.data();
}

template <class S>
AverageBox<S> AverageBox<S>::cube(const FiniteSystem<S>& sys, std::span<const Observable<S>* const> fs, Point x,
                                  std::size_t cap) {
  std::size_t d = sys.dim();
  std::size_t arity = std::size_t{1} << d;
  if (fs.size() != arity) fail(ErrorCode::ArityMismatch, "cube average needs one slot per vertex");
  for (const auto* f : fs)
    if (f) check_observable(sys, *f);
  detail::BoxPlan<S> plan;
  plan.periods = orbit_periods(sys, x);
  plan.arity = arity;
  plan.fs.assign(fs.begin(), fs.end());
  plan.fill = [&sys, x, d, arity](const std::uint64_t* r, Point* out) {
    for (std::size_t e = 0; e < arity; ++e) {
      Point p = x;
      for (std::size_t i = 0; i < d; ++i)
        if ((e >> i) & 1u) p = sys.apply_power(i, p, static_cast<std::int64_t>(r[i]));
      out[e] = p;
    }
  };
  AverageBox box;
  box.arity_ = plan.arity;
  build_from_plan(plan, cap, box.periods_, box.period_, box.cell_tuple_, box.products_, box.cell_counts_,
                  box.tuple_coords_);
  return box;
}

template <class S>
AverageBox<S> AverageBox<S>::build(const FiniteSystem<S>& sys, const AverageSpec<S>& spec, std::size_t cap) {
  std::size_t d = sys.dim();
  Point x = spec.x;
  if (x >= sys.size()) fail(ErrorCode::InvalidArgument, "base point " + std::to_string(x) + " out of range");
  for (const auto& f : spec.functions)
    if (f.size() != 0 || spec.kind != AverageKind::Cubic) check_observable(sys, f);
  auto ell = orbit_periods(sys, x);
  std::size_t vertices = std::size_t{1} << d;
  detail::BoxPlan<S> plan;

  auto need = [&](std::size_t n) {
    if (spec.functions.size() != n)
      fail(ErrorCode::ArityMismatch, std::string(average_kind_name(spec.kind)) + " average needs " + std::to_string(n) +
                                         " functions, got " + std::to_string(spec.functions.size()));
  };

  switch (spec.kind) {
    case AverageKind::Multiple: {
      need(d);
      std::uint64_t period = 1;
      for (std::size_t i = 0; i < d; ++i) period = lcm_checked(period, sys.cycles(i).cycle_length(x));
      plan.periods = {period};
      plan.arity = d;
      for (const auto& f : spec.functions) plan.fs.push_back(&f);
      plan.fill = [&sys, x, d](const std::uint64_t* r, Point* out) {
        for (std::size_t i = 0; i < d; ++i) out[i] = sys.apply_power(i, x, static_cast<std::int64_t>(r[0]));
      };
      break;
    }
    case AverageKind::Cubic: {
      need(vertices);
      std::vector<const Observable<S>*> fs{nullptr};
      for (std::size_t e = 1; e < vertices; ++e) {
        check_observable(sys, spec.functions[e]);
        fs.push_back(&spec.functions[e]);
      }
      return cube(sys, fs, x, cap);
    }
    case AverageKind::AveragedMultiple: {
      need(d);
      std::uint64_t all = 1;
      for (auto l : ell) all = lcm_checked(all, l);
      plan.periods = ell;
      plan.periods.push_back(all);
      plan.arity = d;
      for (const auto& f : spec.functions) plan.fs.push_back(&f);
      plan.fill = [&sys, x, d](const std::uint64_t* r, Point* out) {
        Point y = x;
        for (std::size_t i = 0; i < d; ++i) y = sys.apply_power(i, y, static_cast<std::int64_t>(r[i]));
        for (std::size_t j = 0; j < d; ++j) out[j] = sys.apply_power(j, y, static_cast<std::int64_t>(r[d]));
      };
      break;
    }
    case AverageKind::AveragedCubic: {
      need(vertices);
      plan.periods = ell;
      plan.periods.insert(plan.periods.end(), ell.begin(), ell.end());
      plan.arity = vertices;
      for (const auto& f : spec.functions) plan.fs.push_back(&f);
      plan.fill = [&sys, x, d, vertices](const std::uint64_t* r, Point* out) {
        Point y = x;
        for (std::size_t i = 0; i < d; ++i) y = sys.apply_power(i, y, static_cast<std::int64_t>(r[i]));
        for (std::size_t e = 0; e < vertices; ++e) {
          Point p = y;
          for (std::size_t i = 0; i < d; ++i)
            if ((e >> i) & 1u) p = sys.apply_power(i, p, static_cast<std::int64_t>(r[d + i]));
          out[e] = p;
        }
      };
      break;
    }
    case AverageKind::SSigma: {
      need(1);
      if (spec.sigma.dim != d) fail(ErrorCode::InvalidArgument, "sigma must have one digit per generator");
      if (spec.sigma.bits == 0) fail(ErrorCode::InvalidArgument, "sigma must be nonzero");
      std::vector<std::size_t> axes;
      for (unsigned i = 0; i < d; ++i)
        if (spec.sigma.bit(i)) axes.push_back(i);
      std::size_t k = axes.size();
      for (std::size_t axis : axes) {
        plan.periods.push_back(ell[axis]);  // m_i
        plan.periods.push_back(ell[axis]);  // p_i = m_i + n_i
      }
      plan.arity = std::size_t{1} << k;
      plan.fs.assign(plan.arity, &spec.functions[0]);
      plan.fill = [&sys, x, axes, k](const std::uint64_t* r, Point* out) {
        for (std::size_t e = 0; e < (std::size_t{1} << k); ++e) {
          Point p = x;
          for (std::size_t t = 0; t < k; ++t)
            p = sys.apply_power(axes[t], p, static_cast<std::int64_t>(((e >> t) & 1u) ? r[2 * t + 1] : r[2 * t]));
          out[e] = p;
        }
      };
      break;
    }
  }
  AverageBox box;
  box.arity_ = plan.arity;
  build_from_plan(plan, cap, box.periods_, box.period_, box.cell_tuple_, box.products_, box.cell_counts_,
                  box.tuple_coords_);
  return box;
}

template <class S>
std::vector<Count> AverageBox<S>::tuple_weights(std::uint64_t n) const {
  if (n == 0) fail(ErrorCode::InvalidArgument, "average length N must be at least 1");
  std::size_t dims = periods_.size();
  std::vector<std::vector<Count>> w(dims);
  for (std::size_t j = 0; j < dims; ++j) {
    w[j].resize(periods_[j]);
    for (std::uint64_t r = 0; r < periods_[j]; ++r) w[j][r] = r < n ? Count((n - 1 - r) / periods_[j] + 1) : Count(0);
  }
  std::vector<Count> acc(products_.size(), 0);
  std::vector<std::uint64_t> digit(dims, 0);
  std::vector<Count> prefix(dims + 1, 1);
  for (std::size_t j = 0; j < dims; ++j) prefix[j + 1] = prefix[j] * w[j][0];
  for (std::size_t c = 0; c < cell_tuple_.size(); ++c) {
    if (prefix[dims] != 0) acc[cell_tuple_[c]] += prefix[dims];
    std::size_t j = dims;
    while (j-- > 0) {
      if (++digit[j] < periods_[j]) break;
      digit[j] = 0;
    }
    if (j == static_cast<std::size_t>(-1)) break;
    for (std::size_t t = j; t < dims; ++t) prefix[t + 1] = prefix[t] * w[t][digit[t]];
  }
  return acc;
}

namespace {

Count power_count(std::uint64_t n, std::size_t dims) {
  Count total = 1;
  for (std::size_t j = 0; j < dims; ++j) {
    if (total > (~Count{0}) / n) fail(ErrorCode::CapExceeded, "N^D overflows the count type");
    total *= n;
  }
  return total;
}

template <class S>
std::vector<S> products_for(const std::vector<Point>& coords, std::size_t arity,
                            std::span<const Observable<S>* const> fs) {
  if (fs.size() != arity) fail(ErrorCode::ArityMismatch, "one function slot per tuple coordinate expected");
  std::size_t rows = arity == 0 ? 0 : coords.size() / arity;
  std::vector<S> out(rows);
  for (std::size_t t = 0; t < rows; ++t) {
    S prod = 1;
    for (std::size_t c = 0; c < arity; ++c)
      if (fs[c]) prod *= (*fs[c])[coords[t * arity + c]];
    out[t] = std::move(prod);
  }
  return out;
}

template <class S>
S weighted_sum(const std::vector<Count>& weights, const std::vector<S>& products) {
  S sum = 0;
  for (std::size_t t = 0; t < weights.size(); ++t)
    if (weights[t] != 0) sum += from_count<S>(weights[t]) * products[t];
  return sum;
}

}  // namespace

template <class S>
S AverageBox<S>::value(std::uint64_t n) const {
  Count total = power_count(n, periods_.size());
  return weighted_sum(tuple_weights(n), products_) / from_count<S>(total);
}

template <class S>
S AverageBox<S>::value_with(std::uint64_t n, std::span<const Observable<S>* const> fs) const {
  Count total = power_count(n, periods_.size());
  return weighted_sum(tuple_weights(n), products_for<S>(tuple_coords_, arity_, fs)) / from_count<S>(total);
}

template <class S>
S AverageBox<S>::limit() const {
  std::vector<Count> w(cell_counts_.begin(), cell_counts_.end());
  return weighted_sum(w, products_) / from_count<S>(cell_tuple_.size());
}

template <class S>
S AverageBox<S>::limit_with(std::span<const Observable<S>* const> fs) const {
  std::vector<Count> w(cell_counts_.begin(), cell_counts_.end());
  return weighted_sum(w, products_for<S>(tuple_coords_, arity_, fs)) / from_count<S>(cell_tuple_.size());
}

template <class S>
SparseJoining<S> AverageBox<S>::limit_measure(std::size_t base_points) const {
  std::vector<S> masses;
  S cells = from_count<S>(cell_tuple_.size());
  for (auto c : cell_counts_) masses.push_back(from_count<S>(c) / cells);
  return SparseJoining<S>::from_rows(arity_, base_points, tuple_coords_, std::move(masses));
}

template <class S>
S evaluate_average(const FiniteSystem<S>& sys, const AverageSpec<S>& spec, std::uint64_t n) {
  return AverageBox<S>::build(sys, spec).value(n);
}

template <class S>
S multiple_average(const FiniteSystem<S>& sys, std::span<const Observable<S>> fs, Point x, std::uint64_t n) {
  AverageSpec<S> spec{AverageKind::Multiple, {fs.begin(), fs.end()}, {}, x};
  return evaluate_average(sys, spec, n);
}

template <class S>
S cubic_average(const FiniteSystem<S>& sys, std::span<const Observable<S>> fs, Point x, std::uint64_t n) {
  AverageSpec<S> spec{AverageKind::Cubic, {Observable<S>{}}, {}, x};
  spec.functions.insert(spec.functions.end(), fs.begin(), fs.end());
  return evaluate_average(sys, spec, n);
}

template <class S>
S averaged_multiple_average(const FiniteSystem<S>& sys, std::span<const Observable<S>> fs, Point x,
                            std::uint64_t n) {
  AverageSpec<S> spec{AverageKind::AveragedMultiple, {fs.begin(), fs.end()}, {}, x};
  return evaluate_average(sys, spec, n);
}

template <class S>
S averaged_cubic_average(const FiniteSystem<S>& sys, std::span<const Observable<S>> fs, Point x, std::uint64_t n) {
  AverageSpec<S> spec{AverageKind::AveragedCubic, {fs.begin(), fs.end()}, {}, x};
  return evaluate_average(sys, spec, n);
}

template <class S>
S s_sigma_statistic(const FiniteSystem<S>& sys, const Observable<S>& f, CubeIndex sigma, Point x, std::uint64_t n) {
  AverageSpec<S> spec{AverageKind::SSigma, {f}, sigma, x};
  return evaluate_average(sys, spec, n);
}

template <class S>
S exact_limit(const FiniteSystem<S>& sys, const AverageSpec<S>& spec, std::size_t cap) {
  return AverageBox<S>::build(sys, spec, cap).limit();
}

namespace {

void check_grid(std::span<const std::uint64_t> grid) {
  if (grid.empty()) fail(ErrorCode::InvalidArgument, "empty N grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] == 0) fail(ErrorCode::InvalidArgument, "grid values must be at least 1");
    if (i > 0 && grid[i] <= grid[i - 1]) fail(ErrorCode::InvalidArgument, "grid must be strictly increasing");
  }
}

template <class S>
void fill_tails(ConvergenceReport<S>& r) {
  std::size_t n = r.values.size();
  r.tail.assign(n, S(0));
  S lo = r.values[n - 1], hi = r.values[n - 1];
  for (std::size_t i = n; i-- > 0;) {
    if (r.values[i] < lo) lo = r.values[i];
    if (hi < r.values[i]) hi = r.values[i];
    r.tail[i] = hi - lo;
  }
}

}  // namespace

template <class S>
ConvergenceReport<S> convergence_report(const FiniteSystem<S>& sys, const AverageSpec<S>& spec,
                                        std::span<const std::uint64_t> grid, std::size_t cap) {
  check_grid(grid);
  auto box = AverageBox<S>::build(sys, spec, cap);
  ConvergenceReport<S> r;
  r.grid.assign(grid.begin(), grid.end());
  r.values.assign(grid.size(), S(0));
  parallel_for(grid.size(), [&](std::size_t i) { r.values[i] = box.value(grid[i]); });
  fill_tails(r);
  r.exact_limit = box.limit();
  S gap = abs_value(S(r.values.back() - *r.exact_limit));
  r.converged = to_double(gap) <= kFloatTolerance;
  return r;
}

template <class S>
void write_report_csv(std::ostream& os, const ConvergenceReport<S>& report) {
  os << "N,value,tail,exact_limit\n";
  for (std::size_t i = 0; i < report.grid.size(); ++i) {
    os << report.grid[i] << ',' << format_scalar(report.values[i]) << ',' << format_scalar(report.tail[i]) << ',';
    if (report.exact_limit) os << format_scalar(*report.exact_limit);
    os << '\n';
  }
}

std::vector<std::uint64_t> default_grid() {
  std::vector<std::uint64_t> g;
  for (std::uint64_t n = 16; n <= 4096; n *= 2) g.push_back(n);
  return g;
}

// ---- sampled-orbit mode -------------------------------------------------

void TorusMap::apply(std::span<const double> in, std::span<double> out) const {
  for (std::size_t r = 0; r < matrix.size(); ++r) {
    double v = shift[r];
    for (std::size_t c = 0; c < in.size(); ++c)
      if (matrix[r][c] != 0) v += static_cast<double>(matrix[r][c]) * in[c];
    v -= std::floor(v);
    if (v >= 1.0) v = 0.0;
    out[r] = v;
  }
}

StreamSystem rotation_stream(std::span<const double> alphas) {
  StreamSystem s;
  s.space_dim = 1;
  for (double a : alphas) s.maps.push_back({{{1}}, {a - std::floor(a)}});
  return s;
}

StreamSystem skew_stream(double alpha, double beta) {
  StreamSystem s;
  s.space_dim = 2;
  s.maps.push_back({{{1, 0}, {1, 1}}, {alpha, 0.0}});
  s.maps.push_back({{{1, 0}, {0, 1}}, {0.0, beta}});
  return s;
}

double StreamFunction::operator()(std::span<const double> x) const {
  switch (kind) {
    case Kind::Constant: return value;
    case Kind::Cosine:
    case Kind::Sine: {
      double phase = 0;
      for (std::size_t i = 0; i < freq.size() && i < x.size(); ++i) phase += static_cast<double>(freq[i]) * x[i];
      phase *= 2 * std::numbers::pi;
      return kind == Kind::Cosine ? std::cos(phase) : std::sin(phase);
    }
    case Kind::Interval: return (x[coord] >= lo && x[coord] < hi) ? 1.0 : 0.0;
  }
  return 0;
}

namespace {

void check_stream_shape(const StreamSystem& stream) {
  if (stream.maps.empty()) fail(ErrorCode::InvalidArgument, "stream needs at least one map");
  for (const auto& m : stream.maps) {
    if (m.matrix.size() != stream.space_dim || m.shift.size() != stream.space_dim)
      fail(ErrorCode::ArityMismatch, "torus map does not match the space dimension");
    for (const auto& row : m.matrix)
      if (row.size() != stream.space_dim) fail(ErrorCode::ArityMismatch, "torus map matrix is not square");
  }
}

double torus_gap(double a, double b) {
  double g = std::fabs(a - b);
  return std::min(g, 1.0 - g);
}

}  // namespace

void check_stream_commutation(const StreamSystem& stream, std::uint64_t seed) {
  check_stream_shape(stream);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t n = stream.space_dim;
  std::vector<double> x(n), a(n), b(n), c(n);
  for (int sample = 0; sample < 32; ++sample) {
    for (double& v : x) v = unit(rng);
    for (std::size_t i = 0; i < stream.maps.size(); ++i)
      for (std::size_t j = i + 1; j < stream.maps.size(); ++j) {
        stream.maps[j].apply(x, a);
        stream.maps[i].apply(a, b);
        stream.maps[i].apply(x, a);
        stream.maps[j].apply(a, c);
        for (std::size_t r = 0; r < n; ++r)
          if (torus_gap(b[r], c[r]) > kFloatTolerance)
            fail(ErrorCode::NonCommutingStream, "maps " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                                                    " do not commute (sample " + std::to_string(sample) + ")");
      }
  }
}

ConvergenceReport<double> stream_average(const StreamSystem& stream, AverageKind kind,
                                         std::span<const StreamFunction> fs, std::span<const double> x0,
                                         std::span<const std::uint64_t> grid, std::size_t cap) {
  check_stream_commutation(stream);
  check_grid(grid);
  std::size_t d = stream.maps.size();
  std::size_t n = stream.space_dim;
  if (x0.size() != n) fail(ErrorCode::ArityMismatch, "start point does not match the space dimension");
  std::uint64_t nmax = grid.back();
  std::vector<double> bucket(nmax, 0.0);  // contribution of index vectors with max(n) = M

  if (kind == AverageKind::Multiple) {
    if (fs.size() != d) fail(ErrorCode::ArityMismatch, "multiple stream average needs one function per map");
    std::vector<std::vector<double>> y(d, std::vector<double>(x0.begin(), x0.end()));
    std::vector<double> tmp(n);
    for (std::uint64_t k = 0; k < nmax; ++k) {
      double term = 1;
      for (std::size_t i = 0; i < d; ++i) term *= fs[i](y[i]);
      bucket[k] = term;
      for (std::size_t i = 0; i < d; ++i) {
        stream.maps[i].apply(y[i], tmp);
        y[i].swap(tmp);
      }
    }
  } else if (kind == AverageKind::Cubic) {
    std::size_t vertices = std::size_t{1} << d;
    if (fs.size() != vertices) fail(ErrorCode::ArityMismatch, "cubic stream average needs one slot per vertex");
    double work = std::pow(static_cast<double>(nmax), static_cast<double>(d));
    if (work > static_cast<double>(cap)) fail(ErrorCode::CapExceeded, "cubic stream grid too large for this dimension");
    // levels[i] holds the 2^d vertex points while axis i is being swept
    std::vector<std::vector<double>> levels(d + 1, std::vector<double>(vertices * n));
    for (std::size_t e = 0; e < vertices; ++e) std::copy(x0.begin(), x0.end(), levels[0].begin() + e * n);
    std::vector<double> tmp(n);
    std::function<void(std::size_t, std::uint64_t)> sweep = [&](std::size_t axis, std::uint64_t top) {
      if (axis == d) {
        double term = 1;
        for (std::size_t e = 1; e < vertices; ++e)
          term *= fs[e](std::span<const double>(levels[d].data() + e * n, n));
        bucket[top] += term;
        return;
      }
      auto& cur = levels[axis + 1];
      cur = levels[axis];
      for (std::uint64_t k = 0; k < nmax; ++k) {
        sweep(axis + 1, std::max(top, k));
        for (std::size_t e = 0; e < vertices; ++e) {
          if (!((e >> axis) & 1u)) continue;
          std::span<double> pt(cur.data() + e * n, n);
          stream.maps[axis].apply(pt, tmp);
          std::copy(tmp.begin(), tmp.end(), pt.begin());
        }
      }
    };
    sweep(0, 0);
  } else {
    fail(ErrorCode::InvalidArgument, "stream mode supports multiple and cubic averages only");
  }

  std::size_t dims = kind == AverageKind::Multiple ? 1 : d;
  ConvergenceReport<double> r;
  r.grid.assign(grid.begin(), grid.end());
  double running = 0;
  std::size_t gi = 0;
  for (std::uint64_t k = 0; k < nmax && gi < grid.size(); ++k) {
    running += bucket[k];
    if (k + 1 == grid[gi]) {
      r.values.push_back(running / std::pow(static_cast<double>(grid[gi]), static_cast<double>(dims)));
      ++gi;
    }
  }
  fill_tails(r);
  return r;
}

#define ERGO_INSTANTIATE_AVERAGES(S)                                                                                 \
  template class AverageBox<S>;                                                                                      \
  template std::vector<Point> group_orbit<S>(const FiniteSystem<S>&, Point);                                         \
  template S evaluate_average<S>(const FiniteSystem<S>&, const AverageSpec<S>&, std::uint64_t);                      \
  template S multiple_average<S>(const FiniteSystem<S>&, std::span<const Observable<S>>, Point, std::uint64_t);      \
  template S cubic_average<S>(const FiniteSystem<S>&, std::span<const Observable<S>>, Point, std::uint64_t);         \
  template S averaged_multiple_average<S>(const FiniteSystem<S>&, std::span<const Observable<S>>, Point,             \
                                          std::uint64_t);                                                            \
  template S averaged_cubic_average<S>(const FiniteSystem<S>&, std::span<const Observable<S>>, Point, std::uint64_t); \
  template S s_sigma_statistic<S>(const FiniteSystem<S>&, const Observable<S>&, CubeIndex, Point, std::uint64_t);    \
  template S exact_limit<S>(const FiniteSystem<S>&, const AverageSpec<S>&, std::size_t);                             \
  template ConvergenceReport<S> convergence_report<S>(const FiniteSystem<S>&, const AverageSpec<S>&,                 \
                                                      std::span<const std::uint64_t>, std::size_t);                  \
  template void write_report_csv<S>(std::ostream&, const ConvergenceReport<S>&);

ERGO_INSTANTIATE_AVERAGES(double)
ERGO_INSTANTIATE_AVERAGES(Rational)

}  // namespace ergo
