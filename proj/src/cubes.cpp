#include "ergo/cubes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ergo/errors.hpp"
#include "ergo/parallel.hpp"

namespace ergo {

namespace {

bool tuple_less(const Point* a, const Point* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

int tuple_cmp(const Point* a, const Point* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  return 0;
}

template <class S>
bool nonzero(const S& v) {
  return !(v == 0);
}

constexpr std::size_t kIntegrationBlock = 1 << 16;

}  // namespace

CubeIndex CubeIndex::parse(std::string_view text) {
  if (text.empty() || text.size() > 16) fail(ErrorCode::InvalidArgument, "cube index must have 1..16 binary digits");
  CubeIndex c{static_cast<unsigned>(text.size()), 0};
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1')
      c.bits |= std::uint32_t{1} << i;
    else if (text[i] != '0')
      fail(ErrorCode::InvalidArgument, "cube index '" + std::string(text) + "' is not binary");
  }
  return c;
}

std::string CubeIndex::to_string() const {
  std::string s(dim, '0');
  for (unsigned i = 0; i < dim; ++i)
    if (bit(i)) s[i] = '1';
  return s;
}

template <class S>
SparseJoining<S> SparseJoining<S>::from_rows(std::size_t arity, std::size_t base_points, std::vector<Point> coords,
                                             std::vector<S> masses) {
  if (arity == 0) fail(ErrorCode::InvalidArgument, "joining arity must be positive");
  if (coords.size() != arity * masses.size()) fail(ErrorCode::ArityMismatch, "coordinate count is not arity * rows");
  for (Point p : coords)
    if (p >= base_points) fail(ErrorCode::InvalidArgument, "tuple coordinate " + std::to_string(p) + " out of range");

  std::size_t n = masses.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const Point* base = coords.data();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return tuple_less(base + a * arity, base + b * arity, arity);
  });

  SparseJoining j;
  j.arity_ = arity;
  j.base_points_ = base_points;
  j.coords_.reserve(coords.size());
  j.masses_.reserve(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t r = order[i];
    S mass = masses[r];
    std::size_t k = i + 1;
    for (; k < n && tuple_cmp(base + order[k] * arity, base + r * arity, arity) == 0; ++k) mass += masses[order[k]];
    if (nonzero(mass)) {
      j.coords_.insert(j.coords_.end(), base + r * arity, base + (r + 1) * arity);
      j.masses_.push_back(std::move(mass));
    }
    i = k;
  }
  j.first_offsets_.assign(base_points + 1, 0);
  for (std::size_t r = 0; r < j.masses_.size(); ++r) ++j.first_offsets_[j.coords_[r * arity] + 1];
  for (std::size_t p = 0; p < base_points; ++p) j.first_offsets_[p + 1] += j.first_offsets_[p];
  return j;
}

template <class S>
std::optional<std::size_t> SparseJoining<S>::find(std::span<const Point> tuple) const {
  if (tuple.size() != arity_ || tuple[0] >= base_points_) return std::nullopt;
  std::size_t lo = first_offsets_[tuple[0]];
  std::size_t hi = first_offsets_[tuple[0] + 1];
  while (lo < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    int c = tuple_cmp(coords_.data() + mid * arity_, tuple.data(), arity_);
    if (c == 0) return mid;
    if (c < 0)
      lo = mid + 1;
    else
      hi = mid;
  }
  return std::nullopt;
}

template <class S>
std::vector<S> SparseJoining<S>::marginal(std::size_t coord) const {
  if (coord >= arity_) fail(ErrorCode::ArityMismatch, "marginal coordinate out of range");
  std::vector<S> out(base_points_, S(0));
  for (std::size_t r = 0; r < size(); ++r) out[coords_[r * arity_ + coord]] += masses_[r];
  return out;
}

template <class S>
SparseJoining<S> SparseJoining<S>::project(std::span<const std::size_t> coords) const {
  if (coords.empty()) fail(ErrorCode::ArityMismatch, "projection onto no coordinates");
  for (std::size_t c : coords)
    if (c >= arity_) fail(ErrorCode::ArityMismatch, "projection coordinate out of range");
  std::vector<Point> out;
  out.reserve(size() * coords.size());
  for (std::size_t r = 0; r < size(); ++r)
    for (std::size_t c : coords) out.push_back(coords_[r * arity_ + c]);
  return from_rows(coords.size(), base_points_, std::move(out), masses_);
}

template <class S>
S SparseJoining<S>::total_mass() const {
  S total = 0;
  for (const S& m : masses_) total += m;
  return total;
}

template <class S>
double joining_distance(const SparseJoining<S>& a, const SparseJoining<S>& b) {
  if (a.arity() != b.arity()) return INFINITY;
  double worst = 0;
  std::size_t i = 0, k = 0;
  std::size_t n = a.arity();
  while (i < a.size() || k < b.size()) {
    int c;
    if (i == a.size())
      c = 1;
    else if (k == b.size())
      c = -1;
    else
      c = tuple_cmp(a.tuple(i).data(), b.tuple(k).data(), n);
    double diff;
    if (c < 0) {
      diff = std::fabs(to_double(a.mass(i++)));
    } else if (c > 0) {
      diff = std::fabs(to_double(b.mass(k++)));
    } else {
      S d = a.mass(i++) - b.mass(k++);
      diff = std::fabs(to_double(d));
    }
    worst = std::max(worst, diff);
  }
  return worst;
}

template <class S>
bool joinings_match(const SparseJoining<S>& a, const SparseJoining<S>& b, double tol) {
  if constexpr (is_exact_v<S>) {
    (void)tol;
    return a == b;
  } else {
    if (a.arity() != b.arity() || a.base_points() != b.base_points()) return false;
    return joining_distance(a, b) <= tol;
  }
}

template <class S>
SparseJoining<S> mixture(std::span<const SparseJoining<S>> parts, std::span<const S> weights) {
  if (parts.empty() || parts.size() != weights.size()) fail(ErrorCode::ArityMismatch, "mixture needs one weight per part");
  std::size_t arity = parts[0].arity();
  std::size_t base = parts[0].base_points();
  std::vector<Point> coords;
  std::vector<S> masses;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (parts[p].arity() != arity) fail(ErrorCode::ArityMismatch, "mixture of joinings with different arity");
    coords.insert(coords.end(), parts[p].coords().begin(), parts[p].coords().end());
    for (const S& m : parts[p].masses()) masses.push_back(m * weights[p]);
  }
  return SparseJoining<S>::from_rows(arity, base, std::move(coords), std::move(masses));
}

TupleMap diagonal_map(std::size_t arity, const Permutation& t) { return TupleMap(arity, t); }

TupleMap compose_maps(const TupleMap& a, const TupleMap& b) {
  if (a.size() != b.size()) fail(ErrorCode::ArityMismatch, "composing tuple maps of different arity");
  TupleMap out(a.size());
  for (std::size_t c = 0; c < a.size(); ++c) out[c] = compose(a[c], b[c]);
  return out;
}

TupleMap face_transformation(std::size_t k, std::size_t axis, int side, const Permutation& t) {
  if (axis >= k) fail(ErrorCode::AxisOutOfRange, "face axis " + std::to_string(axis + 1) + " exceeds cube dimension " +
                                                     std::to_string(k));
  if (side != 0 && side != 1) fail(ErrorCode::InvalidArgument, "face side must be 0 or 1");
  std::size_t arity = std::size_t{1} << k;
  Permutation id = identity_permutation(t.size());
  TupleMap map(arity);
  for (std::size_t pos = 0; pos < arity; ++pos)
    map[pos] = static_cast<int>((pos >> axis) & 1u) == side ? t : id;
  return map;
}

template <class S>
SparseJoining<S> pushforward(const SparseJoining<S>& j, const TupleMap& map) {
  if (map.size() != j.arity()) fail(ErrorCode::ArityMismatch, "tuple map arity differs from joining arity");
  std::vector<Point> coords(j.coords().size());
  std::size_t n = j.arity();
  for (std::size_t r = 0; r < j.size(); ++r)
    for (std::size_t c = 0; c < n; ++c) coords[r * n + c] = map[c][j.coords()[r * n + c]];
  return SparseJoining<S>::from_rows(n, j.base_points(), std::move(coords), j.masses());
}

std::vector<TransformRef> transform_refs(std::span<const std::size_t> axes) {
  std::vector<TransformRef> out;
  for (std::size_t a : axes) out.push_back({a, false});
  return out;
}

template <class S>
SparseJoining<S> base_joining(const FiniteSystem<S>& sys) {
  std::vector<Point> coords(sys.support().begin(), sys.support().end());
  std::vector<S> masses;
  for (Point x : sys.support()) masses.push_back(sys.weight(x));
  return SparseJoining<S>::from_rows(1, sys.size(), std::move(coords), std::move(masses));
}

template <class S>
SparseJoining<S> relatively_independent_product(const SparseJoining<S>& j, const Partition& p, std::size_t cap) {
  if (p.universe() != j.size()) fail(ErrorCode::SupportMismatch, "partition is not over the rows of the joining");
  std::size_t covered = 0;
  std::size_t predicted = 0;
  for (const auto& atom : p.atoms()) {
    covered += atom.size();
    predicted += atom.size() * atom.size();
    if (predicted > cap)
      fail(ErrorCode::SupportExplosion, "relatively independent product needs more than " + std::to_string(cap) +
                                            " support tuples");
  }
  if (covered != j.size()) fail(ErrorCode::SupportMismatch, "partition does not cover every row of the joining");

  std::size_t n = j.arity();
  std::vector<Point> coords;
  std::vector<S> masses;
  coords.reserve(predicted * 2 * n);
  masses.reserve(predicted);
  for (const auto& atom : p.atoms()) {
    S total = 0;
    for (Point u : atom) total += j.mass(u);
    if (!(total > 0)) fail(ErrorCode::ZeroMassAtom, "atom of row " + std::to_string(atom.front()) + " has no mass");
    for (Point u : atom) {
      S scaled = j.mass(u) / total;
      auto tu = j.tuple(u);
      for (Point v : atom) {
        auto tv = j.tuple(v);
        coords.insert(coords.end(), tu.begin(), tu.end());
        coords.insert(coords.end(), tv.begin(), tv.end());
        masses.push_back(scaled * j.mass(v));
      }
    }
  }
  return SparseJoining<S>::from_rows(2 * n, j.base_points(), std::move(coords), std::move(masses));
}

template <class S>
SparseJoining<S> host_measure(const FiniteSystem<S>& sys, std::span<const TransformRef> ts, std::size_t cap) {
  if (ts.empty()) fail(ErrorCode::EmptySubset, "host measure needs at least one transform");
  for (const auto& ref : ts)
    if (ref.axis >= sys.dim())
      fail(ErrorCode::AxisOutOfRange, "transform " + std::to_string(ref.axis + 1) + " out of range");
  if (ts.size() > 20) fail(ErrorCode::CapExceeded, "cube dimension too large");
  SparseJoining<S> j = base_joining(sys);
  for (const auto& ref : ts) {
    const Permutation& t = resolve(sys, ref);
    std::size_t rows = j.size();
    std::size_t n = j.arity();
    Permutation row_map(rows);
    std::vector<Point> image(n);
    for (std::size_t r = 0; r < rows; ++r) {
      auto tuple = j.tuple(r);
      for (std::size_t c = 0; c < n; ++c) image[c] = t[tuple[c]];
      auto hit = j.find(image);
      if (!hit) fail(ErrorCode::NotInvariant, "diagonal transform does not preserve the cube support");
      row_map[r] = static_cast<Point>(*hit);
    }
    Permutation all = identity_permutation(rows);
    Partition p = orbit_partition(rows, all, std::span<const Permutation>(&row_map, 1));
    j = relatively_independent_product(j, p, cap);
  }
  return j;
}

template <class S>
S integrate_tensor(const SparseJoining<S>& j, std::span<const Observable<S>* const> fs) {
  std::size_t n = j.arity();
  if (fs.size() != n)
    fail(ErrorCode::ArityMismatch, "expected " + std::to_string(n) + " observables, got " + std::to_string(fs.size()));
  for (const auto* f : fs)
    if (f && f->size() != j.base_points()) fail(ErrorCode::ArityMismatch, "observable length differs from base size");

  // Rows sharing a first coordinate are contiguous, so a sparse first factor
  // restricts the sum to a few ranges.
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  if (fs[0]) {
    for (Point p = 0; p < j.base_points(); ++p)
      if (nonzero((*fs[0])[p])) {
        auto range = j.rows_with_first(p);
        if (range.first < range.second) ranges.push_back(range);
      }
  } else if (j.size() > 0) {
    ranges.push_back({0, j.size()});
  }
  std::vector<std::size_t> starts(ranges.size() + 1, 0);
  for (std::size_t i = 0; i < ranges.size(); ++i) starts[i + 1] = starts[i] + ranges[i].second - ranges[i].first;
  std::size_t total_rows = starts.back();
  std::size_t blocks = (total_rows + kIntegrationBlock - 1) / kIntegrationBlock;

  std::vector<S> partial(blocks, S(0));
  auto body = [&](std::size_t b) {
    std::size_t begin = b * kIntegrationBlock;
    std::size_t end = std::min(total_rows, begin + kIntegrationBlock);
    std::size_t ri = static_cast<std::size_t>(std::upper_bound(starts.begin(), starts.end(), begin) - starts.begin()) - 1;
    S sum = 0;
    S term;
    for (std::size_t g = begin; g < end; ++g) {
      while (g >= starts[ri + 1]) ++ri;
      std::size_t row = ranges[ri].first + (g - starts[ri]);
      auto tuple = j.tuple(row);
      term = j.mass(row);
      bool zero = false;
      for (std::size_t c = 0; c < n; ++c) {
        if (!fs[c]) continue;
        const S& v = (*fs[c])[tuple[c]];
        if (!nonzero(v)) {
          zero = true;
          break;
        }
        term *= v;
      }
      if (!zero) sum += term;
    }
    partial[b] = std::move(sum);
  };
  if (blocks > 1)
    parallel_for(blocks, body);
  else if (blocks == 1)
    body(0);
  S total = 0;
  for (const S& s : partial) total += s;
  return total;
}

template <class S>
S integrate_tensor(const SparseJoining<S>& j, std::span<const Observable<S>> fs) {
  std::vector<const Observable<S>*> ptrs;
  for (const auto& f : fs) ptrs.push_back(&f);
  return integrate_tensor<S>(j, std::span<const Observable<S>* const>(ptrs));
}

template <class S>
S integrate_uniform(const SparseJoining<S>& j, const Observable<S>& f) {
  std::vector<const Observable<S>*> ptrs(j.arity(), &f);
  return integrate_tensor<S>(j, std::span<const Observable<S>* const>(ptrs));
}

template <class S>
S seminorm_power(const SparseJoining<S>& cube, const Observable<S>& f) {
  S v = integrate_uniform(cube, f);
  if constexpr (!is_exact_v<S>) {
    if (v < 0 && v >= -kFloatTolerance) v = 0;
  }
  return v;
}

template <class S>
S seminorm_power(const FiniteSystem<S>& sys, const Observable<S>& f, std::span<const TransformRef> ts,
                 std::size_t cap) {
  if (f.size() != sys.size()) fail(ErrorCode::ArityMismatch, "observable length differs from system size");
  return seminorm_power(host_measure(sys, ts, cap), f);
}

template <class S>
double seminorm_from_power(const S& power, std::size_t k) {
  double p = to_double(power);
  if (p <= 0) return 0.0;
  return std::pow(p, 1.0 / static_cast<double>(std::size_t{1} << k));
}

template <class S>
double host_seminorm(const FiniteSystem<S>& sys, const Observable<S>& f, std::span<const TransformRef> ts,
                     std::size_t cap) {
  return seminorm_from_power(seminorm_power(sys, f, ts, cap), ts.size());
}

template <class S>
bool seminorm_power_is_zero(const S& power) {
  if constexpr (is_exact_v<S>)
    return sgn(power) == 0;
  else
    return std::fabs(power) <= kSeminormZeroTolerance;
}

template <class S>
CubeExtension<S> cube_extension(const FiniteSystem<S>& sys, std::span<const std::size_t> axes, std::size_t cap) {
  if (axes.empty()) fail(ErrorCode::EmptySubset, "cube extension needs at least one generator");
  for (std::size_t a = 0; a < axes.size(); ++a)
    for (std::size_t b = a + 1; b < axes.size(); ++b)
      if (axes[a] == axes[b]) fail(ErrorCode::InvalidArgument, "repeated generator in cube extension subset");
  auto refs = transform_refs(axes);
  SparseJoining<S> cube = host_measure(sys, refs, cap);
  std::size_t k = axes.size();
  std::size_t rows = cube.size();

  std::vector<Permutation> transforms;
  for (std::size_t g = 0; g < sys.dim(); ++g) {
    auto slot = std::find(axes.begin(), axes.end(), g);
    TupleMap map = slot == axes.end()
                       ? diagonal_map(cube.arity(), sys.transform(g))
                       : face_transformation(k, static_cast<std::size_t>(slot - axes.begin()), 1, sys.transform(g));
    Permutation perm(rows);
    std::vector<Point> image(cube.arity());
    for (std::size_t r = 0; r < rows; ++r) {
      auto tuple = cube.tuple(r);
      for (std::size_t c = 0; c < tuple.size(); ++c) image[c] = map[c][tuple[c]];
      auto hit = cube.find(image);
      if (!hit) fail(ErrorCode::NotInvariant, "transform " + std::to_string(g + 1) + " leaves the cube support");
      perm[r] = static_cast<Point>(*hit);
    }
    transforms.push_back(std::move(perm));
  }
  std::vector<Point> factor(rows);
  for (std::size_t r = 0; r < rows; ++r) factor[r] = cube.tuple(r)[cube.arity() - 1];
  Limits limits{std::max<std::size_t>(rows, 1), std::max<std::size_t>(sys.dim(), 1), cap};
  auto ext = validate_system<S>(rows, cube.masses(), std::move(transforms), limits);
  return CubeExtension<S>{std::move(ext), std::move(cube), std::move(factor),
                          std::vector<std::size_t>(axes.begin(), axes.end())};
}

template <class S>
std::vector<Observable<S>> kernel_basis(const FiniteSystem<S>& sys, const Partition& z) {
  std::vector<Observable<S>> basis;
  for (const auto& atom : z.atoms()) {
    Point a = atom.front();
    for (std::size_t i = 1; i < atom.size(); ++i) {
      Point b = atom[i];
      const S& wa = sys.weight(a);
      const S& wb = sys.weight(b);
      S top = wa < wb ? wb : wa;
      Observable<S> f = Observable<S>::constant(sys.size(), S(0));
      f[a] = wb / top;
      f[b] = -wa / top;
      basis.push_back(std::move(f));
    }
  }
  return basis;
}

template <class S>
MagicResult<S> is_magic(const FiniteSystem<S>& sys, std::span<const std::size_t> axes, std::size_t cap) {
  if (axes.empty()) fail(ErrorCode::EmptySubset, "magic test needs at least one generator");
  MagicResult<S> result;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    Partition p = invariant_partition(sys, std::span<const std::size_t>(&axes[i], 1));
    result.z = i == 0 ? p : join_partitions(result.z, p);
  }
  auto basis = kernel_basis(sys, result.z);
  result.basis_size = basis.size();
  if (basis.empty()) return result;
  auto refs = transform_refs(axes);
  SparseJoining<S> cube = host_measure(sys, refs, cap);
  for (auto& f : basis) {
    S power = seminorm_power(cube, f);
    if (!seminorm_power_is_zero(power)) {
      result.magic = false;
      result.witness = std::move(f);
      result.witness_power = power;
      break;
    }
  }
  return result;
}

template <class S>
void write_joining(std::ostream& os, const SparseJoining<S>& j) {
  os << "# joining arity=" << j.arity() << " points=" << j.base_points() << " rows=" << j.size() << '\n';
  std::string line;
  for (std::size_t r = 0; r < j.size(); ++r) {
    line.clear();
    for (Point p : j.tuple(r)) {
      line += std::to_string(p);
      line += ' ';
    }
    line += format_scalar(j.mass(r));
    line += '\n';
    os << line;
  }
}

template <class S>
SparseJoining<S> read_joining(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t arity = 0, points = 0, rows = 0;
  bool header = false;
  std::vector<Point> coords;
  std::vector<S> masses;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (!header) {
      std::istringstream in(line);
      std::string hash, word;
      in >> hash >> word;
      if (hash != "#" || word != "joining") throw ParseError(line_no, 1, "expected '# joining' header");
      std::string kv;
      while (in >> kv) {
        auto eq = kv.find('=');
        std::size_t col = line.find(kv) + 1;
        if (eq == std::string::npos) throw ParseError(line_no, col, "expected key=value");
        std::string key = kv.substr(0, eq);
        char* end = nullptr;
        unsigned long long v = std::strtoull(kv.c_str() + eq + 1, &end, 10);
        if (*end != '\0' || eq + 1 == kv.size()) throw ParseError(line_no, col + eq + 1, "expected an integer");
        if (key == "arity")
          arity = v;
        else if (key == "points")
          points = v;
        else if (key == "rows")
          rows = v;
        else
          throw ParseError(line_no, col, "unknown header key '" + key + "'");
      }
      if (arity == 0 || points == 0) throw ParseError(line_no, 1, "header needs positive arity and points");
      header = true;
      continue;
    }
    std::size_t pos = 0;
    std::size_t field = 0;
    while (pos < line.size()) {
      while (pos < line.size() && line[pos] == ' ') ++pos;
      if (pos >= line.size()) break;
      std::size_t end = line.find(' ', pos);
      if (end == std::string::npos) end = line.size();
      std::string token = line.substr(pos, end - pos);
      if (field < arity) {
        char* stop = nullptr;
        unsigned long v = std::strtoul(token.c_str(), &stop, 10);
        if (*stop != '\0' || token[0] == '-') throw ParseError(line_no, pos + 1, "expected a point index");
        if (v >= points) throw ParseError(line_no, pos + 1, "point index out of range");
        coords.push_back(static_cast<Point>(v));
      } else if (field == arity) {
        try {
          Rational q = parse_rational(token);
          if (sgn(q) < 0) throw ParseError(line_no, pos + 1, "negative mass");
          if constexpr (is_exact_v<S>) {
            masses.push_back(q);
          } else {
            char* stop = nullptr;
            double d = std::strtod(token.c_str(), &stop);
            masses.push_back(*stop == '\0' ? d : q.get_d());
          }
        } catch (const ParseError& e) {
          if (e.line() == line_no) throw;
          throw ParseError(line_no, pos + 1, "malformed mass '" + token + "'");
        }
      } else {
        throw ParseError(line_no, pos + 1, "too many fields");
      }
      ++field;
      pos = end;
    }
    if (field != arity + 1) throw ParseError(line_no, line.size() + 1, "expected " + std::to_string(arity + 1) + " fields");
  }
  if (!header) throw ParseError(line_no + 1, 1, "missing '# joining' header");
  if (masses.size() != rows) throw ParseError(line_no + 1, 1, "row count differs from header");
  return SparseJoining<S>::from_rows(arity, points, std::move(coords), std::move(masses));
}

#define ERGO_INSTANTIATE_CUBES(S)                                                                                  \
  template class SparseJoining<S>;                                                                                 \
  template bool joinings_match<S>(const SparseJoining<S>&, const SparseJoining<S>&, double);                       \
  template double joining_distance<S>(const SparseJoining<S>&, const SparseJoining<S>&);                           \
  template SparseJoining<S> mixture<S>(std::span<const SparseJoining<S>>, std::span<const S>);                     \
  template SparseJoining<S> pushforward<S>(const SparseJoining<S>&, const TupleMap&);                              \
  template SparseJoining<S> base_joining<S>(const FiniteSystem<S>&);                                               \
  template SparseJoining<S> relatively_independent_product<S>(const SparseJoining<S>&, const Partition&,           \
                                                              std::size_t);                                        \
  template SparseJoining<S> host_measure<S>(const FiniteSystem<S>&, std::span<const TransformRef>, std::size_t);   \
  template S integrate_tensor<S>(const SparseJoining<S>&, std::span<const Observable<S>* const>);                  \
  template S integrate_tensor<S>(const SparseJoining<S>&, std::span<const Observable<S>>);                         \
  template S integrate_uniform<S>(const SparseJoining<S>&, const Observable<S>&);                                  \
  template S seminorm_power<S>(const SparseJoining<S>&, const Observable<S>&);                                     \
  template S seminorm_power<S>(const FiniteSystem<S>&, const Observable<S>&, std::span<const TransformRef>,        \
                               std::size_t);                                                                       \
  template double seminorm_from_power<S>(const S&, std::size_t);                                                   \
  template double host_seminorm<S>(const FiniteSystem<S>&, const Observable<S>&, std::span<const TransformRef>,    \
                                   std::size_t);                                                                   \
  template bool seminorm_power_is_zero<S>(const S&);                                                               \
  template CubeExtension<S> cube_extension<S>(const FiniteSystem<S>&, std::span<const std::size_t>, std::size_t);  \
  template std::vector<Observable<S>> kernel_basis<S>(const FiniteSystem<S>&, const Partition&);                   \
  template MagicResult<S> is_magic<S>(const FiniteSystem<S>&, std::span<const std::size_t>, std::size_t);          \
  template void write_joining<S>(std::ostream&, const SparseJoining<S>&);                                          \
  template SparseJoining<S> read_joining<S>(std::istream&);

ERGO_INSTANTIATE_CUBES(double)
ERGO_INSTANTIATE_CUBES(Rational)

}  // namespace ergo
