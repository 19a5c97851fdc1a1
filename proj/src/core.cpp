#include "ergo/core.hpp"

#include <numeric>
#include <sstream>

#include "ergo/errors.hpp"

namespace ergo {

Permutation identity_permutation(std::size_t m) {
  Permutation p(m);
  std::iota(p.begin(), p.end(), Point{0});
  return p;
}

Permutation compose(const Permutation& a, const Permutation& b) {
  Permutation r(b.size());
  for (std::size_t x = 0; x < b.size(); ++x) r[x] = a[b[x]];
  return r;
}

Permutation invert(const Permutation& p) {
  Permutation r(p.size());
  for (std::size_t x = 0; x < p.size(); ++x) r[p[x]] = static_cast<Point>(x);
  return r;
}

bool is_permutation(const Permutation& p, std::size_t m) {
  if (p.size() != m) return false;
  std::vector<char> seen(m, 0);
  for (Point y : p) {
    if (y >= m || seen[y]) return false;
    seen[y] = 1;
  }
  return true;
}

CycleTable::CycleTable(const Permutation& p) {
  std::size_t m = p.size();
  cycle_of_.assign(m, UINT32_MAX);
  position_.assign(m, 0);
  flat_.reserve(m);
  for (std::size_t start = 0; start < m; ++start) {
    if (cycle_of_[start] != UINT32_MAX) continue;
    auto id = static_cast<std::uint32_t>(cycle_len_.size());
    cycle_start_.push_back(static_cast<std::uint32_t>(flat_.size()));
    std::uint32_t len = 0;
    Point x = static_cast<Point>(start);
    do {
      cycle_of_[x] = id;
      position_[x] = len++;
      flat_.push_back(x);
      x = p[x];
    } while (x != start);
    cycle_len_.push_back(len);
  }
}

Point CycleTable::power(Point x, std::int64_t n) const {
  std::uint32_t c = cycle_of_[x];
  auto len = static_cast<std::int64_t>(cycle_len_[c]);
  std::int64_t pos = (static_cast<std::int64_t>(position_[x]) + n % len + len) % len;
  return flat_[cycle_start_[c] + static_cast<std::size_t>(pos)];
}

std::uint64_t lcm_checked(std::uint64_t a, std::uint64_t b) {
  std::uint64_t g = std::gcd(a, b);
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a / g, b, &r)) fail(ErrorCode::CapExceeded, "period exceeds 64-bit range");
  return r;
}

std::vector<std::size_t> all_axes(std::size_t d) {
  std::vector<std::size_t> axes(d);
  std::iota(axes.begin(), axes.end(), std::size_t{0});
  return axes;
}

std::string describe_permutation(const Permutation& p) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
  os << ']';
  return os.str();
}

namespace {

template <class S>
bool weights_equal(const S& a, const S& b) {
  return approx_equal(a, b);
}

}  // namespace

template <class S>
FiniteSystem<S> FiniteSystem<S>::create(std::size_t m, std::vector<S> weights, std::vector<Permutation> transforms,
                                        const Limits& limits) {
  if (m == 0) fail(ErrorCode::InvalidArgument, "system needs at least one point");
  if (m > limits.max_points)
    fail(ErrorCode::CapExceeded, std::to_string(m) + " points exceeds the cap of " + std::to_string(limits.max_points));
  if (transforms.empty()) fail(ErrorCode::InvalidArgument, "system needs at least one transformation");
  if (transforms.size() > limits.max_generators)
    fail(ErrorCode::CapExceeded, std::to_string(transforms.size()) + " generators exceeds the cap of " +
                                     std::to_string(limits.max_generators));
  if (weights.size() != m)
    fail(ErrorCode::BadWeights, "expected " + std::to_string(m) + " weights, got " + std::to_string(weights.size()));

  S total = 0;
  for (std::size_t x = 0; x < m; ++x) {
    if (weights[x] < 0) fail(ErrorCode::BadWeights, "negative weight at point " + std::to_string(x));
    total += weights[x];
  }
  if (!approx_equal(total, S(1))) fail(ErrorCode::BadWeights, "weights sum to " + format_scalar(total) + ", not 1");

  for (std::size_t i = 0; i < transforms.size(); ++i) {
    if (!is_permutation(transforms[i], m))
      fail(ErrorCode::InvalidArgument, "T" + std::to_string(i + 1) + " is not a permutation of {0.." +
                                           std::to_string(m - 1) + "}");
  }
  for (std::size_t i = 0; i < transforms.size(); ++i) {
    for (std::size_t x = 0; x < m; ++x) {
      if (!weights_equal(weights[transforms[i][x]], weights[x]))
        fail(ErrorCode::MeasureNotPreserved, "T" + std::to_string(i + 1) + " moves point " + std::to_string(x) +
                                                 " (weight " + format_scalar(weights[x]) + ") to point " +
                                                 std::to_string(transforms[i][x]) + " (weight " +
                                                 format_scalar(weights[transforms[i][x]]) + ")");
    }
  }
  for (std::size_t i = 0; i < transforms.size(); ++i) {
    for (std::size_t j = i + 1; j < transforms.size(); ++j) {
      for (std::size_t x = 0; x < m; ++x) {
        Point ij = transforms[i][transforms[j][x]];
        Point ji = transforms[j][transforms[i][x]];
        if (ij != ji)
          fail(ErrorCode::CommutationViolation, "T" + std::to_string(i + 1) + " and T" + std::to_string(j + 1) +
                                                    " do not commute at point " + std::to_string(x) + " (T" +
                                                    std::to_string(i + 1) + "T" + std::to_string(j + 1) + " x = " +
                                                    std::to_string(ij) + ", T" + std::to_string(j + 1) + "T" +
                                                    std::to_string(i + 1) + " x = " + std::to_string(ji) + ")");
      }
    }
  }

  FiniteSystem sys;
  sys.weights_ = std::move(weights);
  sys.transforms_ = std::move(transforms);
  for (const auto& t : sys.transforms_) {
    sys.inverses_.push_back(invert(t));
    sys.cycles_.emplace_back(t);
  }
  sys.in_support_.assign(m, 0);
  for (std::size_t x = 0; x < m; ++x) {
    if (sys.weights_[x] > 0) {
      sys.support_.push_back(static_cast<Point>(x));
      sys.in_support_[x] = 1;
    }
  }
  return sys;
}

template <class S>
FiniteSystem<S> validate_system(std::size_t m, std::vector<S> weights, std::vector<Permutation> transforms,
                                const Limits& limits) {
  return FiniteSystem<S>::create(m, std::move(weights), std::move(transforms), limits);
}

template <class S>
FiniteSystem<S> uniform_system(std::size_t m, std::vector<Permutation> transforms, const Limits& limits) {
  S w = S(1) / S(static_cast<long>(m));
  return validate_system<S>(m, std::vector<S>(m, w), std::move(transforms), limits);
}

template <class S>
Point apply_word(const FiniteSystem<S>& sys, const TransformWord& w, Point x) {
  if (w.exponents.size() != sys.dim())
    fail(ErrorCode::DimensionMismatch, "word has " + std::to_string(w.exponents.size()) + " exponents, system has " +
                                           std::to_string(sys.dim()) + " generators");
  if (x >= sys.size()) fail(ErrorCode::InvalidArgument, "point " + std::to_string(x) + " out of range");
  for (std::size_t i = 0; i < sys.dim(); ++i) x = sys.apply_power(i, x, w.exponents[i]);
  return x;
}

template <class S>
std::vector<std::uint64_t> joint_period(const FiniteSystem<S>& sys, std::span<const std::size_t> axes) {
  if (axes.empty()) fail(ErrorCode::EmptySubset, "joint_period needs at least one axis");
  std::vector<std::uint64_t> periods;
  for (std::size_t axis : axes) {
    if (axis >= sys.dim()) fail(ErrorCode::AxisOutOfRange, "axis " + std::to_string(axis + 1) + " out of range");
    std::uint64_t l = 1;
    for (Point x : sys.support()) l = lcm_checked(l, sys.cycles(axis).cycle_length(x));
    periods.push_back(l);
  }
  return periods;
}

template <class S>
std::uint64_t common_period(const FiniteSystem<S>& sys, std::span<const std::size_t> axes) {
  std::uint64_t l = 1;
  for (std::uint64_t p : joint_period(sys, axes)) l = lcm_checked(l, p);
  return l;
}

template <class S>
FiniteSystem<S> product_system(const FiniteSystem<S>& a, const FiniteSystem<S>& b, const Limits& limits) {
  if (a.dim() != b.dim())
    fail(ErrorCode::DimensionMismatch, "product of systems with " + std::to_string(a.dim()) + " and " +
                                           std::to_string(b.dim()) + " generators");
  std::size_t mb = b.size();
  std::size_t m = a.size() * mb;
  std::vector<S> weights(m);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < mb; ++j) weights[i * mb + j] = a.weight(static_cast<Point>(i)) * b.weight(static_cast<Point>(j));
  std::vector<Permutation> transforms;
  for (std::size_t axis = 0; axis < a.dim(); ++axis) {
    Permutation t(m);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < mb; ++j)
        t[i * mb + j] = static_cast<Point>(a.transform(axis)[i] * mb + b.transform(axis)[j]);
    transforms.push_back(std::move(t));
  }
  return validate_system<S>(m, std::move(weights), std::move(transforms), limits);
}

template <class S>
FiniteSystem<S> pad_dimension(const FiniteSystem<S>& sys, std::size_t d) {
  if (d < sys.dim()) fail(ErrorCode::DimensionMismatch, "cannot pad to fewer generators");
  std::vector<Permutation> transforms = sys.transforms();
  while (transforms.size() < d) transforms.push_back(identity_permutation(sys.size()));
  Limits limits{sys.size(), std::max<std::size_t>(d, 1), Limits{}.max_support};
  return validate_system<S>(sys.size(), sys.weights(), std::move(transforms), limits);
}

template <class S>
FiniteSystem<S> restrict_weights(const FiniteSystem<S>& sys, std::span<const Point> points,
                                 std::span<const std::size_t> keep_axes) {
  S mass = 0;
  for (Point x : points) mass += sys.weight(x);
  if (!(mass > 0)) fail(ErrorCode::ZeroMassAtom, "restriction to a null set");
  std::vector<S> weights(sys.size(), S(0));
  for (Point x : points) weights[x] = sys.weight(x) / mass;
  if constexpr (!is_exact_v<S>) {
    // renormalize so the float sum check is exact up to rounding of one term
    S total = 0;
    for (const S& w : weights) total += w;
    for (S& w : weights) w /= total;
  }
  std::vector<Permutation> transforms;
  for (std::size_t axis : keep_axes) transforms.push_back(sys.transform(axis));
  Limits limits{sys.size(), std::max<std::size_t>(transforms.size(), 1), Limits{}.max_support};
  return validate_system<S>(sys.size(), std::move(weights), std::move(transforms), limits);
}

#define ERGO_INSTANTIATE_CORE(S)                                                                                   \
  template class FiniteSystem<S>;                                                                                  \
  template FiniteSystem<S> validate_system<S>(std::size_t, std::vector<S>, std::vector<Permutation>,              \
                                              const Limits&);                                                      \
  template FiniteSystem<S> uniform_system<S>(std::size_t, std::vector<Permutation>, const Limits&);               \
  template Point apply_word<S>(const FiniteSystem<S>&, const TransformWord&, Point);                              \
  template std::vector<std::uint64_t> joint_period<S>(const FiniteSystem<S>&, std::span<const std::size_t>);      \
  template std::uint64_t common_period<S>(const FiniteSystem<S>&, std::span<const std::size_t>);                  \
  template FiniteSystem<S> product_system<S>(const FiniteSystem<S>&, const FiniteSystem<S>&, const Limits&);      \
  template FiniteSystem<S> pad_dimension<S>(const FiniteSystem<S>&, std::size_t);                                 \
  template FiniteSystem<S> restrict_weights<S>(const FiniteSystem<S>&, std::span<const Point>,                    \
                                               std::span<const std::size_t>);

ERGO_INSTANTIATE_CORE(double)
ERGO_INSTANTIATE_CORE(Rational)

}  // namespace ergo
