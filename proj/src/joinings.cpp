#include "ergo/joinings.hpp"

#include <algorithm>

#include "ergo/errors.hpp"

namespace ergo {

template <class S>
TupleMap product_map(const FiniteSystem<S>& sys) {
  return TupleMap(sys.transforms().begin(), sys.transforms().end());
}

template <class S>
std::vector<TupleMap> furstenberg_group(const FiniteSystem<S>& sys) {
  std::vector<TupleMap> out{product_map(sys)};
  for (std::size_t i = 0; i < sys.dim(); ++i) out.push_back(diagonal_map(sys.dim(), sys.transform(i)));
  return out;
}

namespace {

// Tuples (T_1^n x, ..., T_d^n x) for n over one full period of the diagonal point.
template <class S>
std::vector<Point> diagonal_orbit(const FiniteSystem<S>& sys, Point x, std::size_t cap, std::size_t& length) {
  std::uint64_t period = 1;
  for (std::size_t i = 0; i < sys.dim(); ++i) period = lcm_checked(period, sys.cycles(i).cycle_length(x));
  if (period > cap) fail(ErrorCode::SupportExplosion, "diagonal orbit longer than the support cap");
  length = static_cast<std::size_t>(period);
  std::size_t d = sys.dim();
  std::vector<Point> coords(length * d);
  std::vector<Point> cur(d, x);
  for (std::size_t n = 0; n < length; ++n) {
    for (std::size_t i = 0; i < d; ++i) {
      coords[n * d + i] = cur[i];
      cur[i] = sys.apply(i, cur[i]);
    }
  }
  return coords;
}

}  // namespace

template <class S>
SparseJoining<S> pointwise_joining(const FiniteSystem<S>& sys, Point x) {
  if (x >= sys.size() || !sys.in_support(x))
    fail(ErrorCode::ZeroMassPoint, "point " + std::to_string(x) + " has zero mass");
  std::size_t length = 0;
  auto coords = diagonal_orbit(sys, x, Limits{}.max_support, length);
  std::vector<S> masses(length, S(1) / S(static_cast<long>(length)));
  return SparseJoining<S>::from_rows(sys.dim(), sys.size(), std::move(coords), std::move(masses));
}

template <class S>
PointwiseFamily<S> pointwise_family(const FiniteSystem<S>& sys, std::size_t cap) {
  PointwiseFamily<S> fam;
  fam.key_of.assign(sys.size(), PointwiseFamily<S>::kNone);
  std::size_t d = sys.dim();
  std::size_t rows = 0;
  for (Point x : sys.support()) {
    if (fam.key_of[x] != PointwiseFamily<S>::kNone) continue;
    std::size_t length = 0;
    auto coords = diagonal_orbit(sys, x, cap, length);
    rows += length;
    if (rows > cap) fail(ErrorCode::SupportExplosion, "pointwise joinings exceed the support cap");
    std::size_t key = fam.measures.size();
    S shared = 0;
    for (std::size_t n = 0; n < length; ++n) {
      const Point* t = coords.data() + n * d;
      if (std::all_of(t, t + d, [&](Point y) { return y == t[0]; })) {
        fam.key_of[t[0]] = key;
        shared += sys.weight(t[0]);
      }
    }
    std::vector<S> masses(length, S(1) / S(static_cast<long>(length)));
    fam.measures.push_back(SparseJoining<S>::from_rows(d, sys.size(), std::move(coords), std::move(masses)));
    fam.key_weights.push_back(shared);
  }
  return fam;
}

template <class S>
SparseJoining<S> furstenberg_joining(const FiniteSystem<S>& sys, std::size_t cap) {
  auto fam = pointwise_family(sys, cap);
  return mixture<S>(fam.measures, fam.key_weights);
}

template <class S>
FiniteSystem<S> relative_system(const FiniteSystem<S>& sys) {
  if (sys.dim() < 2) fail(ErrorCode::InvalidArgument, "relative system needs at least two generators");
  std::vector<Permutation> transforms;
  for (std::size_t i = 1; i < sys.dim(); ++i) transforms.push_back(compose(sys.inverse(0), sys.transform(i)));
  Limits limits{std::max<std::size_t>(sys.size(), 1), sys.dim(), Limits{}.max_support};
  return validate_system<S>(sys.size(), sys.weights(), std::move(transforms), limits);
}

template <class S>
std::vector<Disintegration<S>> disintegrate(const SparseJoining<S>& j, const Partition& p) {
  if (p.universe() != j.size()) fail(ErrorCode::SupportMismatch, "partition is not over the rows of the joining");
  std::size_t covered = 0;
  for (const auto& atom : p.atoms()) covered += atom.size();
  if (covered != j.size()) fail(ErrorCode::SupportMismatch, "partition does not cover the joining support");
  std::vector<Disintegration<S>> out;
  for (const auto& atom : p.atoms()) {
    S mass = 0;
    for (Point r : atom) mass += j.mass(r);
    std::vector<Point> coords;
    std::vector<S> masses;
    for (Point r : atom) {
      auto t = j.tuple(r);
      coords.insert(coords.end(), t.begin(), t.end());
      masses.push_back(j.mass(r) / mass);
    }
    out.push_back({atom, SparseJoining<S>::from_rows(j.arity(), j.base_points(), std::move(coords), std::move(masses)),
                   mass});
  }
  return out;
}

template <class S>
Partition support_orbits(const SparseJoining<S>& j, std::span<const TupleMap> maps) {
  std::vector<Permutation> row_maps;
  std::vector<Point> image(j.arity());
  for (const auto& map : maps) {
    if (map.size() != j.arity()) fail(ErrorCode::ArityMismatch, "tuple map arity differs from joining arity");
    Permutation rm(j.size());
    for (std::size_t r = 0; r < j.size(); ++r) {
      auto t = j.tuple(r);
      for (std::size_t c = 0; c < t.size(); ++c) image[c] = map[c][t[c]];
      auto hit = j.find(image);
      if (!hit) fail(ErrorCode::NotInvariant, "tuple map leaves the joining support");
      rm[r] = static_cast<Point>(*hit);
    }
    row_maps.push_back(std::move(rm));
  }
  Permutation all = identity_permutation(j.size());
  return orbit_partition(j.size(), all, row_maps);
}

template <class S>
bool joining_ergodicity(const SparseJoining<S>& j, std::span<const TupleMap> maps) {
  for (std::size_t i = 0; i < maps.size(); ++i)
    if (!joinings_match(pushforward(j, maps[i]), j))
      fail(ErrorCode::NotInvariant, "map " + std::to_string(i + 1) + " does not preserve the joining");
  return support_orbits(j, maps).atom_count() == 1;
}

#define ERGO_INSTANTIATE_JOININGS(S)                                                                   \
  template TupleMap product_map<S>(const FiniteSystem<S>&);                                            \
  template std::vector<TupleMap> furstenberg_group<S>(const FiniteSystem<S>&);                         \
  template SparseJoining<S> pointwise_joining<S>(const FiniteSystem<S>&, Point);                       \
  template PointwiseFamily<S> pointwise_family<S>(const FiniteSystem<S>&, std::size_t);                \
  template SparseJoining<S> furstenberg_joining<S>(const FiniteSystem<S>&, std::size_t);               \
  template FiniteSystem<S> relative_system<S>(const FiniteSystem<S>&);                                 \
  template std::vector<Disintegration<S>> disintegrate<S>(const SparseJoining<S>&, const Partition&);  \
  template Partition support_orbits<S>(const SparseJoining<S>&, std::span<const TupleMap>);            \
  template bool joining_ergodicity<S>(const SparseJoining<S>&, std::span<const TupleMap>);

ERGO_INSTANTIATE_JOININGS(double)
ERGO_INSTANTIATE_JOININGS(Rational)

}  // namespace ergo
