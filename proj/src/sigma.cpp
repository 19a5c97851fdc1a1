#include "ergo/sigma.hpp"

#include <algorithm>
#include <numeric>

#include "ergo/errors.hpp"

namespace ergo {

DisjointSet::DisjointSet(std::size_t n) : parent_(n), size_(n, 1) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSet::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

void DisjointSet::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
}

Partition Partition::from_atoms(std::size_t universe, std::vector<std::vector<Point>> atoms) {
  Partition p;
  p.atom_of_.assign(universe, kNoAtom);
  for (auto& atom : atoms) {
    if (atom.empty()) fail(ErrorCode::InvalidArgument, "partition has an empty atom");
    std::sort(atom.begin(), atom.end());
  }
  std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  for (std::size_t id = 0; id < atoms.size(); ++id) {
    for (Point x : atoms[id]) {
      if (x >= universe) fail(ErrorCode::InvalidArgument, "atom element " + std::to_string(x) + " out of range");
      if (p.atom_of_[x] != kNoAtom) fail(ErrorCode::InvalidArgument, "atoms overlap at " + std::to_string(x));
      p.atom_of_[x] = id;
    }
  }
  p.atoms_ = std::move(atoms);
  return p;
}

Partition Partition::singletons(std::size_t universe, std::span<const Point> covered) {
  std::vector<std::vector<Point>> atoms;
  for (Point x : covered) atoms.push_back({x});
  return from_atoms(universe, std::move(atoms));
}

Partition Partition::single_atom(std::size_t universe, std::span<const Point> covered) {
  if (covered.empty()) return from_atoms(universe, {});
  return from_atoms(universe, {std::vector<Point>(covered.begin(), covered.end())});
}

bool Partition::refines(const Partition& coarser) const {
  if (coarser.universe() != universe()) return false;
  for (const auto& atom : atoms_) {
    std::size_t target = coarser.atom_of(atom.front());
    if (target == kNoAtom) return false;
    for (Point x : atom)
      if (coarser.atom_of(x) != target) return false;
  }
  return true;
}

Partition orbit_partition(std::size_t universe, std::span<const Point> covered, std::span<const Permutation> maps) {
  DisjointSet dsu(universe);
  std::vector<char> in(universe, 0);
  for (Point x : covered) in[x] = 1;
  for (const auto& map : maps) {
    for (Point x : covered) {
      Point y = map[x];
      if (!in[y]) fail(ErrorCode::NotInvariant, "map leaves the covered set at " + std::to_string(x));
      dsu.unite(x, y);
    }
  }
  std::vector<std::size_t> slot(universe, Partition::kNoAtom);
  std::vector<std::vector<Point>> atoms;
  for (Point x : covered) {
    std::size_t r = dsu.find(x);
    if (slot[r] == Partition::kNoAtom) {
      slot[r] = atoms.size();
      atoms.emplace_back();
    }
    atoms[slot[r]].push_back(x);
  }
  return Partition::from_atoms(universe, std::move(atoms));
}

template <class S>
Partition invariant_partition(const FiniteSystem<S>& sys, std::span<const std::size_t> axes) {
  if (axes.empty()) fail(ErrorCode::EmptySubset, "invariant_partition needs at least one generator");
  std::vector<Permutation> maps;
  for (std::size_t axis : axes) {
    if (axis >= sys.dim()) fail(ErrorCode::AxisOutOfRange, "axis " + std::to_string(axis + 1) + " out of range");
    maps.push_back(sys.transform(axis));
  }
  return orbit_partition(sys.size(), sys.support(), maps);
}

Partition join_partitions(const Partition& p, const Partition& q) {
  if (p.universe() != q.universe()) fail(ErrorCode::SupportMismatch, "partitions over different universes");
  std::vector<std::vector<Point>> atoms;
  for (const auto& atom : p.atoms()) {
    // split each atom of p by the atom of q
    std::vector<std::pair<std::size_t, Point>> keyed;
    for (Point x : atom) {
      if (!q.covers(x)) fail(ErrorCode::SupportMismatch, "point " + std::to_string(x) + " covered only by one side");
      keyed.emplace_back(q.atom_of(x), x);
    }
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t i = 0; i < keyed.size();) {
      std::vector<Point> part;
      std::size_t key = keyed[i].first;
      for (; i < keyed.size() && keyed[i].first == key; ++i) part.push_back(keyed[i].second);
      atoms.push_back(std::move(part));
    }
  }
  for (const auto& atom : q.atoms())
    for (Point x : atom)
      if (!p.covers(x)) fail(ErrorCode::SupportMismatch, "point " + std::to_string(x) + " covered only by one side");
  return Partition::from_atoms(p.universe(), std::move(atoms));
}

template <class S>
std::vector<S> cond_expectation(std::span<const S> masses, std::span<const S> values, const Partition& p) {
  if (masses.size() != p.universe() || values.size() != p.universe())
    fail(ErrorCode::ArityMismatch, "conditional expectation: size mismatch");
  std::vector<S> out(values.size(), S(0));
  for (const auto& atom : p.atoms()) {
    S mass = 0;
    S total = 0;
    for (Point x : atom) {
      mass += masses[x];
      total += masses[x] * values[x];
    }
    if (!(mass > 0)) fail(ErrorCode::ZeroMassAtom, "atom containing " + std::to_string(atom.front()) + " has no mass");
    S mean = total / mass;
    for (Point x : atom) out[x] = mean;
  }
  return out;
}

template <class S>
Observable<S> cond_expectation(const FiniteSystem<S>& sys, const Observable<S>& f, const Partition& p) {
  if (f.size() != sys.size()) fail(ErrorCode::ArityMismatch, "observable length differs from system size");
  return Observable<S>(cond_expectation<S>(std::span<const S>(sys.weights()), std::span<const S>(f.values), p));
}

template <class S>
std::vector<ErgodicComponent<S>> ergodic_decomposition(const FiniteSystem<S>& sys, std::span<const std::size_t> axes) {
  Partition p = invariant_partition(sys, axes);
  std::vector<ErgodicComponent<S>> components;
  for (const auto& atom : p.atoms()) {
    ErgodicComponent<S> c;
    c.weight = 0;
    for (Point x : atom) c.weight += sys.weight(x);
    c.orbit = atom;
    c.measure.assign(sys.size(), S(0));
    for (Point x : atom) c.measure[x] = sys.weight(x) / c.weight;
    components.push_back(std::move(c));
  }
  return components;
}

template <class S>
bool is_ergodic(const FiniteSystem<S>& sys, std::span<const std::size_t> axes) {
  return invariant_partition(sys, axes).atom_count() == 1;
}

template <class S>
Quotient<S> quotient_system(const FiniteSystem<S>& sys, const Partition& p) {
  if (p.universe() != sys.size()) fail(ErrorCode::SupportMismatch, "partition universe differs from system size");
  for (Point x : sys.support())
    if (!p.covers(x)) fail(ErrorCode::SupportMismatch, "partition does not cover support point " + std::to_string(x));
  std::size_t n = p.atom_count();
  std::vector<Permutation> transforms;
  for (std::size_t axis = 0; axis < sys.dim(); ++axis) {
    Permutation t(n);
    for (std::size_t a = 0; a < n; ++a) {
      const auto& atom = p.atom(a);
      std::size_t image = p.atom_of(sys.apply(axis, atom.front()));
      for (Point x : atom) {
        if (p.atom_of(sys.apply(axis, x)) != image)
          fail(ErrorCode::NotInvariantPartition, "T" + std::to_string(axis + 1) + " splits atom " + std::to_string(a) +
                                                     " (points " + std::to_string(atom.front()) + " and " +
                                                     std::to_string(x) + ")");
      }
      t[a] = static_cast<Point>(image);
    }
    transforms.push_back(std::move(t));
  }
  std::vector<S> weights(n, S(0));
  for (std::size_t a = 0; a < n; ++a)
    for (Point x : p.atom(a)) weights[a] += sys.weight(x);
  Quotient<S> q{validate_system<S>(n, std::move(weights), std::move(transforms),
                                   Limits{std::max<std::size_t>(n, 1), std::max<std::size_t>(sys.dim(), 1),
                                          Limits{}.max_support}),
                std::vector<Point>(sys.size(), kNoPoint)};
  for (Point x : sys.support()) q.factor_map[x] = static_cast<Point>(p.atom_of(x));
  return q;
}

template <class S>
Observable<S> pull_back(const Quotient<S>& q, const Observable<S>& g) {
  Observable<S> f = Observable<S>::constant(q.factor_map.size(), S(0));
  for (std::size_t x = 0; x < q.factor_map.size(); ++x)
    if (q.factor_map[x] != kNoPoint) f[static_cast<Point>(x)] = g[q.factor_map[x]];
  return f;
}

#define ERGO_INSTANTIATE_SIGMA(S)                                                                               \
  template Partition invariant_partition<S>(const FiniteSystem<S>&, std::span<const std::size_t>);             \
  template std::vector<S> cond_expectation<S>(std::span<const S>, std::span<const S>, const Partition&);       \
  template Observable<S> cond_expectation<S>(const FiniteSystem<S>&, const Observable<S>&, const Partition&);  \
  template std::vector<ErgodicComponent<S>> ergodic_decomposition<S>(const FiniteSystem<S>&,                   \
                                                                     std::span<const std::size_t>);            \
  template bool is_ergodic<S>(const FiniteSystem<S>&, std::span<const std::size_t>);                           \
  template Quotient<S> quotient_system<S>(const FiniteSystem<S>&, const Partition&);                           \
  template Observable<S> pull_back<S>(const Quotient<S>&, const Observable<S>&);

ERGO_INSTANTIATE_SIGMA(double)
ERGO_INSTANTIATE_SIGMA(Rational)

}  // namespace ergo
