#pragma once

// Brute-force reference computations, written straight from the definitions
// with dense maps and repeated application. They share no algorithm with the
// library: no cycle tables, no union-find, no residue boxes.

#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "ergo/core.hpp"
#include "ergo/cubes.hpp"

namespace oracle {

using ergo::Permutation;
using ergo::Point;
using Q = ergo::Rational;
using Tuple = std::vector<Point>;
using Measure = std::map<Tuple, Q>;

inline Point step(const Permutation& p, Point x, std::int64_t n) {
  if (n >= 0) {
    for (std::int64_t i = 0; i < n; ++i) x = p[x];
    return x;
  }
  for (std::int64_t i = 0; i < -n; ++i) {
    Point y = 0;
    while (p[y] != x) ++y;
    x = y;
  }
  return x;
}

inline Permutation power(const Permutation& p, std::int64_t n) {
  Permutation out(p.size());
  for (Point x = 0; x < p.size(); ++x) out[x] = step(p, x, n);
  return out;
}

inline Permutation shift(std::size_t m, std::int64_t s) {
  Permutation p(m);
  auto mm = static_cast<std::int64_t>(m);
  for (std::size_t x = 0; x < m; ++x) p[x] = static_cast<Point>(((static_cast<std::int64_t>(x) + s) % mm + mm) % mm);
  return p;
}

// Least L >= 1 with p^L = id on all points.
inline std::uint64_t order(const Permutation& p) {
  Permutation q = p;
  std::uint64_t n = 1;
  Permutation id(p.size());
  std::iota(id.begin(), id.end(), Point{0});
  while (q != id) {
    q = power(p, static_cast<std::int64_t>(++n));
  }
  return n;
}

template <class S>
std::uint64_t joint_order(const ergo::FiniteSystem<S>& sys) {
  std::uint64_t l = 1;
  for (const auto& t : sys.transforms()) l = std::lcm(l, order(t));
  return l;
}

// Orbits of the maps on the given set, by repeated closure.
inline std::vector<std::set<Tuple>> orbits(const std::set<Tuple>& points,
                                           const std::vector<std::vector<Permutation>>& maps) {
  std::vector<std::set<Tuple>> out;
  std::set<Tuple> seen;
  for (const auto& p : points) {
    if (seen.count(p)) continue;
    std::set<Tuple> orbit{p};
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& u : std::set<Tuple>(orbit))
        for (const auto& map : maps) {
          Tuple v(u.size());
          for (std::size_t i = 0; i < u.size(); ++i) v[i] = map[i][u[i]];
          if (orbit.insert(v).second) grew = true;
        }
    }
    seen.insert(orbit.begin(), orbit.end());
    out.push_back(orbit);
  }
  return out;
}

// μ_{T_1..T_k}: iterated relatively independent self-products over the
// diagonal-invariant sets, first half for ε_k = 0.
inline Measure cube(const ergo::FiniteSystem<Q>& sys, const std::vector<Permutation>& ts) {
  Measure mu;
  for (Point x = 0; x < sys.size(); ++x)
    if (sys.weight(x) != 0) mu[{x}] = sys.weight(x);
  for (const auto& t : ts) {
    std::set<Tuple> support;
    for (const auto& [u, w] : mu) support.insert(u);
    std::size_t arity = mu.begin()->first.size();
    std::vector<Permutation> diag(arity, t);
    Measure next;
    for (const auto& atom : orbits(support, {diag})) {
      Q mass = 0;
      for (const auto& u : atom) mass += mu.at(u);
      for (const auto& u : atom)
        for (const auto& v : atom) {
          Tuple w = u;
          w.insert(w.end(), v.begin(), v.end());
          next[w] = mu.at(u) * mu.at(v) / mass;
        }
    }
    mu = std::move(next);
  }
  return mu;
}

inline Q integrate(const Measure& mu, const std::vector<ergo::Observable<Q>>& fs) {
  Q total = 0;
  for (const auto& [u, w] : mu) {
    Q prod = w;
    for (std::size_t i = 0; i < u.size(); ++i) prod *= fs[i][u[i]];
    total += prod;
  }
  return total;
}

inline Q integrate_same(const Measure& mu, const ergo::Observable<Q>& f) {
  std::vector<ergo::Observable<Q>> fs(mu.begin()->first.size(), f);
  return integrate(mu, fs);
}

// μ^F = (1/L) Σ_{n<L} (T_1^n × ... × T_d^n)_* Δμ with L the joint order.
inline Measure furstenberg(const ergo::FiniteSystem<Q>& sys) {
  std::uint64_t l = joint_order(sys);
  Measure out;
  for (Point x = 0; x < sys.size(); ++x) {
    if (sys.weight(x) == 0) continue;
    for (std::uint64_t n = 0; n < l; ++n) {
      Tuple u;
      for (const auto& t : sys.transforms()) u.push_back(step(t, x, static_cast<std::int64_t>(n)));
      out[u] += sys.weight(x) / Q(static_cast<long>(l));
    }
  }
  return out;
}

inline Measure pointwise(const ergo::FiniteSystem<Q>& sys, Point x) {
  std::uint64_t l = joint_order(sys);
  Measure out;
  for (std::uint64_t n = 0; n < l; ++n) {
    Tuple u;
    for (const auto& t : sys.transforms()) u.push_back(step(t, x, static_cast<std::int64_t>(n)));
    out[u] += Q(1, static_cast<long>(l));
  }
  return out;
}

template <class S>
Measure to_map(const ergo::SparseJoining<S>& j) {
  Measure out;
  for (std::size_t r = 0; r < j.size(); ++r) {
    auto t = j.tuple(r);
    out[Tuple(t.begin(), t.end())] = Q(j.mass(r));
  }
  return out;
}

// E(f | orbits of the listed transforms) by the definition.
inline ergo::Observable<Q> cond_exp(const ergo::FiniteSystem<Q>& sys, const ergo::Observable<Q>& f,
                                    const std::vector<Permutation>& ts) {
  std::set<Tuple> support;
  for (Point x = 0; x < sys.size(); ++x)
    if (sys.weight(x) != 0) support.insert({x});
  std::vector<std::vector<Permutation>> maps;
  for (const auto& t : ts) maps.push_back({t});
  ergo::Observable<Q> out = ergo::Observable<Q>::constant(sys.size(), Q(0));
  for (const auto& atom : orbits(support, maps)) {
    Q mass = 0, sum = 0;
    for (const auto& u : atom) {
      mass += sys.weight(u[0]);
      sum += sys.weight(u[0]) * f[u[0]];
    }
    for (const auto& u : atom) out[u[0]] = sum / mass;
  }
  return out;
}

// ---- averages by direct summation ------------------------------------------

// Π_i T_i^{n_i} x with axes given explicitly.
inline Point act(const ergo::FiniteSystem<Q>& sys, const std::vector<std::int64_t>& n, Point x) {
  for (std::size_t i = 0; i < n.size(); ++i) x = step(sys.transform(i), x, n[i]);
  return x;
}

// Calls body(index vector) for every index in [lo_i, hi_i).
template <class F>
void for_box(const std::vector<std::int64_t>& lo, const std::vector<std::int64_t>& hi, F&& body) {
  std::vector<std::int64_t> idx = lo;
  if (idx.empty()) {
    body(idx);
    return;
  }
  while (true) {
    body(idx);
    std::size_t i = 0;
    while (i < idx.size() && ++idx[i] == hi[i]) {
      idx[i] = lo[i];
      ++i;
    }
    if (i == idx.size()) return;
  }
}

inline Q multiple(const ergo::FiniteSystem<Q>& sys, const std::vector<ergo::Observable<Q>>& fs, Point x,
                  std::int64_t N) {
  Q total = 0;
  for (std::int64_t n = 0; n < N; ++n) {
    Q prod = 1;
    for (std::size_t i = 0; i < fs.size(); ++i) prod *= fs[i][step(sys.transform(i), x, n)];
    total += prod;
  }
  return total / Q(N);
}

// fs has 2^d entries by vertex position; null entries are 1.
inline Q cubic(const ergo::FiniteSystem<Q>& sys, const std::vector<const ergo::Observable<Q>*>& fs, Point x,
               std::int64_t N) {
  std::size_t d = sys.dim();
  Q total = 0;
  std::int64_t cells = 0;
  for_box(std::vector<std::int64_t>(d, 0), std::vector<std::int64_t>(d, N), [&](const auto& n) {
    Q prod = 1;
    for (std::size_t e = 0; e < fs.size(); ++e) {
      if (!fs[e]) continue;
      std::vector<std::int64_t> ne(d);
      for (std::size_t i = 0; i < d; ++i) ne[i] = ((e >> i) & 1u) ? n[i] : 0;
      prod *= (*fs[e])[act(sys, ne, x)];
    }
    total += prod;
    ++cells;
  });
  return total / Q(cells);
}

inline Q averaged_multiple(const ergo::FiniteSystem<Q>& sys, const std::vector<ergo::Observable<Q>>& fs, Point x,
                           std::int64_t N) {
  std::size_t d = sys.dim();
  Q total = 0;
  std::int64_t cells = 0;
  for_box(std::vector<std::int64_t>(d + 1, 0), std::vector<std::int64_t>(d + 1, N), [&](const auto& idx) {
    std::vector<std::int64_t> shift(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(d));
    Point y = act(sys, shift, x);
    Q prod = 1;
    for (std::size_t j = 0; j < d; ++j) prod *= fs[j][step(sys.transform(j), y, idx[d])];
    total += prod;
    ++cells;
  });
  return total / Q(cells);
}

inline Q averaged_cubic(const ergo::FiniteSystem<Q>& sys, const std::vector<ergo::Observable<Q>>& fs, Point x,
                        std::int64_t N) {
  std::size_t d = sys.dim();
  Q total = 0;
  std::int64_t cells = 0;
  for_box(std::vector<std::int64_t>(2 * d, 0), std::vector<std::int64_t>(2 * d, N), [&](const auto& idx) {
    Q prod = 1;
    for (std::size_t e = 0; e < fs.size(); ++e) {
      std::vector<std::int64_t> ne(d);
      for (std::size_t i = 0; i < d; ++i) ne[i] = idx[i] + (((e >> i) & 1u) ? idx[d + i] : 0);
      prod *= fs[e][act(sys, ne, x)];
    }
    total += prod;
    ++cells;
  });
  return total / Q(cells);
}

// S_{σ,N}: m_i in [0,N), n_i in [-m_i, N-1-m_i] for i in σ.
inline Q s_sigma(const ergo::FiniteSystem<Q>& sys, const ergo::Observable<Q>& f, std::uint32_t sigma, Point x,
                 std::int64_t N) {
  std::size_t d = sys.dim();
  std::vector<std::size_t> axes;
  for (std::size_t i = 0; i < d; ++i)
    if ((sigma >> i) & 1u) axes.push_back(i);
  std::size_t k = axes.size();
  Q total = 0;
  for_box(std::vector<std::int64_t>(2 * k, 0), std::vector<std::int64_t>(2 * k, N), [&](const auto& idx) {
    // idx[k + i] encodes n_i + m_i in [0, N)
    Q prod = 1;
    for (std::uint32_t e = 0; e < (1u << d); ++e) {
      if ((e & ~sigma) != 0) continue;
      std::vector<std::int64_t> ne(d, 0);
      for (std::size_t t = 0; t < k; ++t) {
        std::int64_t m = idx[t], n = idx[k + t] - idx[t];
        ne[axes[t]] = m + (((e >> axes[t]) & 1u) ? n : 0);
      }
      prod *= f[act(sys, ne, x)];
    }
    total += prod;
  });
  Q cells = 1;
  for (std::size_t t = 0; t < 2 * k; ++t) cells *= Q(N);
  return total / cells;
}

// Commuting permutations as powers of a seeded random permutation.
inline ergo::FiniteSystem<Q> random_power_system(std::mt19937_64& rng, std::size_t m, std::size_t d) {
  Permutation base(m);
  std::iota(base.begin(), base.end(), Point{0});
  for (std::size_t i = m; i > 1; --i) std::swap(base[i - 1], base[rng() % i]);
  std::vector<Permutation> ts;
  for (std::size_t i = 0; i < d; ++i) ts.push_back(power(base, static_cast<std::int64_t>(rng() % m)));
  return ergo::uniform_system<Q>(m, ts);
}

inline ergo::Observable<Q> random_observable(std::mt19937_64& rng, std::size_t m, int lo = -2, int hi = 2) {
  ergo::Observable<Q> f = ergo::Observable<Q>::constant(m, Q(0));
  for (auto& v : f.values) v = Q(lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)));
  return f;
}

}  // namespace oracle
