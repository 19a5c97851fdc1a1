#include "ergo/tuple_set.hpp"

#include <algorithm>
#include <bit>

namespace ergo {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

}  // namespace

std::uint64_t hash_tuple(std::span<const Point> tuple) {
  std::uint64_t h = 0x9e3779b97f4a7c15ull ^ tuple.size();
  for (Point p : tuple) h = mix(h + p + 0x9e3779b97f4a7c15ull);
  return h;
}

TupleSet::TupleSet(std::size_t arity) : arity_(arity) { rehash(16); }

void TupleSet::reserve(std::size_t rows) {
  data_.reserve(rows * arity_);
  hashes_.reserve(rows);
  if (rows * 2 > slots_.size()) rehash(std::bit_ceil(rows * 2));
}

std::size_t TupleSet::probe(std::span<const Point> tuple, std::uint64_t hash) const {
  std::size_t mask = slots_.size() - 1;
  std::size_t i = hash & mask;
  for (;;) {
    std::int64_t s = slots_[i];
    if (s < 0) return i;
    auto id = static_cast<std::size_t>(s);
    if (hashes_[id] == hash && std::equal(tuple.begin(), tuple.end(), data_.begin() + id * arity_)) return i;
    i = (i + 1) & mask;
  }
}

void TupleSet::rehash(std::size_t capacity) {
  slots_.assign(capacity, -1);
  std::size_t mask = capacity - 1;
  for (std::size_t id = 0; id < rows_; ++id) {
    std::size_t i = hashes_[id] & mask;
    while (slots_[i] >= 0) i = (i + 1) & mask;
    slots_[i] = static_cast<std::int64_t>(id);
  }
}

std::size_t TupleSet::insert(std::span<const Point> tuple) {
  std::uint64_t h = hash_tuple(tuple);
  std::size_t i = probe(tuple, h);
  if (slots_[i] >= 0) return static_cast<std::size_t>(slots_[i]);
  std::size_t id = rows_++;
  data_.insert(data_.end(), tuple.begin(), tuple.end());
  hashes_.push_back(h);
  slots_[i] = static_cast<std::int64_t>(id);
  if (rows_ * 2 > slots_.size()) rehash(slots_.size() * 2);
  return id;
}

std::optional<std::size_t> TupleSet::find(std::span<const Point> tuple) const {
  std::size_t i = probe(tuple, hash_tuple(tuple));
  if (slots_[i] < 0) return std::nullopt;
  return static_cast<std::size_t>(slots_[i]);
}

}  // namespace ergo
