#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ergo {

using Point = std::uint32_t;

/// Insertion-ordered set of fixed-arity point tuples, stored flat with an
/// open-addressing index. Row ids are assigned in insertion order.
class TupleSet {
 public:
  explicit TupleSet(std::size_t arity = 1);

  std::size_t arity() const noexcept { return arity_; }
  std::size_t size() const noexcept { return rows_; }

  /// Returns the row id of `tuple`, inserting it if absent.
  std::size_t insert(std::span<const Point> tuple);
  std::optional<std::size_t> find(std::span<const Point> tuple) const;

  std::span<const Point> row(std::size_t id) const {
    return {data_.data() + id * arity_, arity_};
  }
  const std::vector<Point>& data() const noexcept { return data_; }

  void reserve(std::size_t rows);

 private:
  std::size_t probe(std::span<const Point> tuple, std::uint64_t hash) const;
  void rehash(std::size_t capacity);

  std::size_t arity_;
  std::size_t rows_ = 0;
  std::vector<Point> data_;
  std::vector<std::uint64_t> hashes_;
  std::vector<std::int64_t> slots_;  // -1 = empty, else row id
};

std::uint64_t hash_tuple(std::span<const Point> tuple);

}  // namespace ergo
