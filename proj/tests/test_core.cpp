#include <random>

#include "doctest.h"
#include "ergo/core.hpp"
#include "ergo/errors.hpp"
#include "fixtures.hpp"

using namespace ergo;
using fx::Q;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("E1 validates") {
  auto sys = validate_system<Q>(2, {Q(1, 2), Q(1, 2)}, {{1, 0}});
  CHECK(sys.size() == 2);
  CHECK(sys.dim() == 1);
  CHECK(sys.support() == std::vector<Point>{0, 1});
}

TEST_CASE("validation errors name their family") {
  CHECK(code_of([] { validate_system<Q>(3, {Q(1, 3), Q(1, 3), Q(1, 3)}, {{1, 0, 2}, {1, 2, 0}}); }) ==
        ErrorCode::CommutationViolation);
  CHECK(code_of([] { validate_system<Q>(2, {Q(3, 4), Q(1, 4)}, {{1, 0}}); }) == ErrorCode::MeasureNotPreserved);
  CHECK(code_of([] { validate_system<Q>(2, {Q(1, 2), Q(1, 4)}, {{0, 1}}); }) == ErrorCode::BadWeights);
  CHECK(code_of([] { validate_system<Q>(2, {Q(3, 2), Q(-1, 2)}, {{0, 1}}); }) == ErrorCode::BadWeights);
  CHECK(code_of([] { validate_system<Q>(2, {Q(1, 2), Q(1, 2)}, {{0, 0}}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { uniform_system<Q>(65, {identity_permutation(65)}); }) == ErrorCode::CapExceeded);
  CHECK(exit_code_for(ErrorCode::CommutationViolation) == 3);
  CHECK(exit_code_for(ErrorCode::CapExceeded) == 4);
  CHECK(exit_code_for(ErrorCode::ParseError) == 2);
}

TEST_CASE("commutation message names the pair and the point") {
  try {
    validate_system<Q>(3, {Q(1, 3), Q(1, 3), Q(1, 3)}, {{1, 0, 2}, {1, 2, 0}});
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(msg.find("T1") != std::string::npos);
    CHECK(msg.find("T2") != std::string::npos);
    CHECK(msg.find("point 0") != std::string::npos);
  }
}

TEST_CASE("float mode accepts weights within tolerance") {
  auto sys = validate_system<double>(3, {1.0 / 3, 1.0 / 3, 1.0 / 3}, {{1, 2, 0}});
  CHECK(sys.size() == 3);
}

TEST_CASE("apply_word examples") {
  auto e1 = fx::e1();
  CHECK(apply_word(e1, {{1}}, 0) == 1);
  CHECK(apply_word(e1, {{2}}, 0) == 0);
  CHECK(apply_word(fx::e3(), {{1, 1}}, 0) == 3);
  CHECK(apply_word(fx::e3(), {{-1, 0}}, 0) == 3);
}

TEST_CASE("apply_word is additive and matches repeated application") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 40; ++it) {
    std::size_t m = 2 + rng() % 9, d = 1 + rng() % 3;
    auto sys = oracle::random_power_system(rng, m, d);
    for (int k = 0; k < 10; ++k) {
      TransformWord a, b, ab;
      for (std::size_t i = 0; i < d; ++i) {
        std::int64_t x = static_cast<std::int64_t>(rng() % 21) - 10, y = static_cast<std::int64_t>(rng() % 21) - 10;
        a.exponents.push_back(x);
        b.exponents.push_back(y);
        ab.exponents.push_back(x + y);
      }
      Point p = static_cast<Point>(rng() % m);
      CHECK(apply_word(sys, ab, p) == apply_word(sys, a, apply_word(sys, b, p)));
      CHECK(apply_word(sys, a, p) == oracle::act(sys, a.exponents, p));
    }
  }
}

TEST_CASE("joint_period examples and oracle") {
  std::vector<std::size_t> one{0}, both{0, 1};
  CHECK(joint_period(fx::e1(), one) == std::vector<std::uint64_t>{2});
  CHECK(joint_period(fx::e3(), both) == std::vector<std::uint64_t>{4, 2});
  CHECK(joint_period(uniform_system<Q>(3, {identity_permutation(3)}), one) == std::vector<std::uint64_t>{1});
  std::mt19937_64 rng(3);
  for (int it = 0; it < 30; ++it) {
    std::size_t m = 2 + rng() % 11, d = 1 + rng() % 3;
    auto sys = oracle::random_power_system(rng, m, d);
    auto axes = all_axes(d);
    auto periods = joint_period(sys, axes);
    for (std::size_t i = 0; i < d; ++i) CHECK(periods[i] == oracle::order(sys.transform(i)));
    CHECK(common_period(sys, axes) == oracle::joint_order(sys));
  }
}

TEST_CASE("joint_period ignores null points") {
  // T fixes point 2 but swaps 0 and 1; weight on 0,1 only
  auto sys = validate_system<Q>(4, {Q(1, 2), Q(1, 2), Q(0), Q(0)}, {{1, 0, 3, 2}});
  std::vector<std::size_t> one{0};
  CHECK(joint_period(sys, one) == std::vector<std::uint64_t>{2});
  auto cyc = validate_system<Q>(4, {Q(1), Q(0), Q(0), Q(0)}, {{0, 2, 3, 1}});
  CHECK(joint_period(cyc, one) == std::vector<std::uint64_t>{1});
}

TEST_CASE("product_system") {
  auto sq = product_system(fx::e1(), fx::e1());
  CHECK(sq.size() == 4);
  for (Point x = 0; x < 4; ++x) CHECK(sq.weight(x) == Q(1, 4));
  CHECK(sq.transform(0) == Permutation{3, 2, 1, 0});
  auto one = uniform_system<Q>(1, {{0}});
  auto copy = product_system(fx::e3(), pad_dimension(one, 2));
  CHECK(copy.transforms() == fx::e3().transforms());
  CHECK(copy.weights() == fx::e3().weights());
  auto e1e3 = product_system(pad_dimension(fx::e1(), 2), fx::e3());
  CHECK(e1e3.size() == 8);
  CHECK(code_of([] { product_system(fx::e1(), fx::e3()); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("measure preservation holds pointwise on random systems") {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 20; ++it) {
    auto sys = oracle::random_power_system(rng, 2 + rng() % 9, 1 + rng() % 3);
    for (std::size_t i = 0; i < sys.dim(); ++i)
      for (Point x = 0; x < sys.size(); ++x) CHECK(sys.weight(sys.apply(i, x)) == sys.weight(x));
  }
}

TEST_CASE("restrict_weights renormalizes and keeps axes") {
  auto sys = uniform_system<Q>(4, {oracle::shift(4, 2), oracle::shift(4, 1)});
  std::vector<Point> orbit{0, 2};
  std::vector<std::size_t> keep{0};
  auto part = restrict_weights(sys, orbit, keep);
  CHECK(part.dim() == 1);
  CHECK(part.weight(0) == Q(1, 2));
  CHECK(part.weight(1) == Q(0));
  CHECK(part.support() == std::vector<Point>{0, 2});
}

TEST_CASE("scalar parsing") {
  CHECK(parse_rational("3/4") == Q(3, 4));
  CHECK(parse_rational("-0.25") == Q(-1, 4));
  CHECK(parse_rational("1e-2") == Q(1, 100));
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rational("abc"), ParseError);
  CHECK(format_scalar(parse_rational("2/4")) == "1/2");
  CHECK(format_scalar(Q(-3)) == "-3");
}
