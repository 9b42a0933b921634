#include <doctest.h>

#include <stdexcept>

#include "bundl/types.hpp"

using namespace bundl;

TEST_CASE("check_intervals: accepts sorted disjoint in-range intervals") {
  CHECK_NOTHROW(check_intervals({{1.0, 2.0}, {3.0, 5.5}}, 10.0));
  CHECK_NOTHROW(check_intervals({}, 10.0));
  CHECK_NOTHROW(check_intervals({{0.0, 10.0}}, 10.0));
}

TEST_CASE("check_intervals: rejects malformed input") {
  CHECK_THROWS_AS(check_intervals({{2.0, 1.0}}, 10.0), std::invalid_argument);   // reversed
  CHECK_THROWS_AS(check_intervals({{-1.0, 2.0}}, 10.0), std::invalid_argument);  // negative
  CHECK_THROWS_AS(check_intervals({{1.0, 11.0}}, 10.0), std::invalid_argument);  // past end
  CHECK_THROWS_AS(check_intervals({{3.0, 5.0}, {4.0, 6.0}}, 10.0),
                  std::invalid_argument);  // overlap
  CHECK_THROWS_AS(check_intervals({{5.0, 6.0}, {1.0, 2.0}}, 10.0),
                  std::invalid_argument);  // unsorted
}

TEST_CASE("interval duration and overlap") {
  const Interval a{2.0, 5.0};
  CHECK(a.duration() == 3.0);
  CHECK(overlap_s(a, {4.0, 8.0}) == doctest::Approx(1.0));
  CHECK(overlap_s(a, {5.0, 8.0}) == 0.0);  // half-open: touching is disjoint
  CHECK(overlap_s(a, {0.0, 10.0}) == doctest::Approx(3.0));
  CHECK(overlap_s(a, {6.0, 7.0}) == 0.0);
}
