#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "bundl/labelnoise.hpp"

using namespace bundl;

TEST_CASE("noise kind names round-trip") {
  for (const auto kind :
       {NoiseKind::clean, NoiseKind::random, NoiseKind::over, NoiseKind::under})
    CHECK(noise_kind_from(to_string(kind)) == kind);
  CHECK_THROWS_AS(noise_kind_from("bogus"), std::invalid_argument);
  CHECK(noise_tag(NoiseKind::over, 0.3) == "over_0.30");
  CHECK(noise_tag(NoiseKind::random, 0.1) == "random_0.10");
  CHECK(noise_tag(NoiseKind::clean, 0.5) == "clean");
}

TEST_CASE("window_labels: majority-overlap rule") {
  // interval [100.4, 101.6) overlaps windows 100 and 101 by 0.6 s each
  const auto track = window_labels({{100.4, 101.6}}, 600.0, 1.0);
  CHECK(track.labels.size() == 600);
  CHECK(track.labels[99] == 0);
  CHECK(track.labels[100] == 1);
  CHECK(track.labels[101] == 1);
  CHECK(track.labels[102] == 0);

  // exactly half coverage counts as positive
  const auto half = window_labels({{10.5, 11.5}}, 20.0, 1.0);
  CHECK(half.labels[10] == 1);
  CHECK(half.labels[11] == 1);

  // just under half does not
  const auto under_half = window_labels({{10.505, 11.0}}, 20.0, 1.0);
  CHECK(under_half.labels[10] == 0);
}

TEST_CASE("window_labels: rejects a window that does not divide the length") {
  CHECK_THROWS_AS(window_labels({}, 10.5, 1.0), std::invalid_argument);
  CHECK_NOTHROW(window_labels({}, 10.0, 2.5));
}

TEST_CASE("corrupt: clean kind is the identity") {
  const auto track = window_labels({{100.0, 200.0}}, 600.0, 1.0);
  const auto same = corrupt(track, NoiseKind::clean, 0.77, 123, 600.0);
  CHECK(same.labels == track.labels);
  CHECK(same.intervals.size() == 1);
  CHECK(same.intervals[0] == track.intervals[0]);
}

TEST_CASE("corrupt: severity must lie in (0, 1) for non-clean kinds") {
  const auto track = window_labels({{100.0, 200.0}}, 600.0, 1.0);
  CHECK_THROWS_AS(corrupt(track, NoiseKind::over, 0.0, 1, 600.0), std::invalid_argument);
  CHECK_THROWS_AS(corrupt(track, NoiseKind::over, 1.0, 1, 600.0), std::invalid_argument);
  CHECK_THROWS_AS(corrupt(track, NoiseKind::random, -0.1, 1, 600.0), std::invalid_argument);
}

TEST_CASE("corrupt over: symmetric extension oracle") {
  // [100, 200) at severity 0.3: 30 s of growth, 15 s per side -> [85, 215)
  const auto track = window_labels({{100.0, 200.0}}, 600.0, 1.0);
  const auto noisy = corrupt(track, NoiseKind::over, 0.3, 7, 600.0);
  REQUIRE(noisy.intervals.size() == 1);
  CHECK(noisy.intervals[0].onset_s == doctest::Approx(85.0).epsilon(1e-12));
  CHECK(noisy.intervals[0].offset_s == doctest::Approx(215.0).epsilon(1e-12));
  CHECK(noisy.labels[84] == 0);
  CHECK(noisy.labels[85] == 1);
  CHECK(noisy.labels[214] == 1);
  CHECK(noisy.labels[215] == 0);
}

TEST_CASE("corrupt over: odd quantum goes to the offset side") {
  // duration 30.005 s = 6001 quanta; severity 0.5 -> llround(3000.5) = 3001
  // quanta of growth: 1500 before the onset, 1501 after the offset.
  const auto track = window_labels({{100.0, 130.005}}, 600.0, 1.0, 0.005);
  const auto noisy = corrupt(track, NoiseKind::over, 0.5, 7, 600.0, 0.005);
  REQUIRE(noisy.intervals.size() == 1);
  CHECK(noisy.intervals[0].onset_s == doctest::Approx(100.0 - 1500 * 0.005).epsilon(1e-12));
  CHECK(noisy.intervals[0].offset_s == doctest::Approx(130.005 + 1501 * 0.005).epsilon(1e-12));
}

TEST_CASE("corrupt over: growth clipped at an edge moves to the other side") {
  // [550, 600) at severity 0.5: 25 s growth, 12.5 each; the offset side has
  // no room, so all 25 s extend the onset side -> [525, 600).
  const auto track = window_labels({{550.0, 600.0}}, 600.0, 1.0);
  const auto noisy = corrupt(track, NoiseKind::over, 0.5, 7, 600.0);
  REQUIRE(noisy.intervals.size() == 1);
  CHECK(noisy.intervals[0].onset_s == doctest::Approx(525.0).epsilon(1e-12));
  CHECK(noisy.intervals[0].offset_s == doctest::Approx(600.0).epsilon(1e-12));
}

TEST_CASE("corrupt over: per-side extension is capped at 60 s") {
  // [200, 400) at severity 0.9: 180 s growth, 90 per side, capped to 60.
  const auto track = window_labels({{200.0, 400.0}}, 600.0, 1.0);
  const auto noisy = corrupt(track, NoiseKind::over, 0.9, 7, 600.0);
  REQUIRE(noisy.intervals.size() == 1);
  CHECK(noisy.intervals[0].onset_s == doctest::Approx(140.0).epsilon(1e-12));
  CHECK(noisy.intervals[0].offset_s == doctest::Approx(460.0).epsilon(1e-12));
}

TEST_CASE("corrupt under: symmetric shrink oracle") {
  // [100, 200) at severity 0.3: shrink 30 s, 15 per side -> [115, 185)
  const auto track = window_labels({{100.0, 200.0}}, 600.0, 1.0);
  const auto noisy = corrupt(track, NoiseKind::under, 0.3, 7, 600.0);
  REQUIRE(noisy.intervals.size() == 1);
  CHECK(noisy.intervals[0].onset_s == doctest::Approx(115.0).epsilon(1e-12));
  CHECK(noisy.intervals[0].offset_s == doctest::Approx(185.0).epsilon(1e-12));
}

TEST_CASE("corrupt under: duration never drops below the 29 s floor") {
  // [100, 140) at severity 0.9 would leave 4 s; the floor keeps 29 s,
  // so the shrink is 11 s, split 5.5 per side -> [105.5, 134.5).
  const auto track = window_labels({{100.0, 140.0}}, 600.0, 1.0);
  const auto noisy = corrupt(track, NoiseKind::under, 0.9, 7, 600.0);
  REQUIRE(noisy.intervals.size() == 1);
  CHECK(noisy.intervals[0].offset_s - noisy.intervals[0].onset_s ==
        doctest::Approx(29.0).epsilon(1e-12));
  CHECK(noisy.intervals[0].onset_s == doctest::Approx(105.5).epsilon(1e-12));
  CHECK(noisy.intervals[0].offset_s == doctest::Approx(134.5).epsilon(1e-12));
}

TEST_CASE("corrupt under: noisy interval is contained in the clean one") {
  const auto track = window_labels({{93.0, 451.0}}, 600.0, 1.0);
  const auto noisy = corrupt(track, NoiseKind::under, 0.5, 11, 600.0);
  REQUIRE(noisy.intervals.size() == 1);
  CHECK(noisy.intervals[0].onset_s >= 93.0);
  CHECK(noisy.intervals[0].offset_s <= 451.0);
}

TEST_CASE("corrupt over/under: require exactly one interval") {
  const auto two = window_labels({{10.0, 40.0}, {100.0, 140.0}}, 600.0, 1.0);
  CHECK_THROWS_AS(corrupt(two, NoiseKind::over, 0.3, 1, 600.0), std::invalid_argument);
  CHECK_THROWS_AS(corrupt(two, NoiseKind::under, 0.3, 1, 600.0), std::invalid_argument);
  CHECK_NOTHROW(corrupt(two, NoiseKind::random, 0.3, 1, 600.0));
}

TEST_CASE("corrupt random: deterministic, flips about the right fraction") {
  const auto track = window_labels({{100.0, 200.0}}, 600.0, 1.0);
  const auto a = corrupt(track, NoiseKind::random, 0.1, 5, 600.0);
  const auto b = corrupt(track, NoiseKind::random, 0.1, 5, 600.0);
  CHECK(a.labels == b.labels);
  const auto c = corrupt(track, NoiseKind::random, 0.1, 6, 600.0);
  CHECK(a.labels != c.labels);  // different seed, different flips

  int flips = 0;
  for (std::size_t w = 0; w < track.labels.size(); ++w) flips += a.labels[w] != track.labels[w];
  // binomial(600, 0.1): mean 60, sigma ~7.35; allow 4 sigma
  CHECK(flips > 30);
  CHECK(flips < 90);
}

TEST_CASE("corrupt random: intervals are the maximal positive runs") {
  const auto track = window_labels({{5.0, 8.0}}, 20.0, 1.0);
  const auto noisy = corrupt(track, NoiseKind::random, 0.2, 3, 20.0);
  // rebuild runs from the labels and compare
  std::vector<Interval> runs;
  for (std::size_t w = 0; w < noisy.labels.size();) {
    if (noisy.labels[w] == 0) {
      ++w;
      continue;
    }
    std::size_t e = w;
    while (e < noisy.labels.size() && noisy.labels[e] == 1) ++e;
    runs.push_back({static_cast<double>(w), static_cast<double>(e)});
    w = e;
  }
  REQUIRE(noisy.intervals.size() == runs.size());
  for (std::size_t i = 0; i < runs.size(); ++i) CHECK(noisy.intervals[i] == runs[i]);
}
