#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "acoustic/histogram.hpp"

using namespace acoustic;
using acoustic::timeutil::parse_iso8601;

namespace {

std::vector<histo::IntensitySample> at_10hz(timeutil::TimeMs start, const std::vector<int>& values) {
  std::vector<histo::IntensitySample> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out.push_back({values[i], start + static_cast<timeutil::TimeMs>(i) * 100});
  return out;
}

}  // namespace

TEST_SUITE("histogram") {
  TEST_CASE("bin boundaries are upper-edge inclusive") {
    CHECK(histo::bin_sample(0) == 1);
    CHECK(histo::bin_sample(6) == 1);
    CHECK(histo::bin_sample(7) == 2);
    CHECK(histo::bin_sample(10) == 2);
    CHECK(histo::bin_sample(11) == 3);
    CHECK(histo::bin_sample(20) == 3);
    CHECK(histo::bin_sample(21) == 4);
    CHECK(histo::bin_sample(50) == 4);
    CHECK(histo::bin_sample(51) == 5);
    CHECK(histo::bin_sample(1023) == 5);
  }

  TEST_CASE("out-of-range values name the offender") {
    CHECK_THROWS_WITH_AS(histo::bin_sample(-1), doctest::Contains("-1"), std::domain_error);
    CHECK_THROWS_WITH_AS(histo::bin_sample(1024), doctest::Contains("1024"), std::domain_error);
  }

  TEST_CASE("bin_sample is monotone in the value") {
    int prev = 1;
    for (int v = 0; v <= histo::kMaxLevel; ++v) {
      const int bin = histo::bin_sample(v);
      CHECK(bin >= prev);
      prev = bin;
    }
  }

  TEST_CASE("ten-sample example") {
    const std::vector<int> values{11, 2, 7, 33, 55, 80, 28, 7, 9, 13};
    const auto h = histo::build_histogram(values);
    CHECK(h.bins == std::array<std::int64_t, 5>{1, 3, 2, 2, 2});
  }

  TEST_CASE("all-quiet window") {
    const std::vector<int> values(3000, 0);
    const auto h = histo::build_histogram(values);
    CHECK(h.bins == std::array<std::int64_t, 5>{3000, 0, 0, 0, 0});
  }

  TEST_CASE("600 samples per bin range") {
    // Counting oracle: emit 600 values from each bin's range, shuffled.
    std::vector<int> values;
    const std::pair<int, int> ranges[] = {{0, 6}, {7, 10}, {11, 20}, {21, 50}, {51, 1023}};
    std::mt19937 rng(7);
    for (const auto& [lo, hi] : ranges) {
      std::uniform_int_distribution<int> dist(lo, hi);
      for (int i = 0; i < 600; ++i) values.push_back(dist(rng));
    }
    std::shuffle(values.begin(), values.end(), rng);
    const auto h = histo::build_histogram(values);
    CHECK(h.bins == std::array<std::int64_t, 5>{600, 600, 600, 600, 600});
  }

  TEST_CASE("partition property: bins always sum to the sample count") {
    std::mt19937 rng(21);
    std::uniform_int_distribution<int> level(0, 1023);
    std::uniform_int_distribution<int> len(1, 500);
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<int> values(len(rng));
      for (auto& v : values) v = level(rng);
      CHECK(histo::build_histogram(values).total() ==
            static_cast<std::int64_t>(values.size()));
    }
  }

  TEST_CASE("empty window rejected") {
    CHECK_THROWS_AS(histo::build_histogram(std::vector<int>{}), std::invalid_argument);
  }

  TEST_CASE("windowize: one exact window") {
    const auto start = *parse_iso8601("2016-07-16T14:00:00Z");
    const auto windows = histo::windowize(at_10hz(start, std::vector<int>(3000, 3)), "n1");
    REQUIRE(windows.size() == 1);
    CHECK(windows[0].window_start == start);
    CHECK(windows[0].complete);
    CHECK(windows[0].histogram.bins[0] == 3000);
    CHECK(windows[0].node_id == "n1");
  }

  TEST_CASE("windowize: partial window flagged incomplete") {
    const auto start = *parse_iso8601("2016-07-16T14:00:00Z");
    const auto windows = histo::windowize(at_10hz(start, std::vector<int>(1500, 8)), "n1");
    REQUIRE(windows.size() == 1);
    CHECK_FALSE(windows[0].complete);
    CHECK(windows[0].histogram.total() == 1500);
  }

  TEST_CASE("windowize: samples spanning a boundary split in two") {
    const auto start = *parse_iso8601("2016-07-16T14:03:00Z");
    // 14:03 to 14:07 at 10 Hz: 2400 samples over two windows.
    const auto windows = histo::windowize(at_10hz(start, std::vector<int>(2400, 1)), "n1");
    REQUIRE(windows.size() == 2);
    CHECK(windows[0].window_start == *parse_iso8601("2016-07-16T14:00:00Z"));
    CHECK(windows[1].window_start == *parse_iso8601("2016-07-16T14:05:00Z"));
    CHECK_FALSE(windows[0].complete);
    CHECK_FALSE(windows[1].complete);
    CHECK(windows[0].histogram.total() == 1200);
    CHECK(windows[1].histogram.total() == 1200);
  }

  TEST_CASE("windowize: gaps produce no window") {
    const auto start = *parse_iso8601("2016-07-16T14:00:00Z");
    auto samples = at_10hz(start, std::vector<int>(10, 1));
    auto later = at_10hz(start + 3 * timeutil::kMsPerWindow, std::vector<int>(10, 1));
    samples.insert(samples.end(), later.begin(), later.end());
    const auto windows = histo::windowize(samples, "n1");
    REQUIRE(windows.size() == 2);
    CHECK(windows[1].window_start - windows[0].window_start == 3 * timeutil::kMsPerWindow);
  }

  TEST_CASE("windowize: decreasing timestamps rejected") {
    const auto start = *parse_iso8601("2016-07-16T14:00:00Z");
    std::vector<histo::IntensitySample> samples{{1, start + 100}, {1, start}};
    CHECK_THROWS_AS(histo::windowize(samples, "n1"), std::invalid_argument);
  }

  TEST_CASE("windowize: stable under reordering of equal timestamps") {
    const auto start = *parse_iso8601("2016-07-16T14:00:00Z");
    std::vector<histo::IntensitySample> a{{5, start}, {55, start}, {9, start + 100}};
    std::vector<histo::IntensitySample> b{{55, start}, {5, start}, {9, start + 100}};
    const auto wa = histo::windowize(a, "n1");
    const auto wb = histo::windowize(b, "n1");
    REQUIRE(wa.size() == wb.size());
    CHECK(wa[0].histogram.bins == wb[0].histogram.bins);
  }
}
