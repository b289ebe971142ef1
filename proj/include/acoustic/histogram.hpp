#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "acoustic/time_utils.hpp"

namespace acoustic::histo {

inline constexpr int kBinCount = 5;
inline constexpr int kMaxLevel = 1023;
inline constexpr int kSamplesPerWindow = 3000;  // 5 min at 10 Hz

struct IntensitySample {
  int value = 0;  // 10-bit ADC level, 0..1023
  timeutil::TimeMs timestamp = 0;
};

struct Histogram {
  std::array<std::int64_t, kBinCount> bins{};

  std::int64_t total() const {
    std::int64_t s = 0;
    for (auto b : bins) s += b;
    return s;
  }
};

struct SensorWindow {
  std::string node_id;
  timeutil::TimeMs window_start = 0;  // aligned to a 5-minute boundary
  Histogram histogram;
  bool complete = false;  // exactly 3000 samples observed
};

// Intensity ranges: 0..6 -> 1, 7..10 -> 2, 11..20 -> 3, 21..50 -> 4, >50 -> 5
// (upper edges inclusive). Throws std::domain_error outside 0..1023.
int bin_sample(int value);

// Counts samples per bin. Throws std::invalid_argument on empty input or
// std::domain_error on an out-of-range value.
Histogram build_histogram(std::span<const int> values);
Histogram build_histogram(std::span<const IntensitySample> samples);

// Splits a time-ordered sample stream into 5-minute wall-clock windows.
// Intervals with no samples produce no window. Throws std::invalid_argument
// if timestamps decrease.
std::vector<SensorWindow> windowize(std::span<const IntensitySample> samples,
                                    std::string_view node_id);

}  // namespace acoustic::histo
