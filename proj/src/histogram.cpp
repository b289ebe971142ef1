#include "acoustic/histogram.hpp"

#include <stdexcept>
#include <string>

namespace acoustic::histo {

int bin_sample(int value) {
  if (value < 0 || value > kMaxLevel)
    throw std::domain_error("intensity value " + std::to_string(value) + " outside [0, " +
                            std::to_string(kMaxLevel) + "]");
  if (value <= 6) return 1;
  if (value <= 10) return 2;
  if (value <= 20) return 3;
  if (value <= 50) return 4;
  return 5;
}

Histogram build_histogram(std::span<const int> values) {
  if (values.empty()) throw std::invalid_argument("cannot build a histogram from an empty window");
  Histogram h;
  for (int v : values) ++h.bins[static_cast<std::size_t>(bin_sample(v) - 1)];
  return h;
}

Histogram build_histogram(std::span<const IntensitySample> samples) {
  if (samples.empty()) throw std::invalid_argument("cannot build a histogram from an empty window");
  Histogram h;
  for (const auto& s : samples) ++h.bins[static_cast<std::size_t>(bin_sample(s.value) - 1)];
  return h;
}

std::vector<SensorWindow> windowize(std::span<const IntensitySample> samples,
                                    std::string_view node_id) {
  std::vector<SensorWindow> out;
  timeutil::TimeMs prev = INT64_MIN;
  timeutil::TimeMs current_start = INT64_MIN;
  std::int64_t count = 0;

  auto flush = [&](const Histogram& h) {
    if (count == 0) return;
    SensorWindow w;
    w.node_id = std::string(node_id);
    w.window_start = current_start;
    w.histogram = h;
    w.complete = (count == kSamplesPerWindow);
    out.push_back(std::move(w));
  };

  Histogram h;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.timestamp < prev)
      throw std::invalid_argument("samples out of order at index " + std::to_string(i) + " (" +
                                  timeutil::format_iso8601(s.timestamp) + " after " +
                                  timeutil::format_iso8601(prev) + ")");
    prev = s.timestamp;
    const timeutil::TimeMs start = timeutil::window_floor(s.timestamp);
    if (start != current_start) {
      flush(h);
      h = Histogram{};
      count = 0;
      current_start = start;
    }
    ++h.bins[static_cast<std::size_t>(bin_sample(s.value) - 1)];
    ++count;
  }
  flush(h);
  return out;
}

}  // namespace acoustic::histo
