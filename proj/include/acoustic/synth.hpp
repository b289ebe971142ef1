#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "acoustic/histogram.hpp"
#include "acoustic/time_utils.hpp"

namespace acoustic::synth {

struct HourProfile {
  double mean = 0.0;  // ADC level
  double std = 1.0;
};

// Day/night shape with a midday plateau and an evening peak.
std::array<HourProfile, 24> urban_profile();
// Constant-level background, handy for rain-focused runs.
std::array<HourProfile, 24> flat_profile(double mean = 12.0, double std = 4.0);

struct SynthConfig {
  int node_count = 7;
  int days = 14;
  std::uint64_t seed = 12345;
  std::string start_date = "2025-01-06";  // UTC midnight
  std::array<HourProfile, 24> profile = urban_profile();

  // Single-node activity bursts; amplitude in units of the hour's std.
  int bursts_per_day = 3;
  int burst_min_minutes = 10;
  int burst_max_minutes = 30;
  double burst_sigma = 3.0;

  // Simultaneous multi-node elevations; snapped to 5-minute boundaries.
  int rain_count = 0;  // total segments over the whole run
  int rain_min_minutes = 45;
  int rain_max_minutes = 90;
  double rain_sigma = 8.0;
  double rain_node_fraction = 1.0;

  void validate() const;  // throws std::invalid_argument
};

struct TruthRecord {
  std::string node_id;
  timeutil::TimeMs window_start = 0;
  std::string background;  // NP/AP/RP class of the hour, ranked from the profile
  bool activity = false;
  bool rain = false;
};

struct GroundTruth {
  std::vector<TruthRecord> records;  // aligned 1:1 with generated windows
};

struct Dataset {
  std::vector<histo::SensorWindow> windows;  // ordered by (node, ts)
  GroundTruth truth;
};

// Deterministic: output bytes depend only on the config. Every sample value
// is a pure function of (seed, node, sample index), so windows, the raw
// stream, and ground truth are mutually consistent by construction.
Dataset generate(const SynthConfig& config);

// The 3000 raw 10 Hz values of one node's window; windowize over these
// reproduces the corresponding generated SensorWindow.
std::vector<int> window_samples(const SynthConfig& config, int node,
                                timeutil::TimeMs window_start);

// Streams the full raw CSV (ts,node_id,value) for every node and day.
void write_raw_csv(const SynthConfig& config, std::ostream& out);

// Node ids are "n1".."nN".
std::string node_name(int node);

}  // namespace acoustic::synth
