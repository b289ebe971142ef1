#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "acoustic/histogram.hpp"
#include "acoustic/pca.hpp"
#include "acoustic/time_utils.hpp"

namespace acoustic::detect {

enum class Period { kNight, kActive, kRush };  // NP / AP / RP

const char* to_string(Period p);

struct PeriodLabel {
  timeutil::TimeMs window_start = 0;
  Period period = Period::kNight;
};

struct ActivityScore {
  timeutil::TimeMs window_start = 0;
  double chi2 = 0.0;
  bool active = false;
  bool suppressed_by_rain = false;
};

struct RainInterval {
  timeutil::TimeMs start = 0;
  timeutil::TimeMs end = 0;  // exclusive
  int supporting_node_count = 0;
};

// Representative level per bin; bin 5 is open-ended so its midpoint is a
// convention. Only the ordering of cluster means matters downstream.
inline constexpr std::array<double, histo::kBinCount> kBinMidpoints{3.0, 8.0, 15.0, 35.0, 100.0};

// Count-weighted bin-midpoint mean of one window.
double intensity_proxy(const histo::Histogram& h);

// Ranks the three clusters by mean intensity proxy: quietest -> NP,
// middle -> AP, loudest -> RP. Throws std::runtime_error unless the
// assignment has exactly 3 distinguishable clusters.
std::vector<PeriodLabel> label_periods(std::span<const int> assignment,
                                       std::span<const histo::SensorWindow> windows);

// Sum of the first k squared standardized scores per row. Throws when the
// scores are not flagged standardized or k exceeds their width.
std::vector<double> chi_square_scores(const pca::ScoreMatrix& std_scores, int k);

// h_activity = 1 iff chi2 >= beta (boundary inclusive). beta must be >= 0.
std::vector<ActivityScore> detect_activity(std::span<const timeutil::TimeMs> window_starts,
                                           std::span<const double> chi2, double beta);

// (theoretical, empirical) quantile pairs: sorted values against the
// chi-square quantiles at (i - 0.5) / m. Needs at least 2 values.
std::vector<std::pair<double, double>> qq_points(std::span<const double> chi2_values, int dof);

struct RainParams {
  double quorum = 0.8;                                        // fraction of reporting nodes
  timeutil::TimeMs min_duration_ms = 15 * timeutil::kMsPerMinute;
};

// One node's day (or span of days) of window starts: everything the node
// reported, plus the subset assigned to its highest-intensity cluster.
struct NodeMarks {
  std::string node_id;
  std::vector<timeutil::TimeMs> present;
  std::vector<timeutil::TimeMs> marked;
};

// A slot is a rain candidate when at least 2 nodes report it and the marked
// fraction meets the quorum; maximal candidate runs at least min_duration
// long become intervals. Needs >= 2 nodes overall.
std::vector<RainInterval> estimate_rain(std::span<const NodeMarks> nodes,
                                        const RainParams& params);

// Windows with start in [interval.start, interval.end) are forced inactive;
// chi2 is preserved for audit.
void apply_rain_override(std::vector<ActivityScore>& activity,
                         std::span<const RainInterval> rain);

}  // namespace acoustic::detect
