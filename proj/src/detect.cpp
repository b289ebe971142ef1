#include "acoustic/detect.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "acoustic/chi2.hpp"

namespace acoustic::detect {

const char* to_string(Period p) {
  switch (p) {
    case Period::kNight: return "NP";
    case Period::kActive: return "AP";
    case Period::kRush: return "RP";
  }
  return "?";
}

double intensity_proxy(const histo::Histogram& h) {
  const double total = static_cast<double>(h.total());
  if (total <= 0.0) return 0.0;
  double sum = 0.0;
  for (int i = 0; i < histo::kBinCount; ++i) sum += h.bins[i] * kBinMidpoints[i];
  return sum / total;
}

std::vector<PeriodLabel> label_periods(std::span<const int> assignment,
                                       std::span<const histo::SensorWindow> windows) {
  if (assignment.size() != windows.size())
    throw std::invalid_argument("assignment and window counts differ");

  std::set<int> ids(assignment.begin(), assignment.end());
  if (ids.size() != 3)
    throw std::runtime_error("period labeling needs exactly 3 clusters, got " +
                             std::to_string(ids.size()));

  std::map<int, double> sum;
  std::map<int, int> count;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    sum[assignment[i]] += intensity_proxy(windows[i].histogram);
    ++count[assignment[i]];
  }

  std::vector<std::pair<double, int>> ranked;  // (mean proxy, cluster id)
  for (int id : ids) ranked.emplace_back(sum[id] / count[id], id);
  std::sort(ranked.begin(), ranked.end());
  if (ranked[0].first == ranked[1].first || ranked[1].first == ranked[2].first)
    throw std::runtime_error("degenerate clustering: cluster intensities are indistinguishable");

  std::map<int, Period> period_of;
  period_of[ranked[0].second] = Period::kNight;
  period_of[ranked[1].second] = Period::kActive;
  period_of[ranked[2].second] = Period::kRush;

  std::vector<PeriodLabel> out;
  out.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i)
    out.push_back({windows[i].window_start, period_of[assignment[i]]});
  return out;
}

std::vector<double> chi_square_scores(const pca::ScoreMatrix& std_scores, int k) {
  if (!std_scores.standardized)
    throw std::runtime_error("chi-square scores require standardized PC scores");
  if (k < 1 || k > std_scores.scores.cols())
    throw std::invalid_argument("component count " + std::to_string(k) +
                                " outside the score matrix width");
  std::vector<double> out(std_scores.scores.rows());
  for (Eigen::Index i = 0; i < std_scores.scores.rows(); ++i)
    out[i] = std_scores.scores.row(i).head(k).squaredNorm();
  return out;
}

std::vector<ActivityScore> detect_activity(std::span<const timeutil::TimeMs> window_starts,
                                           std::span<const double> chi2, double beta) {
  if (window_starts.size() != chi2.size())
    throw std::invalid_argument("window and score counts differ");
  if (beta < 0.0) throw std::invalid_argument("beta must be non-negative");
  std::vector<ActivityScore> out(window_starts.size());
  for (std::size_t i = 0; i < chi2.size(); ++i)
    out[i] = {window_starts[i], chi2[i], chi2[i] >= beta, false};
  return out;
}

std::vector<std::pair<double, double>> qq_points(std::span<const double> chi2_values, int dof) {
  const std::size_t m = chi2_values.size();
  if (m < 2) throw std::invalid_argument("q-q plot needs at least 2 values");
  std::vector<double> sorted(chi2_values.begin(), chi2_values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    out.emplace_back(stats::chi_square_quantile(p, dof), sorted[i]);
  }
  return out;
}

std::vector<RainInterval> estimate_rain(std::span<const NodeMarks> nodes,
                                        const RainParams& params) {
  if (nodes.size() < 2)
    throw std::runtime_error("rain estimation needs at least 2 co-located sensors, got " +
                             std::to_string(nodes.size()));
  if (!(params.quorum > 0.0 && params.quorum <= 1.0))
    throw std::invalid_argument("rain quorum must lie in (0, 1]");

  struct SlotCount {
    int reporting = 0;
    int marked = 0;
  };
  std::map<timeutil::TimeMs, SlotCount> slots;
  for (const auto& node : nodes) {
    for (auto t : node.present) ++slots[t].reporting;
    for (auto t : node.marked) ++slots[t].marked;
  }

  std::vector<RainInterval> out;
  std::vector<std::pair<timeutil::TimeMs, int>> run;  // (slot, marked count)
  auto flush = [&] {
    if (!run.empty()) {
      const timeutil::TimeMs start = run.front().first;
      const timeutil::TimeMs end = run.back().first + timeutil::kMsPerWindow;
      if (end - start >= params.min_duration_ms) {
        int support = run.front().second;
        for (const auto& [t, c] : run) support = std::min(support, c);
        out.push_back({start, end, support});
      }
      run.clear();
    }
  };

  for (const auto& [t, c] : slots) {
    const bool candidate =
        c.reporting >= 2 &&
        static_cast<double>(c.marked) / c.reporting >= params.quorum - 1e-12;
    if (!candidate) {
      flush();
      continue;
    }
    if (!run.empty() && run.back().first + timeutil::kMsPerWindow != t) flush();
    run.emplace_back(t, c.marked);
  }
  flush();
  return out;
}

void apply_rain_override(std::vector<ActivityScore>& activity,
                         std::span<const RainInterval> rain) {
  for (auto& score : activity)
    for (const auto& interval : rain)
      if (score.window_start >= interval.start && score.window_start < interval.end) {
        score.active = false;
        score.suppressed_by_rain = true;
        break;
      }
}

}  // namespace acoustic::detect
