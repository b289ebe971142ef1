#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acoustic/detect.hpp"
#include "acoustic/evaluate.hpp"
#include "acoustic/hcluster.hpp"
#include "acoustic/histogram.hpp"
#include "acoustic/records.hpp"
#include "acoustic/synth.hpp"

namespace acoustic::pipeline {

struct BetaPolicy {
  enum class Mode { kQuantile, kFixed };
  Mode mode = Mode::kQuantile;
  double quantile_p = 0.975;  // quantile mode: beta = chi2 quantile at the group's dof
  double fixed_value = 0.43;  // fixed mode: beta used verbatim
};

struct RunConfig {
  int k_clusters = 3;
  int pca_k = 4;
  BetaPolicy beta;
  double rain_quorum = 0.8;
  int rain_min_duration_minutes = 15;
  std::vector<cluster::Linkage> linkage_candidates{cluster::kAllLinkages,
                                                   cluster::kAllLinkages + 4};
  eval::Variant variant = eval::Variant::kRawPcaWt;
  int workers = 0;  // 0 = hardware concurrency

  void validate() const;  // throws std::invalid_argument
};

struct WindowAnalysis {
  timeutil::TimeMs window_start = 0;
  detect::Period period = detect::Period::kNight;
  double chi2 = 0.0;
  bool active = false;
  bool suppressed_by_rain = false;
  int cluster = 0;          // 1..k
  bool rain_marked = false; // member of the day's highest-intensity cluster
};

struct QqEntry {
  detect::Period period = detect::Period::kNight;
  double theoretical = 0.0;
  double empirical = 0.0;
};

struct NodeDayAnalysis {
  std::string node_id;
  std::string date;
  cluster::Linkage chosen_linkage = cluster::Linkage::kSingle;
  double ccc = 0.0;
  std::vector<WindowAnalysis> windows;  // ordered by window_start
  std::vector<QqEntry> qq;              // NP block, then AP, then RP
};

struct NodeDayError {
  std::string node_id;
  std::string date;
  std::string message;
};

struct DetectOutput {
  std::vector<NodeDayAnalysis> node_days;  // sorted by (node_id, date)
  std::vector<detect::RainInterval> rain;  // sorted, disjoint
  std::vector<std::string> skipped;        // node-days with too little data
  std::vector<NodeDayError> errors;
};

// Full single-day, single-node analysis: variant preprocessing, linkage
// selection, NP/AP/RP labeling, per-period chi-square scoring. Rain is a
// cross-node join and is applied by run_detect. `windows` must belong to
// one node and one UTC day, sorted by start, with at least max(k_clusters,
// 2) entries and no duplicate slots.
NodeDayAnalysis analyze_node_day(std::span<const histo::SensorWindow> windows,
                                 const RunConfig& config);

DetectOutput run_detect(std::span<const histo::SensorWindow> all_windows,
                        const RunConfig& config);

struct DetectFiles {
  std::filesystem::path results;  // JSONL
  std::filesystem::path rain;     // CSV
  std::filesystem::path qq;       // CSV
  std::filesystem::path meta;     // JSON
};
DetectFiles detect_output_paths(const std::filesystem::path& out_dir);

// Reads a window file, runs detection, and writes the four outputs
// atomically. Input parse issues are reported in the meta file and the
// returned output's errors.
DetectOutput run_detect_files(const std::filesystem::path& windows_path,
                              const std::filesystem::path& out_dir, const RunConfig& config,
                              bool strict_read = false);

// PoI-level comparison: per-slot OR across nodes on both sides, evaluated
// over the truth's slots (missing predictions count as inactive).
eval::ConfusionStats poi_confusion(const DetectOutput& output, const synth::GroundTruth& truth);
eval::ConfusionStats evaluate_results(std::span<const io::ResultRecord> records,
                                      const synth::GroundTruth& truth);

struct AblationRow {
  eval::Variant variant = eval::Variant::kRaw;
  std::optional<eval::ConfusionStats> stats;
  std::string error;  // non-empty when the variant failed
};

// Runs each requested variant end to end under the same config/beta policy,
// in the canonical raw, raw+WT, raw+PCA, raw+PCA+WT order. A failing
// variant yields a row with its error; the others still run.
std::vector<AblationRow> run_ablation(std::span<const histo::SensorWindow> windows,
                                      const synth::GroundTruth& truth,
                                      std::span<const eval::Variant> variants,
                                      const RunConfig& base_config);

// CSV: variant,true_detected_pct,false_positive_pct,false_negative_pct
void write_confusion_csv(std::ostream& out, std::span<const AblationRow> rows);

// Side-by-side view of the windows' rain estimate against an external
// reference sensor stream (ts,node_id,value 0..1023; lower means wetter).
// Reference readings are averaged per (node, window); estimated_rain is the
// window's suppressed-by-rain flag. CSV:
//   ts,node_id,reference_value,estimated_rain
void write_rain_comparison(std::ostream& out, std::span<const io::ResultRecord> records,
                           const io::RawReadResult& reference);

// Truth records as JSONL (one {"activity":...,"background":...,"node_id":...,
// "rain":...,"ts":...} per line).
void write_truth(std::ostream& out, const synth::GroundTruth& truth);
synth::GroundTruth read_truth_file(const std::filesystem::path& path);

}  // namespace acoustic::pipeline
