#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "acoustic/detect.hpp"
#include "acoustic/histogram.hpp"

namespace acoustic::io {

// Line-delimited JSON record of one SensorWindow:
//   {"bins":[1,3,2,2,2],"complete":false,"node_id":"7","ts":"2016-07-16T14:05:00Z"}
struct ParseIssue {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct ReadResult {
  std::vector<histo::SensorWindow> windows;
  std::vector<ParseIssue> issues;
};

// Parses one window per line; malformed lines are collected as issues.
// With strict=true the first issue throws std::runtime_error instead.
ReadResult read_windows(std::istream& in, bool strict = false);
ReadResult read_windows_file(const std::filesystem::path& path, bool strict = false);

void write_windows(std::ostream& out, std::span<const histo::SensorWindow> windows);

// Per-window analysis output:
//   {"active":0,"chi2":1.25,"node_id":"7","period":"AP","suppressed_by_rain":0,
//    "ts":"2016-07-16T14:05:00Z"}
struct ResultRecord {
  std::string ts;
  std::string node_id;
  std::string period;
  double chi2 = 0.0;
  int active = 0;
  int suppressed_by_rain = 0;
};

void write_results(std::ostream& out, std::span<const ResultRecord> records);

struct ResultReadResult {
  std::vector<ResultRecord> records;
  std::vector<ParseIssue> issues;
};
ResultReadResult read_results(std::istream& in, bool strict = false);
ResultReadResult read_results_file(const std::filesystem::path& path, bool strict = false);

// CSV: start,end,nodes
void write_rain_csv(std::ostream& out, std::span<const detect::RainInterval> intervals);

// CSV: node_id,date,period,theoretical,empirical
struct QqRow {
  std::string node_id;
  std::string date;
  std::string period;
  double theoretical = 0.0;
  double empirical = 0.0;
};
void write_qq_csv(std::ostream& out, std::span<const QqRow> rows);

// Shortest round-trip decimal rendering, used for every float we persist.
std::string format_double(double value);

// Raw sample CSV: ts,node_id,value (10 Hz stream).
struct RawSample {
  histo::IntensitySample sample;
  std::string node_id;
};
struct RawReadResult {
  // Samples grouped by node, input order preserved within a node.
  std::vector<std::pair<std::string, std::vector<histo::IntensitySample>>> per_node;
  std::vector<ParseIssue> issues;
};
RawReadResult read_raw_csv(std::istream& in, bool strict = false);
RawReadResult read_raw_csv_file(const std::filesystem::path& path, bool strict = false);

// Writes via a temp file in the same directory, then renames into place.
void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& producer);

}  // namespace acoustic::io
