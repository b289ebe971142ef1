#include "acoustic/records.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace acoustic::io {

using json = nlohmann::json;

namespace {

void report(std::vector<ParseIssue>& issues, bool strict, std::size_t line,
            std::string message) {
  if (strict)
    throw std::runtime_error("line " + std::to_string(line) + ": " + message);
  issues.push_back({line, std::move(message)});
}

histo::SensorWindow window_from_json(const json& j) {
  if (!j.is_object()) throw std::runtime_error("record is not a JSON object");
  histo::SensorWindow w;
  w.node_id = j.at("node_id").get<std::string>();
  const auto ts = j.at("ts").get<std::string>();
  const auto parsed = timeutil::parse_iso8601(ts);
  if (!parsed) throw std::runtime_error("bad timestamp '" + ts + "'");
  w.window_start = *parsed;
  const auto& bins = j.at("bins");
  if (!bins.is_array() || bins.size() != histo::kBinCount)
    throw std::runtime_error("schema error: expected " + std::to_string(histo::kBinCount) +
                             " bins, got " + std::to_string(bins.size()));
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const auto v = bins[i].get<std::int64_t>();
    if (v < 0) throw std::runtime_error("negative bin count");
    w.histogram.bins[i] = v;
  }
  w.complete = j.at("complete").get<bool>();
  return w;
}

}  // namespace

ReadResult read_windows(std::istream& in, bool strict) {
  ReadResult result;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      result.windows.push_back(window_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      report(result.issues, strict, lineno, e.what());
    }
  }
  return result;
}

ReadResult read_windows_file(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_windows(in, strict);
}

void write_windows(std::ostream& out, std::span<const histo::SensorWindow> windows) {
  for (const auto& w : windows) {
    json j;
    j["bins"] = w.histogram.bins;
    j["complete"] = w.complete;
    j["node_id"] = w.node_id;
    j["ts"] = timeutil::format_iso8601(w.window_start);
    out << j.dump() << '\n';
  }
}

void write_results(std::ostream& out, std::span<const ResultRecord> records) {
  for (const auto& r : records) {
    json j;
    j["active"] = r.active;
    j["chi2"] = r.chi2;
    j["node_id"] = r.node_id;
    j["period"] = r.period;
    j["suppressed_by_rain"] = r.suppressed_by_rain;
    j["ts"] = r.ts;
    out << j.dump() << '\n';
  }
}

ResultReadResult read_results(std::istream& in, bool strict) {
  ResultReadResult result;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      ResultRecord r;
      r.ts = j.at("ts").get<std::string>();
      if (!timeutil::parse_iso8601(r.ts))
        throw std::runtime_error("bad timestamp '" + r.ts + "'");
      r.node_id = j.at("node_id").get<std::string>();
      r.period = j.at("period").get<std::string>();
      r.chi2 = j.at("chi2").get<double>();
      r.active = j.at("active").get<int>();
      r.suppressed_by_rain = j.at("suppressed_by_rain").get<int>();
      result.records.push_back(std::move(r));
    } catch (const std::exception& e) {
      report(result.issues, strict, lineno, e.what());
    }
  }
  return result;
}

ResultReadResult read_results_file(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_results(in, strict);
}

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_rain_csv(std::ostream& out, std::span<const detect::RainInterval> intervals) {
  out << "start,end,nodes\n";
  for (const auto& r : intervals)
    out << timeutil::format_iso8601(r.start) << ',' << timeutil::format_iso8601(r.end) << ','
        << r.supporting_node_count << '\n';
}

void write_qq_csv(std::ostream& out, std::span<const QqRow> rows) {
  out << "node_id,date,period,theoretical,empirical\n";
  for (const auto& r : rows)
    out << r.node_id << ',' << r.date << ',' << r.period << ',' << format_double(r.theoretical)
        << ',' << format_double(r.empirical) << '\n';
}

RawReadResult read_raw_csv(std::istream& in, bool strict) {
  RawReadResult result;
  auto bucket = [&](const std::string& node) -> std::vector<histo::IntensitySample>& {
    for (auto& [id, samples] : result.per_node)
      if (id == node) return samples;
    result.per_node.emplace_back(node, std::vector<histo::IntensitySample>{});
    return result.per_node.back().second;
  };

  std::string line;
  std::size_t lineno = 0;
  bool header_checked = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header_checked) {
      header_checked = true;
      if (line == "ts,node_id,value") continue;  // header is optional
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos) {
      report(result.issues, strict, lineno, "expected 3 comma-separated fields");
      continue;
    }
    const std::string_view ts(line.data(), c1);
    const std::string node(line, c1 + 1, c2 - c1 - 1);
    const std::string_view value_text(line.data() + c2 + 1, line.size() - c2 - 1);

    const auto t = timeutil::parse_iso8601(ts);
    if (!t) {
      report(result.issues, strict, lineno, "bad timestamp '" + std::string(ts) + "'");
      continue;
    }
    int value = 0;
    const auto conv = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    if (conv.ec != std::errc() || conv.ptr != value_text.data() + value_text.size()) {
      report(result.issues, strict, lineno, "bad value '" + std::string(value_text) + "'");
      continue;
    }
    if (value < 0 || value > histo::kMaxLevel) {
      report(result.issues, strict, lineno,
             "value " + std::to_string(value) + " outside [0, 1023]");
      continue;
    }
    bucket(node).push_back({value, *t});
  }
  return result;
}

RawReadResult read_raw_csv_file(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_raw_csv(in, strict);
}

void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& producer) {
  const auto dir = path.parent_path().empty() ? "." : path.parent_path();
  std::filesystem::create_directories(dir);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    producer(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace acoustic::io
