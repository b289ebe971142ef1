#include "acoustic/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "acoustic/chi2.hpp"
#include "acoustic/wavelet.hpp"

namespace acoustic::pipeline {

using json = nlohmann::json;
using timeutil::TimeMs;

namespace {

bool uses_wavelet(eval::Variant v) {
  return v == eval::Variant::kRawWt || v == eval::Variant::kRawPcaWt;
}

bool uses_pca(eval::Variant v) {
  return v == eval::Variant::kRawPca || v == eval::Variant::kRawPcaWt;
}

const wavelet::BasisMatrix& shared_basis() {
  static const wavelet::BasisMatrix basis =
      wavelet::build_basis(wavelet::build_partition(histo::kBinCount));
  return basis;
}

}  // namespace

void RunConfig::validate() const {
  if (k_clusters < 2) throw std::invalid_argument("k_clusters must be >= 2");
  if (pca_k < 1 || pca_k >= histo::kBinCount)
    throw std::invalid_argument("pca_k must lie in [1, " + std::to_string(histo::kBinCount - 1) +
                                "]");
  if (!(beta.quantile_p > 0.0 && beta.quantile_p < 1.0))
    throw std::invalid_argument("quantile p must lie in (0, 1)");
  if (beta.fixed_value < 0.0) throw std::invalid_argument("fixed beta must be >= 0");
  if (!(rain_quorum > 0.0 && rain_quorum <= 1.0))
    throw std::invalid_argument("rain quorum must lie in (0, 1]");
  if (rain_min_duration_minutes < 5)
    throw std::invalid_argument("rain min duration must be at least one 5-minute window");
  if (linkage_candidates.empty()) throw std::invalid_argument("no linkage candidates");
  if (workers < 0) throw std::invalid_argument("workers must be >= 0");
}

NodeDayAnalysis analyze_node_day(std::span<const histo::SensorWindow> windows,
                                 const RunConfig& config) {
  config.validate();
  const int m = static_cast<int>(windows.size());
  if (m < std::max(config.k_clusters, 2))
    throw std::invalid_argument("node-day has " + std::to_string(m) +
                                " windows, need at least " +
                                std::to_string(std::max(config.k_clusters, 2)));
  for (int i = 1; i < m; ++i) {
    if (windows[i].node_id != windows[0].node_id)
      throw std::invalid_argument("windows from multiple nodes in one analysis");
    if (windows[i].window_start <= windows[i - 1].window_start)
      throw std::invalid_argument("windows not strictly ordered (duplicate slot?)");
  }

  NodeDayAnalysis out;
  out.node_id = windows[0].node_id;
  out.date = timeutil::utc_date(windows[0].window_start);

  // Rate-adjust incomplete windows so every row is on the 3000-sample scale,
  // then move to the variant's coefficient space.
  pca::DayMatrix day;
  day.node_id = out.node_id;
  day.date = out.date;
  day.rows.resize(m, histo::kBinCount);
  day.slots.reserve(windows.size());
  for (int i = 0; i < m; ++i) {
    const auto& h = windows[i].histogram;
    const double scale = static_cast<double>(histo::kSamplesPerWindow) /
                         static_cast<double>(std::max<std::int64_t>(h.total(), 1));
    Eigen::VectorXd row(histo::kBinCount);
    for (int b = 0; b < histo::kBinCount; ++b) row(b) = h.bins[b] * scale;
    day.rows.row(i) = uses_wavelet(config.variant)
                          ? wavelet::forward(row, shared_basis()).transpose()
                          : row.transpose();
    day.slots.push_back(timeutil::slot_in_day(windows[i].window_start));
  }

  // Clustering features: truncated PC scores when the variant calls for PCA.
  Eigen::MatrixXd features;
  if (uses_pca(config.variant)) {
    const pca::PcaModel day_model = pca::fit(day);
    const int k_day = pca::select_k(day_model, config.pca_k);
    features = pca::project(day_model, day.rows).scores.leftCols(k_day);
  } else {
    features = day.rows;
  }

  const cluster::DistanceMatrix dist = cluster::euclidean_distances(features);
  cluster::LinkageChoice choice = cluster::select_linkage(dist, config.linkage_candidates);
  const std::vector<int> assignment = cluster::cut(choice.dendrogram, config.k_clusters);
  const std::vector<detect::PeriodLabel> labels = detect::label_periods(assignment, windows);

  out.chosen_linkage = choice.method;
  out.ccc = choice.ccc;
  out.windows.resize(windows.size());
  for (int i = 0; i < m; ++i) {
    auto& w = out.windows[i];
    w.window_start = windows[i].window_start;
    w.period = labels[i].period;
    w.cluster = assignment[i];
    w.rain_marked = labels[i].period == detect::Period::kRush;  // loudest cluster
  }

  // Chi-square stage, grouped per background period. PCA variants
  // standardize the period's PC scores, so the summed squares are
  // independent and the chi-square threshold is calibrated. Non-PCA
  // variants standardize each dimension directly; their components stay
  // correlated, which is exactly what the ablation measures.
  for (const detect::Period period :
       {detect::Period::kNight, detect::Period::kActive, detect::Period::kRush}) {
    std::vector<int> idx;
    for (int i = 0; i < m; ++i)
      if (out.windows[i].period == period) idx.push_back(i);
    if (idx.empty()) continue;

    std::vector<double> chi2(idx.size(), 0.0);
    int k_eff = 0;
    if (idx.size() >= 2) {
      Eigen::MatrixXd group(idx.size(), histo::kBinCount);
      for (std::size_t r = 0; r < idx.size(); ++r) group.row(r) = day.rows.row(idx[r]);
      if (uses_pca(config.variant)) {
        const pca::PcaModel group_model = pca::fit(group);
        while (k_eff < config.pca_k &&
               group_model.eigenvalues(k_eff) > pca::kDegenerateEigenvalue)
          ++k_eff;
        if (k_eff > 0) {
          const pca::ScoreMatrix std_scores =
              pca::standardize(group_model, pca::project(group_model, group), k_eff);
          chi2 = detect::chi_square_scores(std_scores, k_eff);
        }
      } else {
        const Eigen::RowVectorXd mean = group.colwise().mean();
        const Eigen::MatrixXd centered = group.rowwise() - mean;
        const double divisor = static_cast<double>(group.rows() - 1);
        std::vector<int> live;
        for (int c = 0; c < group.cols(); ++c)
          if (centered.col(c).squaredNorm() / divisor > pca::kDegenerateEigenvalue)
            live.push_back(c);
        k_eff = static_cast<int>(live.size());
        if (k_eff > 0) {
          pca::ScoreMatrix z;
          z.scores.resize(group.rows(), k_eff);
          for (int c = 0; c < k_eff; ++c)
            z.scores.col(c) = centered.col(live[c]) /
                              std::sqrt(centered.col(live[c]).squaredNorm() / divisor);
          z.standardized = true;
          chi2 = detect::chi_square_scores(z, k_eff);
        }
      }
    }

    const double beta = config.beta.mode == BetaPolicy::Mode::kFixed
                            ? config.beta.fixed_value
                            : stats::chi_square_quantile(config.beta.quantile_p,
                                                         std::max(k_eff, 1));
    std::vector<TimeMs> starts(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) starts[r] = windows[idx[r]].window_start;
    const auto activity = detect::detect_activity(starts, chi2, beta);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      out.windows[idx[r]].chi2 = activity[r].chi2;
      out.windows[idx[r]].active = activity[r].active;
    }

    if (chi2.size() >= 2 && k_eff >= 1)
      for (const auto& [theo, emp] : detect::qq_points(chi2, k_eff))
        out.qq.push_back({period, theo, emp});
  }
  return out;
}

DetectOutput run_detect(std::span<const histo::SensorWindow> all_windows,
                        const RunConfig& config) {
  config.validate();

  // Group by (node, UTC day), each group sorted by window start.
  std::map<std::pair<std::string, std::string>, std::vector<histo::SensorWindow>> groups;
  for (const auto& w : all_windows)
    groups[{w.node_id, timeutil::utc_date(w.window_start)}].push_back(w);
  for (auto& [key, vec] : groups)
    std::sort(vec.begin(), vec.end(),
              [](const auto& a, const auto& b) { return a.window_start < b.window_start; });

  using Group = std::map<std::pair<std::string, std::string>,
                         std::vector<histo::SensorWindow>>::value_type;
  std::vector<const Group*> tasks;
  tasks.reserve(groups.size());
  for (const auto& entry : groups) tasks.push_back(&entry);

  DetectOutput out;
  const int min_windows = std::max(config.k_clusters, 2);
  std::vector<std::optional<NodeDayAnalysis>> analyses(tasks.size());
  std::vector<std::optional<NodeDayError>> errors(tasks.size());
  std::vector<std::optional<std::string>> skips(tasks.size());

  auto run_task = [&](std::size_t t) {
    const auto& [key, windows] = *tasks[t];
    if (static_cast<int>(windows.size()) < min_windows) {
      skips[t] = key.first + " " + key.second + ": only " + std::to_string(windows.size()) +
                 " windows, need " + std::to_string(min_windows);
      return;
    }
    try {
      analyses[t] = analyze_node_day(windows, config);
    } catch (const std::exception& e) {
      errors[t] = NodeDayError{key.first, key.second, e.what()};
    }
  };

  unsigned n_workers = config.workers > 0 ? static_cast<unsigned>(config.workers)
                                          : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min<unsigned>(n_workers, std::max<std::size_t>(tasks.size(), 1));
  if (n_workers <= 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned i = 0; i < n_workers; ++i)
      pool.emplace_back([&] {
        for (std::size_t t = next.fetch_add(1); t < tasks.size(); t = next.fetch_add(1))
          run_task(t);
      });
    for (auto& th : pool) th.join();
  }

  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (analyses[t]) out.node_days.push_back(std::move(*analyses[t]));
    if (errors[t]) out.errors.push_back(std::move(*errors[t]));
    if (skips[t]) out.skipped.push_back(std::move(*skips[t]));
  }

  // Rain is a per-date join across nodes; dates with fewer than two
  // analyzed nodes contribute no intervals.
  std::map<std::string, std::vector<NodeDayAnalysis*>> by_date;
  for (auto& nd : out.node_days) by_date[nd.date].push_back(&nd);
  detect::RainParams rain_params{config.rain_quorum,
                                 config.rain_min_duration_minutes * timeutil::kMsPerMinute};
  for (auto& [date, nodes] : by_date) {
    if (nodes.size() < 2) continue;
    std::vector<detect::NodeMarks> marks;
    marks.reserve(nodes.size());
    for (const auto* nd : nodes) {
      detect::NodeMarks nm;
      nm.node_id = nd->node_id;
      for (const auto& w : nd->windows) {
        nm.present.push_back(w.window_start);
        if (w.rain_marked) nm.marked.push_back(w.window_start);
      }
      marks.push_back(std::move(nm));
    }
    const auto intervals = detect::estimate_rain(marks, rain_params);
    for (auto* nd : nodes) {
      std::vector<detect::ActivityScore> scores(nd->windows.size());
      for (std::size_t i = 0; i < nd->windows.size(); ++i)
        scores[i] = {nd->windows[i].window_start, nd->windows[i].chi2, nd->windows[i].active,
                     false};
      detect::apply_rain_override(scores, intervals);
      for (std::size_t i = 0; i < nd->windows.size(); ++i) {
        nd->windows[i].active = scores[i].active;
        nd->windows[i].suppressed_by_rain = scores[i].suppressed_by_rain;
      }
    }
    out.rain.insert(out.rain.end(), intervals.begin(), intervals.end());
  }
  std::sort(out.rain.begin(), out.rain.end(),
            [](const auto& a, const auto& b) { return a.start < b.start; });
  return out;
}

DetectFiles detect_output_paths(const std::filesystem::path& out_dir) {
  return {out_dir / "results.jsonl", out_dir / "rain.csv", out_dir / "qq.csv",
          out_dir / "run_meta.json"};
}

namespace {

json config_to_json(const RunConfig& config) {
  json j;
  j["k_clusters"] = config.k_clusters;
  j["pca_k"] = config.pca_k;
  j["beta_mode"] = config.beta.mode == BetaPolicy::Mode::kFixed ? "fixed" : "quantile";
  j["quantile_p"] = config.beta.quantile_p;
  j["beta_t"] = config.beta.fixed_value;
  j["rain_quorum"] = config.rain_quorum;
  j["rain_min_duration"] = config.rain_min_duration_minutes;
  std::vector<std::string> names;
  for (auto l : config.linkage_candidates) names.push_back(cluster::to_string(l));
  j["linkage"] = names;
  j["variant"] = eval::to_string(config.variant);
  j["workers"] = config.workers;
  return j;
}

}  // namespace

DetectOutput run_detect_files(const std::filesystem::path& windows_path,
                              const std::filesystem::path& out_dir, const RunConfig& config,
                              bool strict_read) {
  const io::ReadResult input = io::read_windows_file(windows_path, strict_read);
  DetectOutput output = run_detect(input.windows, config);
  const DetectFiles files = detect_output_paths(out_dir);

  io::atomic_write(files.results, [&](std::ostream& os) {
    std::vector<io::ResultRecord> records;
    for (const auto& nd : output.node_days)
      for (const auto& w : nd.windows)
        records.push_back({timeutil::format_iso8601(w.window_start), nd.node_id,
                           detect::to_string(w.period), w.chi2, w.active ? 1 : 0,
                           w.suppressed_by_rain ? 1 : 0});
    io::write_results(os, records);
  });

  io::atomic_write(files.rain, [&](std::ostream& os) { io::write_rain_csv(os, output.rain); });

  io::atomic_write(files.qq, [&](std::ostream& os) {
    std::vector<io::QqRow> rows;
    for (const auto& nd : output.node_days)
      for (const auto& q : nd.qq)
        rows.push_back({nd.node_id, nd.date, detect::to_string(q.period), q.theoretical,
                        q.empirical});
    io::write_qq_csv(os, rows);
  });

  io::atomic_write(files.meta, [&](std::ostream& os) {
    json meta;
    meta["config"] = config_to_json(config);
    meta["input"] = windows_path.string();
    meta["windows_read"] = input.windows.size();
    meta["node_days_analyzed"] = output.node_days.size();
    meta["rain_intervals"] = output.rain.size();
    meta["skipped"] = output.skipped;
    json errs = json::array();
    for (const auto& e : output.errors)
      errs.push_back({{"node_id", e.node_id}, {"date", e.date}, {"message", e.message}});
    for (const auto& issue : input.issues)
      errs.push_back({{"line", issue.line}, {"message", issue.message}});
    meta["errors"] = errs;
    os << meta.dump(2) << '\n';
  });

  // Surface input parse issues alongside analysis errors.
  for (const auto& issue : input.issues)
    output.errors.push_back({"", "", "input line " + std::to_string(issue.line) + ": " +
                                         issue.message});
  return output;
}

namespace {

// OR across nodes per slot, evaluated over the truth's slots.
eval::ConfusionStats aligned_confusion(const std::map<TimeMs, int>& predicted,
                                       const synth::GroundTruth& truth) {
  std::map<TimeMs, int> truth_or;
  for (const auto& rec : truth.records) truth_or[rec.window_start] |= rec.activity ? 1 : 0;
  if (truth_or.empty()) throw std::invalid_argument("ground truth is empty");

  std::vector<int> pred_flags, truth_flags;
  pred_flags.reserve(truth_or.size());
  truth_flags.reserve(truth_or.size());
  for (const auto& [ts, flag] : truth_or) {
    truth_flags.push_back(flag);
    const auto it = predicted.find(ts);
    pred_flags.push_back(it == predicted.end() ? 0 : it->second);
  }
  return eval::confusion(pred_flags, truth_flags);
}

}  // namespace

eval::ConfusionStats poi_confusion(const DetectOutput& output, const synth::GroundTruth& truth) {
  std::map<TimeMs, int> predicted;
  for (const auto& nd : output.node_days)
    for (const auto& w : nd.windows) predicted[w.window_start] |= w.active ? 1 : 0;
  return aligned_confusion(predicted, truth);
}

eval::ConfusionStats evaluate_results(std::span<const io::ResultRecord> records,
                                      const synth::GroundTruth& truth) {
  std::map<TimeMs, int> predicted;
  for (const auto& r : records) {
    const auto ts = timeutil::parse_iso8601(r.ts);
    if (!ts) throw std::invalid_argument("bad result timestamp '" + r.ts + "'");
    predicted[*ts] |= r.active ? 1 : 0;
  }
  return aligned_confusion(predicted, truth);
}

std::vector<AblationRow> run_ablation(std::span<const histo::SensorWindow> windows,
                                      const synth::GroundTruth& truth,
                                      std::span<const eval::Variant> variants,
                                      const RunConfig& base_config) {
  std::vector<AblationRow> rows;
  for (eval::Variant v : eval::kAllVariants) {
    if (std::find(variants.begin(), variants.end(), v) == variants.end()) continue;
    AblationRow row;
    row.variant = v;
    try {
      RunConfig config = base_config;
      config.variant = v;
      const DetectOutput output = run_detect(windows, config);
      if (!output.errors.empty()) {
        const auto& e = output.errors.front();
        throw std::runtime_error(e.node_id + " " + e.date + ": " + e.message);
      }
      row.stats = poi_confusion(output, truth);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_confusion_csv(std::ostream& out, std::span<const AblationRow> rows) {
  out << "variant,true_detected_pct,false_positive_pct,false_negative_pct\n";
  for (const auto& row : rows) {
    out << eval::to_string(row.variant) << ',';
    if (row.stats)
      out << io::format_double(row.stats->true_detected_pct) << ','
          << io::format_double(row.stats->false_positive_pct) << ','
          << io::format_double(row.stats->false_negative_pct);
    else
      out << ",,";
    out << '\n';
  }
}

void write_rain_comparison(std::ostream& out, std::span<const io::ResultRecord> records,
                           const io::RawReadResult& reference) {
  struct Accum {
    double sum = 0.0;
    std::int64_t count = 0;
  };
  std::map<std::pair<std::string, TimeMs>, Accum> readings;
  for (const auto& [node, samples] : reference.per_node)
    for (const auto& s : samples) {
      auto& acc = readings[{node, timeutil::window_floor(s.timestamp)}];
      acc.sum += s.value;
      ++acc.count;
    }

  out << "ts,node_id,reference_value,estimated_rain\n";
  for (const auto& r : records) {
    const auto ts = timeutil::parse_iso8601(r.ts);
    if (!ts) throw std::invalid_argument("bad result timestamp '" + r.ts + "'");
    const auto it = readings.find({r.node_id, *ts});
    out << r.ts << ',' << r.node_id << ',';
    if (it != readings.end())
      out << io::format_double(it->second.sum / static_cast<double>(it->second.count));
    out << ',' << (r.suppressed_by_rain ? 1 : 0) << '\n';
  }
}

void write_truth(std::ostream& out, const synth::GroundTruth& truth) {
  for (const auto& rec : truth.records) {
    json j;
    j["activity"] = rec.activity ? 1 : 0;
    j["background"] = rec.background;
    j["node_id"] = rec.node_id;
    j["rain"] = rec.rain ? 1 : 0;
    j["ts"] = timeutil::format_iso8601(rec.window_start);
    out << j.dump() << '\n';
  }
}

synth::GroundTruth read_truth_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  synth::GroundTruth truth;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      synth::TruthRecord rec;
      rec.node_id = j.at("node_id").get<std::string>();
      const auto ts = j.at("ts").get<std::string>();
      const auto parsed = timeutil::parse_iso8601(ts);
      if (!parsed) throw std::runtime_error("bad timestamp '" + ts + "'");
      rec.window_start = *parsed;
      rec.background = j.at("background").get<std::string>();
      rec.activity = j.at("activity").get<int>() != 0;
      rec.rain = j.at("rain").get<int>() != 0;
      truth.records.push_back(std::move(rec));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + " line " + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  return truth;
}

}  // namespace acoustic::pipeline
