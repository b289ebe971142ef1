#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "acoustic/pipeline.hpp"
#include "acoustic/records.hpp"
#include "acoustic/synth.hpp"

namespace {

using json = nlohmann::json;
using namespace acoustic;

struct ErrorSummary {
  json errors = json::array();

  void add(std::string where, std::string message) {
    errors.push_back({{"where", std::move(where)}, {"message", std::move(message)}});
  }
  bool empty() const { return errors.empty(); }
  int finish() const {
    if (empty()) return 0;
    std::cerr << json{{"errors", errors}}.dump() << '\n';
    return 1;
  }
};

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct DetectOptions {
  int k_clusters = 3;
  int pca_k = 4;
  std::string beta_mode = "quantile";
  double quantile_p = 0.975;
  double beta_t = 0.43;
  double rain_quorum = 0.8;
  int rain_min_duration = 15;
  std::string linkage = "single,complete,average,ward";
  std::string variant = "raw+PCA+WT";
  int workers = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--k-clusters", k_clusters, "Daily background clusters (NP/AP/RP needs 3)")
        ->envname("ACOUSTIC_K_CLUSTERS")
        ->capture_default_str();
    cmd->add_option("--pca-k", pca_k, "Retained principal components")
        ->envname("ACOUSTIC_PCA_K")
        ->capture_default_str();
    cmd->add_option("--beta-mode", beta_mode, "Activity threshold mode: quantile or fixed")
        ->envname("ACOUSTIC_BETA_MODE")
        ->check(CLI::IsMember({"quantile", "fixed"}))
        ->capture_default_str();
    cmd->add_option("--quantile-p", quantile_p, "Chi-square quantile for beta (quantile mode)")
        ->envname("ACOUSTIC_QUANTILE_P")
        ->capture_default_str();
    cmd->add_option("--beta-t", beta_t, "Fixed beta value (fixed mode)")
        ->envname("ACOUSTIC_BETA_T")
        ->capture_default_str();
    cmd->add_option("--rain-quorum", rain_quorum, "Fraction of reporting nodes for rain")
        ->envname("ACOUSTIC_RAIN_QUORUM")
        ->capture_default_str();
    cmd->add_option("--rain-min-duration", rain_min_duration, "Minimum rain duration, minutes")
        ->envname("ACOUSTIC_RAIN_MIN_DURATION")
        ->capture_default_str();
    cmd->add_option("--linkage", linkage, "Candidate linkages, comma-separated")
        ->envname("ACOUSTIC_LINKAGE")
        ->capture_default_str();
    cmd->add_option("--variant", variant, "Preprocessing variant")
        ->envname("ACOUSTIC_VARIANT")
        ->check(CLI::IsMember({"raw", "raw+WT", "raw+PCA", "raw+PCA+WT"}))
        ->capture_default_str();
    cmd->add_option("--workers", workers, "Worker threads (0 = hardware)")
        ->envname("ACOUSTIC_WORKERS")
        ->capture_default_str();
  }

  pipeline::RunConfig to_config() const {
    pipeline::RunConfig config;
    config.k_clusters = k_clusters;
    config.pca_k = pca_k;
    config.beta.mode = beta_mode == "fixed" ? pipeline::BetaPolicy::Mode::kFixed
                                            : pipeline::BetaPolicy::Mode::kQuantile;
    config.beta.quantile_p = quantile_p;
    config.beta.fixed_value = beta_t;
    config.rain_quorum = rain_quorum;
    config.rain_min_duration_minutes = rain_min_duration;
    config.linkage_candidates.clear();
    for (const auto& name : split_csv(linkage)) {
      const auto method = cluster::linkage_from_string(name);
      if (!method) throw CLI::ValidationError("--linkage", "unknown linkage '" + name + "'");
      config.linkage_candidates.push_back(*method);
    }
    const auto v = eval::variant_from_string(variant);
    if (!v) throw CLI::ValidationError("--variant", "unknown variant '" + variant + "'");
    config.variant = *v;
    config.workers = workers;
    config.validate();
    return config;
  }
};

struct SimulateOptions {
  int nodes = 7;
  int days = 14;
  std::uint64_t seed = 12345;
  std::string start_date = "2025-01-06";
  std::string profile = "urban";
  double flat_mean = 12.0;
  double flat_std = 4.0;
  int bursts_per_day = 3;
  int burst_min_minutes = 10;
  int burst_max_minutes = 30;
  double burst_sigma = 3.0;
  int rain_count = 0;
  int rain_min_minutes = 45;
  int rain_max_minutes = 90;
  double rain_sigma = 8.0;
  double rain_node_fraction = 1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--nodes", nodes, "Sensor node count")->envname("ACOUSTIC_NODES")->capture_default_str();
    cmd->add_option("--days", days, "Days to simulate")->envname("ACOUSTIC_DAYS")->capture_default_str();
    cmd->add_option("--seed", seed, "Generator seed")->envname("ACOUSTIC_SEED")->capture_default_str();
    cmd->add_option("--start-date", start_date, "UTC start date (YYYY-MM-DD)")
        ->envname("ACOUSTIC_START_DATE")
        ->capture_default_str();
    cmd->add_option("--profile", profile, "Background profile")
        ->check(CLI::IsMember({"urban", "flat"}))
        ->envname("ACOUSTIC_PROFILE")
        ->capture_default_str();
    cmd->add_option("--flat-mean", flat_mean, "Flat profile mean level")
        ->envname("ACOUSTIC_FLAT_MEAN")
        ->capture_default_str();
    cmd->add_option("--flat-std", flat_std, "Flat profile std")
        ->envname("ACOUSTIC_FLAT_STD")
        ->capture_default_str();
    cmd->add_option("--bursts-per-day", bursts_per_day, "Activity bursts per day")
        ->envname("ACOUSTIC_BURSTS_PER_DAY")
        ->capture_default_str();
    cmd->add_option("--burst-min-minutes", burst_min_minutes, "Shortest burst")
        ->envname("ACOUSTIC_BURST_MIN_MINUTES")
        ->capture_default_str();
    cmd->add_option("--burst-max-minutes", burst_max_minutes, "Longest burst")
        ->envname("ACOUSTIC_BURST_MAX_MINUTES")
        ->capture_default_str();
    cmd->add_option("--burst-sigma", burst_sigma, "Burst amplitude, hour-std units")
        ->envname("ACOUSTIC_BURST_SIGMA")
        ->capture_default_str();
    cmd->add_option("--rain-count", rain_count, "Rain segments over the run")
        ->envname("ACOUSTIC_RAIN_COUNT")
        ->capture_default_str();
    cmd->add_option("--rain-min-minutes", rain_min_minutes, "Shortest rain segment")
        ->envname("ACOUSTIC_RAIN_MIN_MINUTES")
        ->capture_default_str();
    cmd->add_option("--rain-max-minutes", rain_max_minutes, "Longest rain segment")
        ->envname("ACOUSTIC_RAIN_MAX_MINUTES")
        ->capture_default_str();
    cmd->add_option("--rain-sigma", rain_sigma, "Rain amplitude, hour-std units")
        ->envname("ACOUSTIC_RAIN_SIGMA")
        ->capture_default_str();
    cmd->add_option("--rain-node-fraction", rain_node_fraction, "Fraction of nodes rain affects")
        ->envname("ACOUSTIC_RAIN_NODE_FRACTION")
        ->capture_default_str();
  }

  synth::SynthConfig to_config() const {
    synth::SynthConfig config;
    config.node_count = nodes;
    config.days = days;
    config.seed = seed;
    config.start_date = start_date;
    config.profile = profile == "flat" ? synth::flat_profile(flat_mean, flat_std)
                                       : synth::urban_profile();
    config.bursts_per_day = bursts_per_day;
    config.burst_min_minutes = burst_min_minutes;
    config.burst_max_minutes = burst_max_minutes;
    config.burst_sigma = burst_sigma;
    config.rain_count = rain_count;
    config.rain_min_minutes = rain_min_minutes;
    config.rain_max_minutes = rain_max_minutes;
    config.rain_sigma = rain_sigma;
    config.rain_node_fraction = rain_node_fraction;
    config.validate();
    return config;
  }

  json to_json() const {
    return {{"nodes", nodes},
            {"days", days},
            {"seed", seed},
            {"start_date", start_date},
            {"profile", profile},
            {"flat_mean", flat_mean},
            {"flat_std", flat_std},
            {"bursts_per_day", bursts_per_day},
            {"burst_min_minutes", burst_min_minutes},
            {"burst_max_minutes", burst_max_minutes},
            {"burst_sigma", burst_sigma},
            {"rain_count", rain_count},
            {"rain_min_minutes", rain_min_minutes},
            {"rain_max_minutes", rain_max_minutes},
            {"rain_sigma", rain_sigma},
            {"rain_node_fraction", rain_node_fraction}};
  }
};

int cmd_compress(const std::string& input, const std::string& output, bool strict) {
  ErrorSummary summary;
  const auto raw = io::read_raw_csv_file(input, strict);
  for (const auto& issue : raw.issues)
    summary.add(input + ":" + std::to_string(issue.line), issue.message);

  std::vector<histo::SensorWindow> windows;
  for (const auto& [node, samples] : raw.per_node) {
    auto node_windows = histo::windowize(samples, node);
    windows.insert(windows.end(), node_windows.begin(), node_windows.end());
  }
  std::sort(windows.begin(), windows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.node_id, a.window_start) < std::tie(b.node_id, b.window_start);
  });

  io::atomic_write(output, [&](std::ostream& os) { io::write_windows(os, windows); });
  io::atomic_write(output + ".meta.json", [&](std::ostream& os) {
    json meta;
    meta["config"] = {{"input", input}, {"output", output}, {"strict", strict}};
    meta["windows_written"] = windows.size();
    meta["parse_issues"] = raw.issues.size();
    os << meta.dump(2) << '\n';
  });
  return summary.finish();
}

int cmd_detect(const std::string& input, const std::string& out_dir,
               const DetectOptions& options, bool strict) {
  if (options.k_clusters != 3)
    throw CLI::ValidationError("--k-clusters",
                               "the NP/AP/RP period taxonomy requires exactly 3 clusters");
  ErrorSummary summary;
  const auto output = pipeline::run_detect_files(input, out_dir, options.to_config(), strict);
  for (const auto& e : output.errors)
    summary.add(e.node_id.empty() ? input : e.node_id + " " + e.date, e.message);
  for (const auto& s : output.skipped) std::cerr << "skipped: " << s << '\n';
  return summary.finish();
}

int cmd_simulate(const std::string& out_dir, const SimulateOptions& options, bool emit_raw) {
  const auto config = options.to_config();
  const auto dataset = synth::generate(config);
  const std::filesystem::path dir(out_dir);
  io::atomic_write(dir / "windows.jsonl",
                   [&](std::ostream& os) { io::write_windows(os, dataset.windows); });
  io::atomic_write(dir / "truth.jsonl",
                   [&](std::ostream& os) { pipeline::write_truth(os, dataset.truth); });
  if (emit_raw)
    io::atomic_write(dir / "raw.csv", [&](std::ostream& os) { synth::write_raw_csv(config, os); });
  io::atomic_write(dir / "sim_meta.json", [&](std::ostream& os) {
    json meta;
    meta["config"] = options.to_json();
    meta["windows"] = dataset.windows.size();
    meta["emit_raw"] = emit_raw;
    os << meta.dump(2) << '\n';
  });
  return 0;
}

int cmd_evaluate(const std::string& truth_path, const std::string& output,
                 const std::string& results_path, const std::string& windows_path,
                 const std::string& variants_csv, const std::string& rain_reference,
                 const DetectOptions& options) {
  ErrorSummary summary;
  const auto truth = pipeline::read_truth_file(truth_path);
  std::vector<pipeline::AblationRow> rows;

  if (!results_path.empty()) {
    const auto results = io::read_results_file(results_path);
    for (const auto& issue : results.issues)
      summary.add(results_path + ":" + std::to_string(issue.line), issue.message);
    pipeline::AblationRow row;
    row.variant = options.to_config().variant;
    row.stats = pipeline::evaluate_results(results.records, truth);
    rows.push_back(std::move(row));

    if (!rain_reference.empty()) {
      const auto reference = io::read_raw_csv_file(rain_reference);
      for (const auto& issue : reference.issues)
        summary.add(rain_reference + ":" + std::to_string(issue.line), issue.message);
      const auto comparison =
          std::filesystem::path(output).parent_path() / "rain_comparison.csv";
      io::atomic_write(comparison, [&](std::ostream& os) {
        pipeline::write_rain_comparison(os, results.records, reference);
      });
    }
  } else {
    const auto input = io::read_windows_file(windows_path);
    for (const auto& issue : input.issues)
      summary.add(windows_path + ":" + std::to_string(issue.line), issue.message);
    std::vector<eval::Variant> variants;
    for (const auto& name : split_csv(variants_csv)) {
      const auto v = eval::variant_from_string(name);
      if (!v) throw CLI::ValidationError("--variants", "unknown variant '" + name + "'");
      variants.push_back(*v);
    }
    rows = pipeline::run_ablation(input.windows, truth, variants, options.to_config());
    for (const auto& row : rows)
      if (!row.error.empty()) summary.add(eval::to_string(row.variant), row.error);
  }

  io::atomic_write(output, [&](std::ostream& os) { pipeline::write_confusion_csv(os, rows); });
  io::atomic_write(output + ".meta.json", [&](std::ostream& os) {
    json meta;
    meta["config"] = {{"truth", truth_path},
                      {"results", results_path},
                      {"windows", windows_path},
                      {"variants", variants_csv}};
    json table = json::array();
    for (const auto& row : rows) {
      json r{{"variant", eval::to_string(row.variant)}};
      if (row.stats) {
        r["true_detected_pct"] = row.stats->true_detected_pct;
        r["false_positive_pct"] = row.stats->false_positive_pct;
        r["false_negative_pct"] = row.stats->false_negative_pct;
      } else {
        r["error"] = row.error;
      }
      table.push_back(std::move(r));
    }
    meta["rows"] = table;
    os << meta.dump(2) << '\n';
  });
  return summary.finish();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ambient-sound histogram analytics: compression, detection, simulation, evaluation"};
  app.require_subcommand(1);

  // compress
  auto* compress = app.add_subcommand("compress", "Bin a raw 10 Hz sample CSV into 5-minute windows");
  std::string compress_input, compress_output = "windows.jsonl";
  bool compress_strict = false;
  compress->add_option("--input", compress_input, "Raw sample CSV (ts,node_id,value)")
      ->envname("ACOUSTIC_INPUT")
      ->required();
  compress->add_option("--output", compress_output, "Window JSONL output")
      ->envname("ACOUSTIC_OUTPUT")
      ->capture_default_str();
  compress->add_flag("--strict", compress_strict, "Abort on the first malformed line")
      ->envname("ACOUSTIC_STRICT");

  // detect
  auto* detect_cmd = app.add_subcommand("detect", "Run the full detection pipeline on windows");
  std::string detect_input, detect_out_dir = "out";
  bool detect_strict = false;
  DetectOptions detect_options;
  detect_cmd->add_option("--input", detect_input, "Window JSONL input")
      ->envname("ACOUSTIC_INPUT")
      ->required();
  detect_cmd->add_option("--out-dir", detect_out_dir, "Output directory")
      ->envname("ACOUSTIC_OUT_DIR")
      ->capture_default_str();
  detect_cmd->add_flag("--strict", detect_strict, "Abort on the first malformed line")
      ->envname("ACOUSTIC_STRICT");
  detect_options.attach(detect_cmd);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate a seeded synthetic dataset");
  std::string sim_out_dir = "sim";
  bool emit_raw = false;
  SimulateOptions sim_options;
  simulate->add_option("--out-dir", sim_out_dir, "Output directory")
      ->envname("ACOUSTIC_OUT_DIR")
      ->capture_default_str();
  simulate->add_flag("--emit-raw", emit_raw, "Also write the raw 10 Hz CSV")
      ->envname("ACOUSTIC_EMIT_RAW");
  sim_options.attach(simulate);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score results (or run the ablation) against ground truth");
  std::string eval_truth, eval_output = "confusion.csv", eval_results, eval_windows;
  std::string eval_variants = "raw,raw+WT,raw+PCA,raw+PCA+WT";
  DetectOptions eval_options;
  evaluate->add_option("--truth", eval_truth, "Ground-truth JSONL")
      ->envname("ACOUSTIC_TRUTH")
      ->required();
  evaluate->add_option("--output", eval_output, "Confusion CSV output")
      ->envname("ACOUSTIC_OUTPUT")
      ->capture_default_str();
  auto* results_opt = evaluate->add_option("--results", eval_results,
                                           "Existing results JSONL to score");
  results_opt->envname("ACOUSTIC_RESULTS");
  auto* windows_opt = evaluate->add_option("--windows", eval_windows,
                                           "Window JSONL to run the ablation on");
  windows_opt->envname("ACOUSTIC_WINDOWS");
  results_opt->excludes(windows_opt);
  evaluate->add_option("--variants", eval_variants, "Ablation variants, comma-separated")
      ->envname("ACOUSTIC_VARIANTS")
      ->capture_default_str();
  std::string eval_rain_reference;
  evaluate->add_option("--rain-reference", eval_rain_reference,
                       "Reference rain-sensor CSV (ts,node_id,value) for side-by-side reporting")
      ->envname("ACOUSTIC_RAIN_REFERENCE")
      ->needs(results_opt);
  eval_options.attach(evaluate);

  CLI11_PARSE(app, argc, argv);

  try {
    if (compress->parsed()) return cmd_compress(compress_input, compress_output, compress_strict);
    if (detect_cmd->parsed())
      return cmd_detect(detect_input, detect_out_dir, detect_options, detect_strict);
    if (simulate->parsed()) return cmd_simulate(sim_out_dir, sim_options, emit_raw);
    if (evaluate->parsed()) {
      if (eval_results.empty() && eval_windows.empty())
        throw CLI::ValidationError("evaluate", "one of --results or --windows is required");
      return cmd_evaluate(eval_truth, eval_output, eval_results, eval_windows, eval_variants,
                          eval_rain_reference, eval_options);
    }
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"errors", {{{"where", "cli"}, {"message", e.what()}}}}}.dump()
              << '\n';
    return 1;
  }
  return 0;
}
