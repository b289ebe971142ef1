#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "acoustic/chi2.hpp"
#include "acoustic/detect.hpp"
#include "acoustic/evaluate.hpp"
#include "acoustic/hcluster.hpp"
#include "acoustic/histogram.hpp"
#include "acoustic/pca.hpp"
#include "acoustic/pipeline.hpp"
#include "acoustic/synth.hpp"
#include "acoustic/wavelet.hpp"

namespace py = pybind11;
using namespace acoustic;

namespace {

wavelet::BasisMatrix basis_for(Eigen::Index n) {
  return wavelet::build_basis(wavelet::build_partition(static_cast<int>(n)));
}

cluster::Linkage parse_linkage(const std::string& name) {
  const auto method = cluster::linkage_from_string(name);
  if (!method) throw py::value_error("unknown linkage '" + name + "'");
  return *method;
}

pipeline::RunConfig make_config(int k_clusters, int pca_k, const std::string& beta_mode,
                                double quantile_p, double beta_t, double rain_quorum,
                                int rain_min_duration, const std::string& variant, int workers) {
  pipeline::RunConfig config;
  config.k_clusters = k_clusters;
  config.pca_k = pca_k;
  config.beta.mode = beta_mode == "fixed" ? pipeline::BetaPolicy::Mode::kFixed
                                          : pipeline::BetaPolicy::Mode::kQuantile;
  config.beta.quantile_p = quantile_p;
  config.beta.fixed_value = beta_t;
  config.rain_quorum = rain_quorum;
  config.rain_min_duration_minutes = rain_min_duration;
  const auto v = eval::variant_from_string(variant);
  if (!v) throw py::value_error("unknown variant '" + variant + "'");
  config.variant = *v;
  config.workers = workers;
  config.validate();
  return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sound-histogram analytics core: wavelet, PCA, clustering, detection";

  // Histogram construction.
  m.def("bin_sample", &histo::bin_sample, py::arg("value"),
        "Bin index 1..5 of one intensity level.");
  m.def(
      "build_histogram",
      [](const std::vector<int>& values) {
        const auto h = histo::build_histogram(values);
        return std::vector<std::int64_t>(h.bins.begin(), h.bins.end());
      },
      py::arg("values"), "5-bin counts of a sample sequence.");

  // Wavelet transform.
  m.def(
      "basis_matrix", [](int n) { return basis_for(n).matrix; }, py::arg("n") = 5,
      "Unbalanced Haar basis for n bins (basis vectors as columns).");
  m.def(
      "wavelet_forward",
      [](const Eigen::VectorXd& h) { return wavelet::forward(h, basis_for(h.size())); },
      py::arg("histogram"));
  m.def(
      "wavelet_inverse",
      [](const Eigen::VectorXd& w) { return wavelet::inverse(w, basis_for(w.size())); },
      py::arg("coefficients"));

  // PCA.
  py::class_<pca::PcaModel>(m, "PcaModel")
      .def_readonly("mean", &pca::PcaModel::mean)
      .def_readonly("eigenvalues", &pca::PcaModel::eigenvalues)
      .def_readonly("eigenvectors", &pca::PcaModel::eigenvectors)
      .def_readonly("k", &pca::PcaModel::k);
  m.def(
      "pca_fit", [](const Eigen::MatrixXd& rows) { return pca::fit(rows); }, py::arg("rows"));
  m.def(
      "pca_project",
      [](const pca::PcaModel& model, const Eigen::MatrixXd& rows) {
        return pca::project(model, rows).scores;
      },
      py::arg("model"), py::arg("rows"));
  m.def(
      "pca_reconstruct",
      [](const pca::PcaModel& model, const Eigen::MatrixXd& scores, int k) {
        return pca::reconstruct(model, {scores, false}, k);
      },
      py::arg("model"), py::arg("scores"), py::arg("k"));
  m.def(
      "pca_standardize",
      [](const pca::PcaModel& model, const Eigen::MatrixXd& scores, int k) {
        return pca::standardize(model, {scores, false}, k).scores;
      },
      py::arg("model"), py::arg("scores"), py::arg("k"));
  m.def(
      "select_k", [](const pca::PcaModel& model, int max_k) { return pca::select_k(model, max_k); },
      py::arg("model"), py::arg("max_k") = 4);

  // Clustering.
  py::class_<cluster::Dendrogram>(m, "Dendrogram")
      .def_property_readonly("method",
                             [](const cluster::Dendrogram& d) {
                               return std::string(cluster::to_string(d.method));
                             })
      .def_property_readonly("merges", [](const cluster::Dendrogram& d) {
        std::vector<std::tuple<int, int, double, int>> out;
        for (const auto& s : d.merges) out.emplace_back(s.left, s.right, s.height, s.size);
        return out;
      });
  m.def(
      "linkage",
      [](const Eigen::MatrixXd& points, const std::string& method) {
        return cluster::linkage(cluster::euclidean_distances(points), parse_linkage(method));
      },
      py::arg("points"), py::arg("method") = "average");
  m.def(
      "cophenetic_ccc",
      [](const cluster::Dendrogram& dendro, const Eigen::MatrixXd& points) {
        return cluster::cophenetic_ccc(dendro, cluster::euclidean_distances(points));
      },
      py::arg("dendrogram"), py::arg("points"));
  m.def(
      "select_linkage",
      [](const Eigen::MatrixXd& points, const std::vector<std::string>& methods) {
        std::vector<cluster::Linkage> candidates;
        for (const auto& name : methods) candidates.push_back(parse_linkage(name));
        auto choice = cluster::select_linkage(cluster::euclidean_distances(points), candidates);
        return py::make_tuple(std::string(cluster::to_string(choice.method)), choice.ccc,
                              std::move(choice.dendrogram));
      },
      py::arg("points"),
      py::arg("methods") = std::vector<std::string>{"single", "complete", "average", "ward"});
  m.def(
      "cut", [](const cluster::Dendrogram& d, int k) { return cluster::cut(d, k); },
      py::arg("dendrogram"), py::arg("k"));

  // Chi-square machinery.
  m.def("chi_square_pdf", &stats::chi_square_pdf, py::arg("x"), py::arg("dof"));
  m.def("chi_square_cdf", &stats::chi_square_cdf, py::arg("x"), py::arg("dof"));
  m.def("chi_square_quantile", &stats::chi_square_quantile, py::arg("p"), py::arg("dof"));
  m.def(
      "chi_square_scores",
      [](const Eigen::MatrixXd& standardized_scores, int k) {
        return detect::chi_square_scores({standardized_scores, true}, k);
      },
      py::arg("standardized_scores"), py::arg("k"),
      "Per-row sum of the first k squared standardized scores.");
  m.def(
      "detect_activity",
      [](const std::vector<double>& chi2, double beta) {
        std::vector<timeutil::TimeMs> starts(chi2.size(), 0);
        for (std::size_t i = 0; i < starts.size(); ++i) starts[i] = static_cast<long>(i);
        std::vector<int> flags;
        for (const auto& a : detect::detect_activity(starts, chi2, beta))
          flags.push_back(a.active ? 1 : 0);
        return flags;
      },
      py::arg("chi2"), py::arg("beta"));
  m.def(
      "qq_points",
      [](const std::vector<double>& values, int dof) { return detect::qq_points(values, dof); },
      py::arg("values"), py::arg("dof"));

  // Rain estimation over (node_id, present_ts_ms, marked_ts_ms) triples.
  m.def(
      "estimate_rain",
      [](const std::vector<std::tuple<std::string, std::vector<std::int64_t>,
                                      std::vector<std::int64_t>>>& nodes,
         double quorum, int min_duration_minutes) {
        std::vector<detect::NodeMarks> marks;
        for (const auto& [id, present, marked] : nodes)
          marks.push_back({id,
                           {present.begin(), present.end()},
                           {marked.begin(), marked.end()}});
        std::vector<std::tuple<std::int64_t, std::int64_t, int>> out;
        for (const auto& r : detect::estimate_rain(
                 marks, {quorum, min_duration_minutes * timeutil::kMsPerMinute}))
          out.emplace_back(r.start, r.end, r.supporting_node_count);
        return out;
      },
      py::arg("nodes"), py::arg("quorum") = 0.8, py::arg("min_duration_minutes") = 15);

  // Evaluation.
  m.def("aggregate_or", &eval::aggregate_or, py::arg("per_node_flags"));
  m.def(
      "confusion",
      [](const std::vector<int>& predicted, const std::vector<int>& truth) {
        const auto stats = eval::confusion(predicted, truth);
        return py::dict(py::arg("true_detected_pct") = stats.true_detected_pct,
                        py::arg("false_positive_pct") = stats.false_positive_pct,
                        py::arg("false_negative_pct") = stats.false_negative_pct,
                        py::arg("total") = stats.total);
      },
      py::arg("predicted"), py::arg("truth"));

  // File-level pipeline entries.
  m.def(
      "simulate_files",
      [](const std::filesystem::path& out_dir, int nodes, int days, std::uint64_t seed,
         const std::string& start_date, const std::string& profile, int bursts_per_day,
         double burst_sigma, int rain_count, double rain_sigma, bool emit_raw) {
        synth::SynthConfig config;
        config.node_count = nodes;
        config.days = days;
        config.seed = seed;
        config.start_date = start_date;
        if (profile == "flat") config.profile = synth::flat_profile();
        config.bursts_per_day = bursts_per_day;
        config.burst_sigma = burst_sigma;
        config.rain_count = rain_count;
        config.rain_sigma = rain_sigma;
        const auto dataset = synth::generate(config);
        io::atomic_write(out_dir / "windows.jsonl",
                         [&](std::ostream& os) { io::write_windows(os, dataset.windows); });
        io::atomic_write(out_dir / "truth.jsonl",
                         [&](std::ostream& os) { pipeline::write_truth(os, dataset.truth); });
        if (emit_raw)
          io::atomic_write(out_dir / "raw.csv",
                           [&](std::ostream& os) { synth::write_raw_csv(config, os); });
        return dataset.windows.size();
      },
      py::arg("out_dir"), py::arg("nodes") = 7, py::arg("days") = 14, py::arg("seed") = 12345,
      py::arg("start_date") = "2025-01-06", py::arg("profile") = "urban",
      py::arg("bursts_per_day") = 3, py::arg("burst_sigma") = 3.0, py::arg("rain_count") = 0,
      py::arg("rain_sigma") = 8.0, py::arg("emit_raw") = false);
  m.def(
      "detect_files",
      [](const std::filesystem::path& input, const std::filesystem::path& out_dir, int k_clusters,
         int pca_k, const std::string& beta_mode, double quantile_p, double beta_t,
         double rain_quorum, int rain_min_duration, const std::string& variant, int workers) {
        const auto output = pipeline::run_detect_files(
            input, out_dir,
            make_config(k_clusters, pca_k, beta_mode, quantile_p, beta_t, rain_quorum,
                        rain_min_duration, variant, workers));
        py::dict summary;
        summary["node_days"] = output.node_days.size();
        summary["rain_intervals"] = output.rain.size();
        summary["skipped"] = output.skipped.size();
        summary["errors"] = output.errors.size();
        return summary;
      },
      py::arg("input"), py::arg("out_dir"), py::arg("k_clusters") = 3, py::arg("pca_k") = 4,
      py::arg("beta_mode") = "quantile", py::arg("quantile_p") = 0.975, py::arg("beta_t") = 0.43,
      py::arg("rain_quorum") = 0.8, py::arg("rain_min_duration") = 15,
      py::arg("variant") = "raw+PCA+WT", py::arg("workers") = 0);

  m.attr("__version__") = "0.1.0";
}
