#include "acoustic/pca.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace acoustic::pca {

PcaModel fit(const Eigen::MatrixXd& rows) {
  const Eigen::Index m = rows.rows();
  const Eigen::Index n = rows.cols();
  if (m < 2)
    throw std::invalid_argument("PCA needs at least 2 rows, got " + std::to_string(m));
  if (!rows.allFinite()) throw std::invalid_argument("PCA input contains non-finite values");

  PcaModel model;
  model.mean = rows.colwise().mean();
  const Eigen::MatrixXd centered = rows.rowwise() - model.mean.transpose();
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(m - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed to converge");

  // Eigen reports ascending order; flip to descending.
  model.eigenvalues = solver.eigenvalues().reverse();
  model.eigenvectors = solver.eigenvectors().rowwise().reverse();

  // Deterministic sign: first largest-|entry| coordinate made positive.
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < n; ++r) {
      const double mag = std::fabs(model.eigenvectors(r, c));
      if (mag > best) {
        best = mag;
        arg = r;
      }
    }
    if (model.eigenvectors(arg, c) < 0.0) model.eigenvectors.col(c) *= -1.0;
  }
  model.k = static_cast<int>(n);
  return model;
}

ScoreMatrix project(const PcaModel& model, const Eigen::MatrixXd& rows) {
  if (rows.cols() != model.mean.size())
    throw std::invalid_argument("row dimension " + std::to_string(rows.cols()) +
                                " does not match fitted dimension " +
                                std::to_string(model.mean.size()));
  ScoreMatrix out;
  out.scores = (rows.rowwise() - model.mean.transpose()) * model.eigenvectors;
  return out;
}

Eigen::MatrixXd reconstruct(const PcaModel& model, const ScoreMatrix& scores, int k) {
  const Eigen::Index n = model.mean.size();
  if (k < 1 || k > n)
    throw std::invalid_argument("retained component count " + std::to_string(k) +
                                " outside [1, " + std::to_string(n) + "]");
  if (scores.scores.cols() < k)
    throw std::invalid_argument("score matrix has fewer than k columns");
  Eigen::MatrixXd out =
      scores.scores.leftCols(k) * model.eigenvectors.leftCols(k).transpose();
  out.rowwise() += model.mean.transpose();
  return out;
}

int select_k(const PcaModel& model, int max_k) {
  const int n = static_cast<int>(model.eigenvalues.size());
  if (max_k < 1 || max_k >= n)
    throw std::invalid_argument("max_k must lie in [1, " + std::to_string(n - 1) + "]");

  // Projection error of k is the clamped tail eigenvalue sum.
  auto tail = [&](int k) {
    double s = 0.0;
    for (int i = k; i < n; ++i) s += std::max(model.eigenvalues(i), 0.0);
    return s;
  };
  const double best = tail(max_k);
  for (int k = 1; k < max_k; ++k)
    if (tail(k) <= best + 1e-12) return k;
  return max_k;
}

ScoreMatrix standardize(const PcaModel& model, const ScoreMatrix& scores, int k) {
  if (k < 1 || k > scores.scores.cols())
    throw std::invalid_argument("retained component count " + std::to_string(k) +
                                " outside the score matrix width");
  for (int i = 0; i < k; ++i)
    if (!(model.eigenvalues(i) > kDegenerateEigenvalue))
      throw std::runtime_error("degenerate component " + std::to_string(i + 1) +
                               ": eigenvalue " + std::to_string(model.eigenvalues(i)) +
                               " below " + std::to_string(kDegenerateEigenvalue));
  ScoreMatrix out;
  out.scores = scores.scores.leftCols(k);
  for (int i = 0; i < k; ++i) out.scores.col(i) /= std::sqrt(model.eigenvalues(i));
  out.standardized = true;
  return out;
}

}  // namespace acoustic::pca
