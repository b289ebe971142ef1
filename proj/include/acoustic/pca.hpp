#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace acoustic::pca {

// One node-day of wavelet coefficient vectors, at most one row per
// 5-minute slot. slots[i] is the 0..287 slot index of rows.row(i).
struct DayMatrix {
  std::string node_id;
  std::string date;  // YYYY-MM-DD (UTC)
  Eigen::MatrixXd rows;
  std::vector<int> slots;
};

struct PcaModel {
  Eigen::VectorXd mean;
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenvectors;  // orthonormal columns, matching order
  int k = 0;                     // retained components; fit() sets the full dimension
};

struct ScoreMatrix {
  Eigen::MatrixXd scores;  // one row per input row
  bool standardized = false;
};

inline constexpr double kDegenerateEigenvalue = 1e-12;

// Sample covariance (divisor m-1) of mean-centered rows, eigendecomposed
// with descending eigenvalues. Sign convention: the largest-magnitude entry
// of each eigenvector is positive (first such entry on ties). Throws
// std::invalid_argument for fewer than 2 rows or non-finite input.
PcaModel fit(const Eigen::MatrixXd& rows);
inline PcaModel fit(const DayMatrix& day) { return fit(day.rows); }

// Scores Z: each row is E^T (x - mean).
ScoreMatrix project(const PcaModel& model, const Eigen::MatrixXd& rows);

// mean + sum over the first k components of z_i * e_i, one row per score row.
Eigen::MatrixXd reconstruct(const PcaModel& model, const ScoreMatrix& scores, int k);

// Smallest k <= max_k whose projection error ties the minimum achievable
// within max_k (tolerance 1e-12); the error is monotone, so this is max_k
// unless trailing eigenvalues vanish.
int select_k(const PcaModel& model, int max_k = 4);

// First k score columns divided by sqrt(lambda_i). Throws std::runtime_error
// naming the component when a retained eigenvalue is degenerate.
ScoreMatrix standardize(const PcaModel& model, const ScoreMatrix& scores, int k);

}  // namespace acoustic::pca
