#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace acoustic::cluster {

enum class Linkage { kSingle, kComplete, kAverage, kWard };

// Fixed preference order for CCC tie-breaks.
inline constexpr Linkage kAllLinkages[] = {Linkage::kSingle, Linkage::kComplete,
                                           Linkage::kAverage, Linkage::kWard};

const char* to_string(Linkage method);
std::optional<Linkage> linkage_from_string(std::string_view name);

// Condensed upper-triangular pairwise distances over m points.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(int m);

  int size() const { return m_; }
  double& at(int i, int j) { return values_[index(i, j)]; }
  double at(int i, int j) const { return values_[index(i, j)]; }
  const std::vector<double>& condensed() const { return values_; }

 private:
  std::size_t index(int i, int j) const;
  int m_;
  std::vector<double> values_;
};

DistanceMatrix euclidean_distances(const Eigen::MatrixXd& rows);
DistanceMatrix euclidean_distances(const std::vector<std::vector<double>>& rows);

// One agglomeration step. Cluster ids follow the usual convention: points
// are 0..m-1 and the cluster formed by step s gets id m+s.
struct MergeStep {
  int left = 0;
  int right = 0;
  double height = 0.0;
  int size = 0;
};

struct Dendrogram {
  Linkage method = Linkage::kSingle;
  int m = 0;
  std::vector<MergeStep> merges;
};

// Lance-Williams agglomeration with a deterministic tie-break: among
// equal-distance candidate pairs, the lexicographically smallest (i, j)
// cluster-id pair merges first. Throws for m < 2.
Dendrogram linkage(const DistanceMatrix& dist, Linkage method);

// Height of the lowest merge joining each pair, condensed layout.
std::vector<double> cophenetic_distances(const Dendrogram& dendro);

// Pearson correlation between original and cophenetic distances. Throws
// std::runtime_error when either vector has zero variance.
double cophenetic_ccc(const Dendrogram& dendro, const DistanceMatrix& dist);

struct LinkageChoice {
  Linkage method = Linkage::kSingle;
  Dendrogram dendrogram;
  double ccc = 0.0;
};

// Evaluates the candidates in the fixed kAllLinkages order (restricted to
// `methods`), keeping the strictly highest CCC; candidates with undefined
// CCC are skipped, and if all are undefined the last error propagates.
LinkageChoice select_linkage(const DistanceMatrix& dist, std::span<const Linkage> methods);

// Partition into k clusters by undoing the last k-1 merges; labels 1..k in
// order of first member appearance.
std::vector<int> cut(const Dendrogram& dendro, int k);

}  // namespace acoustic::cluster
