#pragma once

#include <Eigen/Dense>
#include <vector>

#include "acoustic/histogram.hpp"

namespace acoustic::wavelet {

// One interval of the nested bin partition. Bins are the half-open range
// [begin, end) in 0-based indices; (level, index) reproduces the usual
// T_{i,j} naming with j counted 1-based left to right within a level.
struct TreeNode {
  int level = 0;
  int index = 1;
  int begin = 0;
  int end = 0;

  int size() const { return end - begin; }
};

// Recursive ceil/floor halving of n bins. Internal nodes (size > 1) each
// contribute one detail vector; there are exactly n-1 of them.
struct PartitionTree {
  int n = 0;
  std::vector<TreeNode> nodes;       // level order
  std::vector<int> left_child;       // index into nodes, -1 for leaves
  std::vector<int> right_child;      // index into nodes, -1 for leaves
  std::vector<int> detail_order;     // internal nodes, depth-first pre-order
};

PartitionTree build_partition(int n);

// Orthogonal (up to the common factor n) unbalanced Haar basis. Basis
// vectors are the columns: column 0 is all ones, column 1+c is the detail
// vector of the c-th internal node in detail_order. For a split into left
// size a and right size b, left members get +sqrt(n*b / (a*(a+b))) and
// right members get -sqrt(n*a / (b*(a+b))), so B^T B = n*I.
struct BasisMatrix {
  int n = 0;
  Eigen::MatrixXd matrix;  // n x n, bins as rows, basis vectors as columns
};

BasisMatrix build_basis(const PartitionTree& tree);

// w = (1/n) B^T h; the leading coefficient is the mean of the bins.
Eigen::VectorXd forward(const Eigen::VectorXd& h, const BasisMatrix& basis);
Eigen::VectorXd forward(const histo::Histogram& h, const BasisMatrix& basis);

// h = B w; exact inverse of forward up to roundoff.
Eigen::VectorXd inverse(const Eigen::VectorXd& w, const BasisMatrix& basis);

}  // namespace acoustic::wavelet
