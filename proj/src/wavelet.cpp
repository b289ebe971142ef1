#include "acoustic/wavelet.hpp"

#include <cmath>
#include <stdexcept>

namespace acoustic::wavelet {

PartitionTree build_partition(int n) {
  if (n < 1) throw std::domain_error("partition requires at least one bin");
  PartitionTree tree;
  tree.n = n;

  // Level-order construction keeps the T_{i,j} indices straightforward.
  struct Pending {
    int level, begin, end;
  };
  std::vector<Pending> current{{0, 0, n}};
  while (!current.empty()) {
    std::vector<Pending> next;
    int j = 1;
    for (const auto& p : current) {
      tree.nodes.push_back({p.level, j++, p.begin, p.end});
      tree.left_child.push_back(-1);
      tree.right_child.push_back(-1);
      const int size = p.end - p.begin;
      if (size > 1) {
        const int mid = p.begin + (size + 1) / 2;  // left child takes ceil(size/2)
        next.push_back({p.level + 1, p.begin, mid});
        next.push_back({p.level + 1, mid, p.end});
      }
    }
    current = std::move(next);
  }

  // Wire children: nodes of level i+1 appear in the same left-to-right order
  // their parents were split in.
  std::size_t child = 1;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].size() > 1) {
      tree.left_child[i] = static_cast<int>(child++);
      tree.right_child[i] = static_cast<int>(child++);
    }
  }

  // Detail columns in depth-first pre-order: a node's split precedes every
  // split inside its left part, which precedes every split in its right part.
  auto emit = [&](auto&& self, int node) -> void {
    if (tree.nodes[static_cast<std::size_t>(node)].size() <= 1) return;
    tree.detail_order.push_back(node);
    self(self, tree.left_child[static_cast<std::size_t>(node)]);
    self(self, tree.right_child[static_cast<std::size_t>(node)]);
  };
  if (!tree.nodes.empty()) emit(emit, 0);
  return tree;
}

BasisMatrix build_basis(const PartitionTree& tree) {
  const int n = tree.n;
  BasisMatrix basis;
  basis.n = n;
  basis.matrix = Eigen::MatrixXd::Zero(n, n);
  basis.matrix.col(0).setOnes();

  int col = 1;
  for (int node : tree.detail_order) {
    const std::size_t id = static_cast<std::size_t>(node);
    const auto& left = tree.nodes[static_cast<std::size_t>(tree.left_child[id])];
    const auto& right = tree.nodes[static_cast<std::size_t>(tree.right_child[id])];
    const double a = left.size();
    const double b = right.size();
    const double pos = std::sqrt(n * b / (a * (a + b)));
    const double neg = -std::sqrt(n * a / (b * (a + b)));
    for (int m = left.begin; m < left.end; ++m) basis.matrix(m, col) = pos;
    for (int m = right.begin; m < right.end; ++m) basis.matrix(m, col) = neg;
    ++col;
  }
  return basis;
}

Eigen::VectorXd forward(const Eigen::VectorXd& h, const BasisMatrix& basis) {
  if (h.size() != basis.n)
    throw std::invalid_argument("histogram length " + std::to_string(h.size()) +
                                " does not match basis dimension " + std::to_string(basis.n));
  return basis.matrix.transpose() * h / static_cast<double>(basis.n);
}

Eigen::VectorXd forward(const histo::Histogram& h, const BasisMatrix& basis) {
  Eigen::VectorXd v(histo::kBinCount);
  for (int i = 0; i < histo::kBinCount; ++i)
    v(i) = static_cast<double>(h.bins[static_cast<std::size_t>(i)]);
  return forward(v, basis);
}

Eigen::VectorXd inverse(const Eigen::VectorXd& w, const BasisMatrix& basis) {
  if (w.size() != basis.n)
    throw std::invalid_argument("coefficient length " + std::to_string(w.size()) +
                                " does not match basis dimension " + std::to_string(basis.n));
  return basis.matrix * w;
}

}  // namespace acoustic::wavelet
