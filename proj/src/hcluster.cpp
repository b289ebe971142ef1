#include "acoustic/hcluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace acoustic::cluster {

const char* to_string(Linkage method) {
  switch (method) {
    case Linkage::kSingle: return "single";
    case Linkage::kComplete: return "complete";
    case Linkage::kAverage: return "average";
    case Linkage::kWard: return "ward";
  }
  return "?";
}

std::optional<Linkage> linkage_from_string(std::string_view name) {
  for (Linkage l : kAllLinkages)
    if (name == to_string(l)) return l;
  return std::nullopt;
}

DistanceMatrix::DistanceMatrix(int m) : m_(m) {
  if (m < 1) throw std::invalid_argument("distance matrix needs at least one point");
  values_.assign(static_cast<std::size_t>(m) * (m - 1) / 2, 0.0);
}

std::size_t DistanceMatrix::index(int i, int j) const {
  if (i == j || i < 0 || j < 0 || i >= m_ || j >= m_)
    throw std::out_of_range("bad distance index (" + std::to_string(i) + ", " +
                            std::to_string(j) + ")");
  if (i > j) std::swap(i, j);
  return static_cast<std::size_t>(i) * (2 * m_ - i - 1) / 2 + (j - i - 1);
}

DistanceMatrix euclidean_distances(const Eigen::MatrixXd& rows) {
  if (!rows.allFinite()) throw std::invalid_argument("distance input contains non-finite values");
  const int m = static_cast<int>(rows.rows());
  DistanceMatrix dist(m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) dist.at(i, j) = (rows.row(i) - rows.row(j)).norm();
  return dist;
}

DistanceMatrix euclidean_distances(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("distance input is empty");
  const std::size_t n = rows.front().size();
  Eigen::MatrixXd mat(rows.size(), n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != n)
      throw std::invalid_argument("row " + std::to_string(i) + " has length " +
                                  std::to_string(rows[i].size()) + ", expected " +
                                  std::to_string(n));
    for (std::size_t j = 0; j < n; ++j) mat(i, j) = rows[i][j];
  }
  return euclidean_distances(mat);
}

Dendrogram linkage(const DistanceMatrix& dist, Linkage method) {
  const int m = dist.size();
  if (m < 2) throw std::invalid_argument("clustering needs at least 2 points");

  // Full working matrix over all 2m-1 potential cluster ids; fine for the
  // per-day sizes this pipeline sees (m <= 288).
  const int total = 2 * m - 1;
  std::vector<double> d(static_cast<std::size_t>(total) * total, 0.0);
  auto dd = [&](int a, int b) -> double& { return d[static_cast<std::size_t>(a) * total + b]; };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) dd(i, j) = dd(j, i) = dist.at(i, j);

  std::vector<int> sizes(total, 1);
  std::vector<int> active(m);
  std::iota(active.begin(), active.end(), 0);

  Dendrogram out;
  out.method = method;
  out.m = m;
  out.merges.reserve(m - 1);

  for (int step = 0; step < m - 1; ++step) {
    // `active` is kept ascending, so the first strict minimum realizes the
    // lexicographic (i, j) tie-break.
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 1;
    for (std::size_t a = 0; a + 1 < active.size(); ++a)
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        const double v = dd(active[a], active[b]);
        if (v < best) {
          best = v;
          bi = a;
          bj = b;
        }
      }

    const int li = active[bi], rj = active[bj];
    const int merged = m + step;
    sizes[merged] = sizes[li] + sizes[rj];
    out.merges.push_back({li, rj, best, sizes[merged]});

    const double si = sizes[li];
    const double sj = sizes[rj];
    for (int other : active) {
      if (other == li || other == rj) continue;
      const double dik = dd(other, li);
      const double djk = dd(other, rj);
      double v = 0.0;
      switch (method) {
        case Linkage::kSingle: v = std::min(dik, djk); break;
        case Linkage::kComplete: v = std::max(dik, djk); break;
        case Linkage::kAverage: v = (si * dik + sj * djk) / (si + sj); break;
        case Linkage::kWard: {
          const double sk = sizes[other];
          v = std::sqrt(((si + sk) * dik * dik + (sj + sk) * djk * djk - sk * best * best) /
                        (si + sj + sk));
          break;
        }
      }
      dd(other, merged) = dd(merged, other) = v;
    }

    // New ids only grow, so erase + push_back keeps `active` ascending.
    active.erase(active.begin() + bj);
    active.erase(active.begin() + bi);
    active.push_back(merged);
  }
  return out;
}

std::vector<double> cophenetic_distances(const Dendrogram& dendro) {
  const int m = dendro.m;
  std::vector<double> coph(static_cast<std::size_t>(m) * (m - 1) / 2, 0.0);
  auto idx = [m](int i, int j) {
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(i) * (2 * m - i - 1) / 2 + (j - i - 1);
  };

  std::vector<std::vector<int>> members(2 * m - 1);
  for (int i = 0; i < m; ++i) members[i] = {i};
  for (std::size_t s = 0; s < dendro.merges.size(); ++s) {
    const auto& step = dendro.merges[s];
    auto& left = members[step.left];
    auto& right = members[step.right];
    for (int a : left)
      for (int b : right) coph[idx(a, b)] = step.height;
    auto& dst = members[m + s];
    dst.reserve(left.size() + right.size());
    dst.insert(dst.end(), left.begin(), left.end());
    dst.insert(dst.end(), right.begin(), right.end());
    left = {};
    right = {};
  }
  return coph;
}

double cophenetic_ccc(const Dendrogram& dendro, const DistanceMatrix& dist) {
  if (dendro.m != dist.size())
    throw std::invalid_argument("dendrogram and distance matrix sizes differ");
  const auto coph = cophenetic_distances(dendro);
  const auto& orig = dist.condensed();

  const double n = static_cast<double>(orig.size());
  const double mean_o = std::accumulate(orig.begin(), orig.end(), 0.0) / n;
  const double mean_c = std::accumulate(coph.begin(), coph.end(), 0.0) / n;
  double soo = 0.0, scc = 0.0, soc = 0.0;
  for (std::size_t i = 0; i < orig.size(); ++i) {
    const double o = orig[i] - mean_o;
    const double c = coph[i] - mean_c;
    soo += o * o;
    scc += c * c;
    soc += o * c;
  }
  if (soo <= 0.0 || scc <= 0.0)
    throw std::runtime_error(std::string("cophenetic correlation undefined: zero variance in ") +
                             (soo <= 0.0 ? "original" : "cophenetic") + " distances");
  return soc / std::sqrt(soo * scc);
}

LinkageChoice select_linkage(const DistanceMatrix& dist, std::span<const Linkage> methods) {
  if (methods.empty()) throw std::invalid_argument("no candidate linkage methods");

  LinkageChoice best;
  bool found = false;
  std::string last_error;
  for (Linkage candidate : kAllLinkages) {
    if (std::find(methods.begin(), methods.end(), candidate) == methods.end()) continue;
    Dendrogram dendro = linkage(dist, candidate);
    double ccc;
    try {
      ccc = cophenetic_ccc(dendro, dist);
    } catch (const std::runtime_error& e) {
      last_error = e.what();
      continue;
    }
    if (!found || ccc > best.ccc) {
      best = {candidate, std::move(dendro), ccc};
      found = true;
    }
  }
  if (!found)
    throw std::runtime_error("every candidate linkage had an undefined CCC: " + last_error);
  return best;
}

std::vector<int> cut(const Dendrogram& dendro, int k) {
  const int m = dendro.m;
  if (k < 1 || k > m)
    throw std::invalid_argument("cluster count " + std::to_string(k) + " outside [1, " +
                                std::to_string(m) + "]");

  std::vector<int> parent(2 * m - 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (int s = 0; s < m - k; ++s) {
    const auto& step = dendro.merges[s];
    parent[find(step.left)] = m + s;
    parent[find(step.right)] = m + s;
  }

  std::vector<int> labels(m, 0);
  std::vector<int> root_label(2 * m - 1, 0);
  int next = 0;
  for (int i = 0; i < m; ++i) {
    const int root = find(i);
    if (root_label[root] == 0) root_label[root] = ++next;
    labels[i] = root_label[root];
  }
  return labels;
}

}  // namespace acoustic::cluster
