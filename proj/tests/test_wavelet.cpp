#include <doctest.h>

#include <random>
#include <vector>

#include "acoustic/wavelet.hpp"

using namespace acoustic;

namespace {

std::vector<int> node_sizes(const wavelet::PartitionTree& tree) {
  std::vector<int> out;
  for (const auto& n : tree.nodes) out.push_back(n.size());
  return out;
}

Eigen::VectorXd random_vector(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

}  // namespace

TEST_SUITE("wavelet") {
  TEST_CASE("five-bin partition matches the published tree") {
    const auto tree = wavelet::build_partition(5);
    REQUIRE(tree.nodes.size() == 9);
    // Level order: {1..5}; {1,2,3},{4,5}; {1,2},{3},{4},{5}; {1},{2}.
    CHECK(node_sizes(tree) == std::vector<int>{5, 3, 2, 2, 1, 1, 1, 1, 1});
    CHECK(tree.nodes[1].level == 1);
    CHECK(tree.nodes[1].index == 1);
    CHECK(tree.nodes[1].begin == 0);
    CHECK(tree.nodes[1].end == 3);
    CHECK(tree.nodes[2].index == 2);
    CHECK(tree.nodes[2].begin == 3);
    CHECK(tree.nodes[2].end == 5);
    CHECK(tree.nodes[3].level == 2);
    CHECK(tree.nodes[3].end - tree.nodes[3].begin == 2);  // T_{2,1} = {1,2}
    CHECK(tree.nodes[4].size() == 1);                     // T_{2,2} = {3}
    REQUIRE(tree.detail_order.size() == 4);
  }

  TEST_CASE("partition edge cases") {
    const auto one = wavelet::build_partition(1);
    CHECK(one.nodes.size() == 1);
    CHECK(one.detail_order.empty());
    CHECK_THROWS_AS(wavelet::build_partition(0), std::domain_error);

    const auto four = wavelet::build_partition(4);
    CHECK(node_sizes(four) == std::vector<int>{4, 2, 2, 1, 1, 1, 1});
  }

  TEST_CASE("five-bin basis matches the published matrix to 2 decimals") {
    const auto basis = wavelet::build_basis(wavelet::build_partition(5));
    const double expected[5][5] = {
        {1, 0.82, 0.91, 1.58, 0.00},
        {1, 0.82, 0.91, -1.58, 0.00},
        {1, 0.82, -1.82, 0.00, 0.00},
        {1, -1.22, 0.00, 0.00, 1.58},
        {1, -1.22, 0.00, 0.00, -1.58},
    };
    for (int r = 0; r < 5; ++r)
      for (int c = 0; c < 5; ++c)
        CHECK(std::abs(basis.matrix(r, c) - expected[r][c]) <= 0.01);
  }

  TEST_CASE("two-bin basis has the closed form") {
    const auto basis = wavelet::build_basis(wavelet::build_partition(2));
    CHECK(basis.matrix(0, 0) == doctest::Approx(1.0));
    CHECK(basis.matrix(1, 0) == doctest::Approx(1.0));
    CHECK(basis.matrix(0, 1) == doctest::Approx(1.0));
    CHECK(basis.matrix(1, 1) == doctest::Approx(-1.0));
  }

  TEST_CASE("B^T B = n I for n up to 64") {
    for (int n = 1; n <= 64; ++n) {
      const auto basis = wavelet::build_basis(wavelet::build_partition(n));
      const Eigen::MatrixXd gram = basis.matrix.transpose() * basis.matrix;
      const Eigen::MatrixXd target = n * Eigen::MatrixXd::Identity(n, n);
      CHECK((gram - target).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }

  TEST_CASE("detail vectors annihilate constants") {
    for (int n : {2, 3, 5, 7, 16, 33}) {
      const auto basis = wavelet::build_basis(wavelet::build_partition(n));
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
      for (int c = 1; c < n; ++c)
        CHECK(std::abs(basis.matrix.col(c).dot(ones)) <= 1e-12);
    }
  }

  TEST_CASE("constant histogram has a single nonzero coefficient") {
    const auto basis = wavelet::build_basis(wavelet::build_partition(5));
    Eigen::VectorXd h = Eigen::VectorXd::Constant(5, 7.5);
    const auto w = wavelet::forward(h, basis);
    CHECK(w(0) == doctest::Approx(7.5));
    for (int i = 1; i < 5; ++i) CHECK(std::abs(w(i)) <= 1e-12);
    const auto back = wavelet::inverse(w, basis);
    CHECK((back - h).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("forward equals the explicit (1/n) B^T h product") {
    const auto basis = wavelet::build_basis(wavelet::build_partition(5));
    Eigen::VectorXd h(5);
    h << 1, 3, 2, 2, 2;
    const auto w = wavelet::forward(h, basis);
    // Plain-loop oracle.
    for (int c = 0; c < 5; ++c) {
      double acc = 0.0;
      for (int r = 0; r < 5; ++r) acc += basis.matrix(r, c) * h(r);
      CHECK(w(c) == doctest::Approx(acc / 5.0).epsilon(1e-12));
    }
    CHECK(w(0) == doctest::Approx(2.0));  // mean of the bins
  }

  TEST_CASE("round-trips within 1e-9") {
    std::mt19937 rng(11);
    for (int n : {1, 2, 3, 5, 8, 13}) {
      const auto basis = wavelet::build_basis(wavelet::build_partition(n));
      for (int rep = 0; rep < 100; ++rep) {
        const Eigen::VectorXd h = random_vector(n, rng);
        CHECK((wavelet::inverse(wavelet::forward(h, basis), basis) - h).cwiseAbs().maxCoeff() <=
              1e-9);
        const Eigen::VectorXd w = random_vector(n, rng);
        CHECK((wavelet::forward(wavelet::inverse(w, basis), basis) - w).cwiseAbs().maxCoeff() <=
              1e-9);
      }
    }
  }

  TEST_CASE("corner histogram round-trip") {
    const auto basis = wavelet::build_basis(wavelet::build_partition(5));
    Eigen::VectorXd h(5);
    h << 3000, 0, 0, 0, 0;
    const auto back = wavelet::inverse(wavelet::forward(h, basis), basis);
    CHECK((back - h).cwiseAbs().maxCoeff() <= 1e-9);
  }

  TEST_CASE("perturbing the last bin touches only covering intervals") {
    const auto basis = wavelet::build_basis(wavelet::build_partition(5));
    Eigen::VectorXd h(5);
    h << 10, 20, 30, 40, 50;
    Eigen::VectorXd h2 = h;
    h2(4) += 17;
    const auto w = wavelet::forward(h, basis);
    const auto w2 = wavelet::forward(h2, basis);
    // Detail order is root, {1,2,3} split, {1,2} split, {4,5} split: bin 5
    // lies under the average, the root split, and the {4,5} split only.
    CHECK(std::abs(w2(0) - w(0)) > 1e-9);
    CHECK(std::abs(w2(1) - w(1)) > 1e-9);
    CHECK(std::abs(w2(2) - w(2)) <= 1e-12);
    CHECK(std::abs(w2(3) - w(3)) <= 1e-12);
    CHECK(std::abs(w2(4) - w(4)) > 1e-9);
  }

  TEST_CASE("energy is preserved up to the n factor") {
    std::mt19937 rng(13);
    const auto basis = wavelet::build_basis(wavelet::build_partition(5));
    for (int rep = 0; rep < 50; ++rep) {
      const Eigen::VectorXd h = random_vector(5, rng);
      const auto w = wavelet::forward(h, basis);
      CHECK(h.squaredNorm() == doctest::Approx(5.0 * w.squaredNorm()).epsilon(1e-9));
    }
  }

  TEST_CASE("dimension mismatches rejected") {
    const auto basis = wavelet::build_basis(wavelet::build_partition(5));
    CHECK_THROWS_AS(wavelet::forward(Eigen::VectorXd::Ones(4), basis), std::invalid_argument);
    CHECK_THROWS_AS(wavelet::inverse(Eigen::VectorXd::Ones(6), basis), std::invalid_argument);
  }
}
