#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "acoustic/evaluate.hpp"

using namespace acoustic;

TEST_SUITE("evaluate") {
  TEST_CASE("aggregate_or basics") {
    CHECK(eval::aggregate_or({{0}, {0}, {1}, {0}}) == std::vector<int>{1});
    CHECK(eval::aggregate_or({{0, 0}, {0, 0}}) == std::vector<int>{0, 0});
    CHECK_THROWS_AS(eval::aggregate_or({{0, 1}, {0}}), std::invalid_argument);
    CHECK_THROWS_AS(eval::aggregate_or({}), std::invalid_argument);
  }

  TEST_CASE("aggregate_or equals a column-wise any() oracle and is monotone") {
    std::mt19937 rng(3);
    std::bernoulli_distribution coin(0.3);
    std::vector<std::vector<int>> flags(5, std::vector<int>(40));
    for (auto& row : flags)
      for (auto& v : row) v = coin(rng) ? 1 : 0;
    const auto poi = eval::aggregate_or(flags);
    for (std::size_t i = 0; i < poi.size(); ++i) {
      int any = 0;
      for (const auto& row : flags) any |= row[i];
      CHECK(poi[i] == any);
    }

    // Adding a node can only raise flags.
    auto more = flags;
    more.push_back(std::vector<int>(40, 1));
    const auto poi_more = eval::aggregate_or(more);
    for (std::size_t i = 0; i < poi.size(); ++i) CHECK(poi_more[i] >= poi[i]);
  }

  TEST_CASE("confusion on perfect and inverted predictions") {
    const std::vector<int> truth{0, 1, 0, 1, 0, 1, 0, 1};
    const auto perfect = eval::confusion(truth, truth);
    CHECK(perfect.true_detected_pct == doctest::Approx(100.0));
    CHECK(perfect.false_positive_pct == doctest::Approx(0.0));
    CHECK(perfect.false_negative_pct == doctest::Approx(0.0));

    std::vector<int> inverted(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) inverted[i] = 1 - truth[i];
    const auto flipped = eval::confusion(inverted, truth);
    CHECK(flipped.true_detected_pct == doctest::Approx(0.0));
    CHECK(flipped.false_positive_pct == doctest::Approx(50.0));
    CHECK(flipped.false_negative_pct == doctest::Approx(50.0));
  }

  TEST_CASE("confusion matches a hand-count oracle and partitions to 100%") {
    std::mt19937 rng(11);
    std::bernoulli_distribution coin(0.4);
    std::vector<int> predicted(257), truth(257);
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      predicted[i] = coin(rng) ? 1 : 0;
      truth[i] = coin(rng) ? 1 : 0;
    }
    std::size_t fp = 0, fn = 0, agree = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      if (predicted[i] == truth[i])
        ++agree;
      else if (predicted[i])
        ++fp;
      else
        ++fn;
    }
    const auto stats = eval::confusion(predicted, truth);
    CHECK(stats.true_detected_pct == doctest::Approx(100.0 * agree / 257.0));
    CHECK(stats.false_positive_pct == doctest::Approx(100.0 * fp / 257.0));
    CHECK(stats.false_negative_pct == doctest::Approx(100.0 * fn / 257.0));
    CHECK(stats.true_detected_pct + stats.false_positive_pct + stats.false_negative_pct ==
          doctest::Approx(100.0).epsilon(0.001));

    // Joint shuffles leave the statistics unchanged.
    std::vector<std::size_t> perm(predicted.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> p2(predicted.size()), t2(predicted.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      p2[i] = predicted[perm[i]];
      t2[i] = truth[perm[i]];
    }
    const auto shuffled = eval::confusion(p2, t2);
    CHECK(shuffled.true_detected_pct == stats.true_detected_pct);
    CHECK(shuffled.false_positive_pct == stats.false_positive_pct);
    CHECK(shuffled.false_negative_pct == stats.false_negative_pct);
  }

  TEST_CASE("mismatched lengths rejected") {
    CHECK_THROWS_AS(eval::confusion(std::vector<int>{1}, std::vector<int>{1, 0}),
                    std::invalid_argument);
  }

  TEST_CASE("variant names round-trip") {
    for (eval::Variant v : eval::kAllVariants)
      CHECK(eval::variant_from_string(eval::to_string(v)) == v);
    CHECK_FALSE(eval::variant_from_string("raw+XXX").has_value());
  }
}
