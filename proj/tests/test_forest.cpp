#include "elyte/forest.hpp"

#include <doctest.h>

#include "oracles.hpp"
#include "support.hpp"

#include <algorithm>

using namespace elyte;

namespace {

struct Toy {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  DesignMatrix matrix() const { return DesignMatrix::from_rows(x, y); }
};

Toy random_toy(std::size_t n, std::size_t p, std::uint64_t seed, bool ties = false) {
  Rng rng(seed);
  Toy t;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(p);
    for (auto& v : row) v = ties ? static_cast<double>(rng.below(4)) : rng.uniform();
    t.y.push_back(3.0 * row[0] - 2.0 * row[p - 1] + rng.normal());
    t.x.push_back(std::move(row));
  }
  return t;
}

ForestParams single(std::optional<int> depth = std::nullopt) {
  ForestParams p;
  p.n_trees = 1;
  p.bootstrap = false;
  p.max_depth = depth;
  return p;
}

}  // namespace

TEST_SUITE("forest") {
  TEST_CASE("constant target gives a single leaf") {
    const Toy t{{{1, 5}, {2, 3}, {3, 1}, {4, 0}}, {7, 7, 7, 7}};
    Rng rng(1);
    const auto tree = fit_tree(t.matrix(), single(), rng);
    CHECK(tree.nodes().size() == 1);
    CHECK(tree.predict(std::vector<double>{100, -5}) == 7.0);
  }

  TEST_CASE("one-dimensional step is split between its two sides") {
    const Toy t{{{0}, {1}, {2}, {3}}, {0, 0, 10, 10}};
    Rng rng(1);
    const auto tree = fit_tree(t.matrix(), single(1), rng);
    REQUIRE(tree.nodes().size() == 3);
    const auto& root = tree.nodes()[0];
    CHECK(root.feature == 0);
    CHECK(root.threshold > 1.0);
    CHECK(root.threshold <= 2.0);
    CHECK(tree.predict(std::vector<double>{0.5}) == 0.0);
    CHECK(tree.predict(std::vector<double>{2.5}) == 10.0);
  }

  TEST_CASE("unlimited depth with leaf size one fits distinct rows exactly") {
    const auto t = random_toy(60, 3, 11);
    Rng rng(1);
    const auto tree = fit_tree(t.matrix(), single(), rng);
    for (std::size_t i = 0; i < t.y.size(); ++i) CHECK(tree.predict(t.x[i]) == doctest::Approx(t.y[i]).epsilon(1e-12));
  }

  TEST_CASE("root split attains the exhaustive minimum") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      const auto t = random_toy(8 + seed % 13, 1 + seed % 4, seed, seed % 2 == 0);
      Rng rng(seed);
      const auto tree = fit_tree(t.matrix(), single(1), rng);
      const double best = oracle::best_split_sse(t.x, t.y);
      if (tree.nodes().size() == 1) {
        CHECK(best == std::numeric_limits<double>::infinity());
        continue;
      }
      const auto& root = tree.nodes()[0];
      CHECK(oracle::partition_sse(t.x, t.y, root.feature, root.threshold) == doctest::Approx(best).epsilon(1e-9));
    }
  }

  TEST_CASE("min_samples_leaf and max_depth are honoured") {
    const auto t = random_toy(100, 2, 3);
    for (int leaf : {1, 5, 20}) {
      auto p = single();
      p.min_samples_leaf = leaf;
      Rng rng(1);
      const auto tree = fit_tree(t.matrix(), p, rng);
      for (const auto& node : tree.nodes()) {
        if (node.is_leaf()) CHECK(node.count >= static_cast<std::uint32_t>(leaf));
      }
    }
    for (int depth : {0, 1, 3}) {
      Rng rng(1);
      CHECK(fit_tree(t.matrix(), single(depth), rng).depth() <= depth);
    }
  }

  TEST_CASE("a one-tree forest without bootstrap is the plain tree") {
    const auto t = random_toy(40, 4, 5);
    auto p = single();
    p.max_features = MaxFeatures::third();
    p.seed = 9;
    const auto model = fit_forest(t.matrix(), p, 1);
    Rng rng(p.seed, 0);
    CHECK(model.trees.at(0) == fit_tree(t.matrix(), p, rng));
  }

  TEST_CASE("fixed seed is deterministic and independent of thread count") {
    const auto t = random_toy(80, 5, 8);
    ForestParams p;
    p.n_trees = 12;
    p.max_features = MaxFeatures::third();
    const auto a = fit_forest(t.matrix(), p, 1);
    const auto b = fit_forest(t.matrix(), p, 4);
    CHECK(a == b);
    p.seed = 43;
    CHECK_FALSE(fit_forest(t.matrix(), p, 1) == a);
  }

  TEST_CASE("predictions stay within the training target range") {
    const auto t = random_toy(70, 3, 21);
    ForestParams p;
    p.n_trees = 20;
    const auto model = fit_forest(t.matrix(), p, 2);
    const auto [lo, hi] = std::minmax_element(t.y.begin(), t.y.end());
    CHECK(model.target_lo == *lo);
    CHECK(model.target_hi == *hi);
    Rng rng(77);
    for (int i = 0; i < 200; ++i) {
      const std::vector<double> x{10 * rng.normal(), 10 * rng.normal(), 10 * rng.normal()};
      const double v = predict(model, x);
      CHECK(v >= *lo);
      CHECK(v <= *hi);
    }
  }

  TEST_CASE("ensemble prediction is the mean of the trees") {
    ForestModel m;
    m.trees = {RegressionTree({TreeNode{-1, 0, -1, -1, 2.0, 1}}), RegressionTree({TreeNode{-1, 0, -1, -1, 4.0, 1}})};
    CHECK(predict(m, std::vector<double>{0.0}) == 3.0);
    m.feature_names = {"a", "b"};
    CHECK_THROWS_CODE(predict(m, std::vector<double>{0.0}), ErrorCode::DimensionMismatch);
  }

  TEST_CASE("bad inputs") {
    CHECK_THROWS_CODE(DesignMatrix::from_rows({{1, 2}, {3}}, std::vector<double>{1, 2}), ErrorCode::DimensionMismatch);
    CHECK_THROWS_CODE(DesignMatrix::from_rows({{1}}, std::vector<double>{1, 2}), ErrorCode::DimensionMismatch);
    CHECK_THROWS_CODE(fit_forest(DesignMatrix{}, ForestParams{}), ErrorCode::EmptyDataset);
    ForestParams bad;
    bad.n_trees = 0;
    CHECK_THROWS_CODE(bad.validate(), ErrorCode::InvalidConfig);
    CHECK_THROWS_CODE(MaxFeatures::parse("most"), ErrorCode::InvalidConfig);
  }

  TEST_CASE("max_features parsing and resolution") {
    CHECK(MaxFeatures::parse("all").resolve(10) == 10);
    CHECK(MaxFeatures::parse("third").resolve(10) == 4);
    CHECK(MaxFeatures::parse("0.5").resolve(10) == 5);
    CHECK(MaxFeatures::parse("3").resolve(10) == 3);
    CHECK(MaxFeatures::count(50).resolve(10) == 10);
    CHECK(MaxFeatures::parse(MaxFeatures::third().label()) == MaxFeatures::third());
  }

  TEST_CASE("rng streams") {
    Rng a(5, 1), b(5, 1), c(5, 2);
    const auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
    Rng r(3);
    for (int i = 0; i < 1000; ++i) {
      CHECK(r.below(7) < 7);
      const double u = r.uniform();
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
    }
  }
}
