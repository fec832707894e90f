#include <doctest.h>

#include <cmath>
#include <numeric>

#include "delaytree/cart.hpp"
#include "delaytree/error.hpp"
#include "delaytree/synth.hpp"
#include "test_support.hpp"

using namespace delaytree;
using delaytree::testing::planted;
using delaytree::testing::random_training_set;

namespace {

ClassDistribution dist(std::vector<std::size_t> c) { return ClassDistribution::from_counts(std::move(c)); }

FeatureSchema one_binary() { return FeatureSchema({{"weekend", FeatureKind::categorical, {"0", "1"}}}); }

// n rows with a binary feature; the left side (weekend=0) holds la "A" and lb "B".
TrainingSet binary_set(std::size_t a, std::size_t b, std::size_t la, std::size_t lb) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  auto add = [&](double x, const char* y, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
      rows.push_back({x});
      labels.emplace_back(y);
    }
  };
  add(0, "A", la);
  add(0, "B", lb);
  add(1, "A", a - la);
  add(1, "B", b - lb);
  return TrainingSet::build(one_binary(), std::move(rows), labels);
}

}  // namespace

TEST_CASE("gini examples and bounds") {
  CHECK(gini(dist({10})) == 0.0);
  CHECK(gini(dist({0, 7, 0})) == 0.0);
  CHECK(gini(dist({4, 4, 4})) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(gini(dist({5, 5})) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(gini(dist({0, 0})), DomainError);

  Rng rng(11);
  for (int t = 0; t < 2000; ++t) {
    std::vector<std::size_t> c(1 + rng.below(27));
    for (auto& v : c) v = rng.below(30);
    c[rng.below(c.size())] += 1;
    const auto d = dist(c);
    const double g = gini(d);
    CHECK(g >= 0.0);
    CHECK(g <= 1.0 - 1.0 / static_cast<double>(c.size()) + 1e-12);
  }
  for (std::size_t c = 2; c <= 27; ++c) {
    CHECK(gini(dist(std::vector<std::size_t>(c, 3))) ==
          doctest::Approx(1.0 - 1.0 / static_cast<double>(c)).epsilon(1e-12));
  }
}

TEST_CASE("information gain examples") {
  CHECK(information_gain(dist({5, 5}), dist({5, 0}), dist({0, 5})) == doctest::Approx(0.5));
  CHECK(information_gain(dist({4, 4}), dist({2, 2}), dist({2, 2})) == doctest::Approx(0.0));
  // 0.5 - (2/4)(0) - (2/4)(0.25)
  CHECK(information_gain(dist({2, 2}), dist({2, 0}), dist({0, 2})) == doctest::Approx(0.5));
  CHECK(information_gain(dist({3, 1}), dist({2, 0}), dist({1, 1})) == doctest::Approx(0.375 - 0.25));
  CHECK_THROWS_AS(information_gain(dist({3, 1}), dist({2, 0}), dist({0, 1})), DomainError);
}

TEST_CASE("information gain is never negative") {
  Rng rng(3);
  for (int t = 0; t < 10000; ++t) {
    const std::size_t c = 2 + rng.below(4);
    std::vector<std::size_t> l(c), r(c), p(c);
    for (std::size_t i = 0; i < c; ++i) {
      l[i] = rng.below(20);
      r[i] = rng.below(20);
      p[i] = l[i] + r[i];
    }
    l[0] += 1;
    r[0] += 1;
    p[0] += 2;
    CHECK(information_gain(dist(p), dist(l), dist(r)) >= -1e-15);
  }
}

TEST_CASE("enumerate_splits") {
  SUBCASE("continuous midpoints of distinct values") {
    FeatureSchema s({{"t", FeatureKind::continuous, {}}});
    std::vector<std::string> y{"a", "a", "b", "b"};
    auto set = TrainingSet::build(s, {{60}, {64}, {64}, {70}}, y);
    auto c = enumerate_splits(set, set.all_rows(), 0);
    REQUIRE(c.size() == 2);
    CHECK(c[0].rule.threshold == 62.0);
    CHECK(c[1].rule.threshold == 67.0);
    CHECK(c[0].left.total == 1);
  }
  SUBCASE("categorical subsets exclude the highest present level") {
    FeatureSchema s({{"c", FeatureKind::categorical, {"x", "y", "z"}}});
    std::vector<std::string> y{"a", "b", "a"};
    auto set = TrainingSet::build(s, {{0}, {1}, {2}}, y);
    auto c = enumerate_splits(set, set.all_rows(), 0);
    REQUIRE(c.size() == 3);
    CHECK(c[0].rule.left_levels == std::vector<std::size_t>{0});
    CHECK(c[1].rule.left_levels == std::vector<std::size_t>{0, 1});
    CHECK(c[2].rule.left_levels == std::vector<std::size_t>{1});
    for (const auto& cand : c) {
      CHECK(cand.rule.right_levels.back() == 2);
      CHECK(cand.left.total + cand.right.total == 3);
    }
  }
  SUBCASE("a constant feature yields nothing") {
    FeatureSchema s({{"t", FeatureKind::continuous, {}}, {"c", FeatureKind::categorical, {"x", "y"}}});
    std::vector<std::string> y{"a", "b", "a"};
    auto set = TrainingSet::build(s, {{5, 1}, {5, 1}, {5, 1}}, y);
    CHECK(enumerate_splits(set, set.all_rows(), 0).empty());
    CHECK(enumerate_splits(set, set.all_rows(), 1).empty());
    CHECK_FALSE(best_split(set, set.all_rows()).has_value());
  }
  SUBCASE("adjacent doubles keep the threshold between them") {
    FeatureSchema s({{"t", FeatureKind::continuous, {}}});
    const double lo = 1.0;
    const double hi = std::nextafter(lo, 2.0);
    std::vector<std::string> y{"a", "b"};
    auto set = TrainingSet::build(s, {{lo}, {hi}}, y);
    auto c = enumerate_splits(set, set.all_rows(), 0);
    REQUIRE(c.size() == 1);
    CHECK(c[0].left.total == 1);
    CHECK(c[0].right.total == 1);
  }
}

TEST_CASE("best_split picks the separating feature") {
  FeatureSchema s({{"noise", FeatureKind::continuous, {}}, {"weekend", FeatureKind::categorical, {"0", "1"}}});
  std::vector<std::vector<double>> rows;
  std::vector<std::string> y;
  for (int i = 0; i < 40; ++i) {
    rows.push_back({static_cast<double>(i % 3), static_cast<double>(i % 2)});
    y.push_back(i % 2 ? "busy" : "calm");
  }
  auto set = TrainingSet::build(s, rows, y);
  auto best = best_split(set, set.all_rows());
  REQUIRE(best);
  CHECK(best->rule.feature == 1);
  CHECK(best->gain == doctest::Approx(0.5));
}

TEST_CASE("exact ties resolve to the lower feature index, then the first rule") {
  FeatureSchema s({{"a", FeatureKind::categorical, {"0", "1"}}, {"b", FeatureKind::categorical, {"0", "1"}}});
  auto set = TrainingSet::build(s, {{0, 0}, {1, 1}}, std::vector<std::string>{"x", "y"});
  auto best = best_split(set, set.all_rows());
  REQUIRE(best);
  CHECK(best->rule.feature == 0);

  FeatureSchema t({{"t", FeatureKind::continuous, {}}});
  // thresholds 1.5 and 3.5 give equal gains
  auto set2 = TrainingSet::build(t, {{1}, {2}, {3}, {4}}, std::vector<std::string>{"x", "y", "y", "x"});
  auto c = enumerate_splits(set2, set2.all_rows(), 0);
  REQUIRE(c.size() == 3);
  CHECK(compare_gain(c[0], c[2]) == std::strong_ordering::equal);
  auto best2 = best_split(set2, set2.all_rows());
  REQUIRE(best2);
  CHECK(best2->rule.threshold == 1.5);
}

TEST_CASE("best_split agrees with the brute-force search") {
  Rng rng(7);
  for (int t = 0; t < 200; ++t) {
    auto set = random_training_set(rng, 50, 3);
    auto members = set.all_rows();
    auto fast = best_split(set, members);
    auto slow = brute_force_best_split(set, members);
    REQUIRE(fast.has_value() == slow.has_value());
    if (!fast) continue;
    CHECK(fast->rule == slow->rule);
    CHECK(std::abs(fast->gain - slow->gain) <= 1e-12);
  }
}

TEST_CASE("stopping rules") {
  TrainConfig cfg;
  SUBCASE("fewer than min_samples rows stay a leaf") {
    auto set = binary_set(50, 49, 50, 0);
    auto tree = grow_tree(set, cfg);
    CHECK(tree.nodes.size() == 1);
    CHECK(tree.predict(std::vector<double>{1}) == "A");
  }
  SUBCASE("gain 0.004 stays a leaf") {
    // left 30/20 of 50, right 120/130 of 250: gain is exactly 1/250
    auto set = binary_set(150, 150, 30, 20);
    auto d = set.distribution(set.all_rows());
    auto best = best_split(set, set.all_rows());
    REQUIRE(best);
    CHECK(best->gain == doctest::Approx(0.004).epsilon(1e-12));
    CHECK(grow_tree(set, cfg).nodes.size() == 1);
    CHECK(d.total == 300);
  }
  SUBCASE("gain 0.006 splits") {
    // left 60/240 of 300, right 70/930 of 1000: gain is exactly 3/500
    auto set = binary_set(130, 1170, 60, 240);
    auto best = best_split(set, set.all_rows());
    REQUIRE(best);
    CHECK(best->gain == doctest::Approx(0.006).epsilon(1e-12));
    auto tree = grow_tree(set, cfg);
    CHECK(tree.nodes.size() == 3);
    CHECK(internal_features(tree) == std::vector<std::string>{"weekend"});
  }
  SUBCASE("max_depth caps growth") {
    auto set = binary_set(100, 100, 100, 0);
    cfg.max_depth = 0;
    CHECK(grow_tree(set, cfg).nodes.size() == 1);
  }
  SUBCASE("pure nodes stop") {
    auto set = binary_set(300, 0, 100, 0);
    CHECK(grow_tree(set, cfg).nodes.size() == 1);
  }
  const TrainConfig zero_min{0, 0.005, {}};
  const TrainConfig negative_gain{10, -1, {}};
  CHECK_THROWS_AS(zero_min.validate(), UsageError);
  CHECK_THROWS_AS(negative_gain.validate(), UsageError);
}

TEST_CASE("majority ties go to the lexicographically smallest label") {
  auto set = binary_set(5, 5, 3, 2);
  auto tree = grow_tree(set, TrainConfig{});
  CHECK(tree.classes.front() == "A");
  CHECK(tree.predict(std::vector<double>{0}) == "A");
}

TEST_CASE("planted weekend rule is recovered from synthetic hours") {
  const Stream s{Vehicle::passenger, Direction::to_us};
  SynthConfig cfg;
  cfg.first_day = {2016, 1, 1};
  cfg.last_day = {2016, 12, 31};
  cfg.streams = {s};
  cfg.flip_probability = 0.05;
  cfg.jitter_sd = 1.0;
  cfg.rules.push_back(planted(s, "weekend=1", "delay-delay-delay", {12, 12, 12}));
  auto ds = testing::synth_dataset(cfg, s);
  REQUIRE(ds.rows.size() >= 5000);
  ds.rows.resize(5000);
  auto set = to_training_set(ds);
  auto tree = grow_tree(set, TrainConfig{});
  REQUIRE(!tree.root().is_leaf());
  CHECK(tree.schema[tree.root().split->rule.feature].name == "weekend");
  CHECK(internal_features(tree) == std::vector<std::string>{"weekend"});
  std::size_t hits = 0;
  for (std::size_t i = 0; i < set.size(); ++i) hits += tree.predict(set.rows[i]) == set.classes[set.labels[i]];
  CHECK(static_cast<double>(hits) / static_cast<double>(set.size()) >= 0.90);
}

TEST_CASE("unseen categorical levels follow the heavier child") {
  FeatureSchema s({{"c", FeatureKind::categorical, {"x", "y", "z"}}});
  std::vector<std::vector<double>> rows;
  std::vector<std::string> y;
  for (int i = 0; i < 30; ++i) {
    rows.push_back({0});
    y.emplace_back("p");
  }
  for (int i = 0; i < 10; ++i) {
    rows.push_back({2});
    y.emplace_back("q");
  }
  auto tree = grow_tree(TrainingSet::build(s, rows, y), TrainConfig{1, 0.0, {}});
  REQUIRE(tree.nodes.size() == 3);
  CHECK_FALSE(tree.root().split->rule.goes_left(1).has_value());
  CHECK(tree.predict(std::vector<double>{1}) == "p");
  CHECK(tree.predict(std::vector<double>{2}) == "q");
}

TEST_CASE("grown trees satisfy node invariants and are deterministic") {
  Rng rng(19);
  for (int t = 0; t < 100; ++t) {
    auto set = random_training_set(rng, 200, 4);
    TrainConfig cfg{1 + rng.below(20), 0.0, {}};
    auto tree = grow_tree(set, cfg);
    auto again = grow_tree(set, cfg);
    REQUIRE(tree.nodes.size() == again.nodes.size());
    CHECK_NOTHROW(tree.validate());
    auto members = node_members(tree, set);
    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
      const auto& n = tree.nodes[id];
      CHECK(n.distribution == set.distribution(members[id]));
      CHECK(n.distribution == again.nodes[id].distribution);
      if (n.is_leaf()) continue;
      CHECK(n.distribution.total >= cfg.min_samples);
      CHECK(n.split->rule == again.nodes[id].split->rule);
      const auto& l = tree.nodes[n.split->left].distribution;
      const auto& r = tree.nodes[n.split->right].distribution;
      for (std::size_t c = 0; c < tree.classes.size(); ++c) CHECK(l.counts[c] + r.counts[c] == n.distribution.counts[c]);
    }
    std::size_t leaf_rows = 0;
    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
      if (tree.nodes[id].is_leaf()) leaf_rows += members[id].size();
    }
    CHECK(leaf_rows == set.size());
  }
}

TEST_CASE("internal_features lists split features in first-use order") {
  FeatureSchema s({{"a", FeatureKind::continuous, {}}, {"b", FeatureKind::categorical, {"0", "1"}}});
  std::vector<std::vector<double>> rows;
  std::vector<std::string> y;
  for (int i = 0; i < 400; ++i) {
    double a = i % 4;
    double b = (i / 4) % 2;
    rows.push_back({a, b});
    y.push_back(a >= 2 ? "hi" : (b == 1 ? "mid" : "lo"));
  }
  auto tree = grow_tree(TrainingSet::build(s, rows, y), TrainConfig{});
  CHECK(internal_features(tree) == std::vector<std::string>{"a", "b"});
  CHECK(tree.leaf_count() == 3);
}
