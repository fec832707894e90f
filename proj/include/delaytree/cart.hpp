#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "delaytree/features.hpp"

namespace delaytree {

// Per-class sample counts at a tree node. Class ids index
// TrainingSet::classes / DecisionTree::classes.
struct ClassDistribution {
  std::vector<std::size_t> counts;
  std::size_t total = 0;

  ClassDistribution() = default;
  explicit ClassDistribution(std::size_t num_classes) : counts(num_classes, 0) {}
  static ClassDistribution from_counts(std::vector<std::size_t> counts);

  void add(std::size_t cls, std::size_t n = 1) {
    counts[cls] += n;
    total += n;
  }
  double proportion(std::size_t cls) const;
  // Most frequent class; the lowest id wins ties.
  std::size_t majority() const;
  bool pure() const;
  std::size_t num_classes_present() const;

  friend bool operator==(const ClassDistribution&, const ClassDistribution&) = default;
};

// 1 - sum_i p(i|t)^2. Throws DomainError on an empty distribution.
double gini(const ClassDistribution& d);

// Parent impurity minus the size-weighted impurities of the two children.
// Throws DomainError unless left + right equals parent class by class.
double information_gain(const ClassDistribution& parent, const ClassDistribution& left,
                        const ClassDistribution& right);

struct SplitRule {
  enum class Kind { threshold, subset };

  std::size_t feature = 0;
  Kind kind = Kind::threshold;
  // threshold: x <= threshold goes left.
  double threshold = 0.0;
  // subset: levels in left_levels go left, levels in right_levels go right.
  // Both sorted ascending. Levels in neither were not seen at the node during
  // training.
  std::vector<std::size_t> left_levels;
  std::vector<std::size_t> right_levels;

  // nullopt for a categorical level seen on neither side.
  std::optional<bool> goes_left(double value) const;

  friend bool operator==(const SplitRule&, const SplitRule&) = default;
};

// Canonical order of rules on one feature: ascending threshold, or
// lexicographically smaller left level list.
bool rule_precedes(const SplitRule& a, const SplitRule& b);

struct SplitCandidate {
  SplitRule rule;
  double gain = 0.0;
  ClassDistribution left;
  ClassDistribution right;
};

// Exact comparison of two candidates' gains at the same parent, done in
// integer arithmetic so ties are real ties.
std::strong_ordering compare_gain(const SplitCandidate& a, const SplitCandidate& b);

// True when `a` is strictly preferred: higher gain, then lower feature index,
// then rule_precedes.
bool preferred(const SplitCandidate& a, const SplitCandidate& b);

// True iff the candidate's gain over `parent` is strictly positive (exact).
bool has_positive_gain(const SplitCandidate& c);

struct TrainConfig {
  std::size_t min_samples = 100;
  double min_gain = 0.005;
  std::optional<std::size_t> max_depth;

  // Throws UsageError on min_samples < 1 or negative/non-finite min_gain.
  void validate() const;
};

struct TrainingSet {
  FeatureSchema schema;
  std::vector<std::string> classes;       // sorted, unique
  std::vector<std::vector<double>> rows;  // one encoded value per schema feature
  std::vector<std::size_t> labels;        // index into classes

  std::size_t size() const noexcept { return rows.size(); }

  // Builds class ids from label text; classes end up in lexicographic order.
  static TrainingSet build(FeatureSchema schema, std::vector<std::vector<double>> rows,
                           std::span<const std::string> labels);

  // Throws DataError on width mismatch, non-finite values or categorical
  // values that are not a declared level index.
  void validate() const;

  std::vector<std::size_t> all_rows() const;
  ClassDistribution distribution(std::span<const std::size_t> members) const;
};

// All binary candidates on `feature` for the rows in `members`, in canonical
// rule order. Continuous: one threshold per midpoint of adjacent distinct
// values. Categorical with k levels present: the 2^(k-1) - 1 left sets that
// exclude the highest present level.
std::vector<SplitCandidate> enumerate_splits(const TrainingSet& set, std::span<const std::size_t> members,
                                             std::size_t feature);

// Highest-gain candidate over every feature, or nullopt when no candidate
// has positive gain.
std::optional<SplitCandidate> best_split(const TrainingSet& set, std::span<const std::size_t> members);

struct TreeNode {
  struct Split {
    SplitRule rule;
    double gain = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
  };

  ClassDistribution distribution;
  std::size_t label = 0;  // majority class
  std::size_t depth = 0;
  std::optional<Split> split;

  bool is_leaf() const noexcept { return !split.has_value(); }
};

struct DecisionTree {
  FeatureSchema schema;
  std::vector<std::string> classes;
  std::vector<TreeNode> nodes;  // breadth-first; nodes[0] is the root
  std::map<std::string, std::string> metadata;

  const TreeNode& root() const { return nodes.at(0); }

  // Unseen categorical levels follow the child that held more training rows,
  // the left one on a tie.
  std::size_t leaf_index(std::span<const double> x) const;
  const std::string& predict(std::span<const double> x) const;

  std::size_t leaf_count() const;

  // Structural checks: child links, BFS ordering, distributions summing,
  // labels in range. Throws DataError.
  void validate() const;
};

// Top-down induction. A node becomes a leaf when it holds fewer than
// min_samples rows, is pure, sits at max_depth, or its best gain is below
// min_gain. Throws DomainError on an empty set.
DecisionTree grow_tree(const TrainingSet& set, const TrainConfig& config);

// Distinct features used at split nodes, in breadth-first first-use order.
std::vector<std::string> internal_features(const DecisionTree& tree);

// Rows of `set` reaching each node when routed through the tree.
std::vector<std::vector<std::size_t>> node_members(const DecisionTree& tree, const TrainingSet& set);

}  // namespace delaytree
