#include "delaytree/cart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>

#include "delaytree/error.hpp"

namespace delaytree {

namespace {

__extension__ typedef unsigned __int128 u128;

// Exact scores are computed in 128-bit integers; this bound keeps every
// intermediate product far below 2^128.
constexpr std::size_t kMaxRows = std::size_t{1} << 24;

// Categorical subsets are enumerated exhaustively.
constexpr std::size_t kMaxPresentLevels = 20;

u128 sum_of_squares(const ClassDistribution& d) {
  u128 s = 0;
  for (std::size_t c : d.counts) s += u128(c) * c;
  return s;
}

// Weighted child purity S_l/N_l + S_r/N_r as a fraction. Larger purity means
// larger gain at a fixed parent.
struct Purity {
  u128 num;
  u128 den;
};

Purity purity(const SplitCandidate& c) {
  u128 nl = c.left.total;
  u128 nr = c.right.total;
  return {sum_of_squares(c.left) * nr + sum_of_squares(c.right) * nl, nl * nr};
}

ClassDistribution merged(const ClassDistribution& a, const ClassDistribution& b) {
  ClassDistribution out(a.counts.size());
  for (std::size_t i = 0; i < a.counts.size(); ++i) out.add(i, a.counts[i] + b.counts[i]);
  return out;
}

std::vector<SplitCandidate> continuous_splits(const TrainingSet& set, std::span<const std::size_t> members,
                                              std::size_t feature) {
  std::vector<std::size_t> order(members.begin(), members.end());
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return set.rows[a][feature] < set.rows[b][feature]; });
  const ClassDistribution parent = set.distribution(members);
  ClassDistribution left(set.classes.size());
  std::vector<SplitCandidate> out;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    left.add(set.labels[order[i]]);
    double lo = set.rows[order[i]][feature];
    double hi = set.rows[order[i + 1]][feature];
    if (lo == hi) continue;
    double mid = std::midpoint(lo, hi);
    if (!(mid < hi)) mid = lo;
    SplitCandidate c;
    c.rule.feature = feature;
    c.rule.kind = SplitRule::Kind::threshold;
    c.rule.threshold = mid;
    c.left = left;
    c.right = ClassDistribution(set.classes.size());
    for (std::size_t k = 0; k < parent.counts.size(); ++k) c.right.add(k, parent.counts[k] - left.counts[k]);
    c.gain = information_gain(parent, c.left, c.right);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<SplitCandidate> categorical_splits(const TrainingSet& set, std::span<const std::size_t> members,
                                               std::size_t feature) {
  const std::size_t num_levels = set.schema[feature].levels.size();
  std::vector<ClassDistribution> per_level(num_levels, ClassDistribution(set.classes.size()));
  for (std::size_t r : members) per_level[static_cast<std::size_t>(set.rows[r][feature])].add(set.labels[r]);

  std::vector<std::size_t> present;
  for (std::size_t l = 0; l < num_levels; ++l) {
    if (per_level[l].total > 0) present.push_back(l);
  }
  std::vector<SplitCandidate> out;
  if (present.size() < 2) return out;
  if (present.size() > kMaxPresentLevels) {
    throw DomainError("feature '" + set.schema[feature].name + "' has too many levels for exhaustive subset search");
  }

  const ClassDistribution parent = set.distribution(members);
  // The highest present level always stays on the right, so each unordered
  // partition is produced once.
  const std::size_t free_levels = present.size() - 1;
  const std::size_t masks = std::size_t{1} << free_levels;
  out.reserve(masks - 1);
  for (std::size_t mask = 1; mask < masks; ++mask) {
    SplitCandidate c;
    c.rule.feature = feature;
    c.rule.kind = SplitRule::Kind::subset;
    c.left = ClassDistribution(set.classes.size());
    c.right = ClassDistribution(set.classes.size());
    for (std::size_t i = 0; i < present.size(); ++i) {
      bool left = i < free_levels && (mask >> i) & 1U;
      auto& side = left ? c.left : c.right;
      (left ? c.rule.left_levels : c.rule.right_levels).push_back(present[i]);
      for (std::size_t k = 0; k < side.counts.size(); ++k) side.add(k, per_level[present[i]].counts[k]);
    }
    c.gain = information_gain(parent, c.left, c.right);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(),
            [](const SplitCandidate& a, const SplitCandidate& b) { return rule_precedes(a.rule, b.rule); });
  return out;
}

}  // namespace

ClassDistribution ClassDistribution::from_counts(std::vector<std::size_t> counts) {
  ClassDistribution d;
  d.total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  d.counts = std::move(counts);
  return d;
}

double ClassDistribution::proportion(std::size_t cls) const {
  if (total == 0) return 0.0;
  return static_cast<double>(counts.at(cls)) / static_cast<double>(total);
}

std::size_t ClassDistribution::majority() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] > counts[best]) best = i;
  }
  return best;
}

bool ClassDistribution::pure() const { return num_classes_present() <= 1; }

std::size_t ClassDistribution::num_classes_present() const {
  return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));
}

double gini(const ClassDistribution& d) {
  if (d.total == 0) throw DomainError("gini impurity of an empty distribution");
  // Sum of squared counts over total squared; both stay exact in a double for
  // up to 2^26 rows, so the only rounding is the final division.
  std::uint64_t squares = 0;
  for (std::size_t c : d.counts) squares += static_cast<std::uint64_t>(c) * c;
  const auto total = static_cast<std::uint64_t>(d.total);
  return 1.0 - static_cast<double>(squares) / static_cast<double>(total * total);
}

double information_gain(const ClassDistribution& parent, const ClassDistribution& left,
                        const ClassDistribution& right) {
  if (left.counts.size() != parent.counts.size() || right.counts.size() != parent.counts.size() ||
      left.total + right.total != parent.total) {
    throw DomainError("split counts do not add up to the parent");
  }
  for (std::size_t i = 0; i < parent.counts.size(); ++i) {
    if (left.counts[i] + right.counts[i] != parent.counts[i]) {
      throw DomainError("split class counts do not add up to the parent");
    }
  }
  const double n = static_cast<double>(parent.total);
  double gain = gini(parent);
  if (left.total > 0) gain -= static_cast<double>(left.total) / n * gini(left);
  if (right.total > 0) gain -= static_cast<double>(right.total) / n * gini(right);
  return gain;
}

std::optional<bool> SplitRule::goes_left(double value) const {
  if (kind == Kind::threshold) return value <= threshold;
  auto level = static_cast<std::size_t>(value);
  if (std::binary_search(left_levels.begin(), left_levels.end(), level)) return true;
  if (std::binary_search(right_levels.begin(), right_levels.end(), level)) return false;
  return std::nullopt;
}

bool rule_precedes(const SplitRule& a, const SplitRule& b) {
  if (a.kind != b.kind) return a.kind == SplitRule::Kind::threshold;
  if (a.kind == SplitRule::Kind::threshold) return a.threshold < b.threshold;
  return std::lexicographical_compare(a.left_levels.begin(), a.left_levels.end(), b.left_levels.begin(),
                                      b.left_levels.end());
}

std::strong_ordering compare_gain(const SplitCandidate& a, const SplitCandidate& b) {
  Purity pa = purity(a);
  Purity pb = purity(b);
  u128 lhs = pa.num * pb.den;
  u128 rhs = pb.num * pa.den;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

bool preferred(const SplitCandidate& a, const SplitCandidate& b) {
  auto cmp = compare_gain(a, b);
  if (cmp != std::strong_ordering::equal) return cmp == std::strong_ordering::greater;
  if (a.rule.feature != b.rule.feature) return a.rule.feature < b.rule.feature;
  return rule_precedes(a.rule, b.rule);
}

bool has_positive_gain(const SplitCandidate& c) {
  ClassDistribution parent = merged(c.left, c.right);
  Purity p = purity(c);
  // purity > S_p / N_p
  return p.num * u128(parent.total) > sum_of_squares(parent) * p.den;
}

void TrainConfig::validate() const {
  if (min_samples < 1) throw UsageError("min_samples must be at least 1");
  if (!std::isfinite(min_gain) || min_gain < 0) throw UsageError("min_gain must be a non-negative number");
}

TrainingSet TrainingSet::build(FeatureSchema schema, std::vector<std::vector<double>> rows,
                               std::span<const std::string> labels) {
  if (rows.size() != labels.size()) throw DataError("row and label counts differ");
  TrainingSet set;
  set.schema = std::move(schema);
  set.rows = std::move(rows);
  set.classes.assign(labels.begin(), labels.end());
  std::sort(set.classes.begin(), set.classes.end());
  set.classes.erase(std::unique(set.classes.begin(), set.classes.end()), set.classes.end());
  set.labels.reserve(labels.size());
  for (const auto& l : labels) {
    auto it = std::lower_bound(set.classes.begin(), set.classes.end(), l);
    set.labels.push_back(static_cast<std::size_t>(it - set.classes.begin()));
  }
  set.validate();
  return set;
}

void TrainingSet::validate() const {
  if (labels.size() != rows.size()) throw DataError("row and label counts differ");
  if (rows.size() > kMaxRows) throw DataError("training set exceeds " + std::to_string(kMaxRows) + " rows");
  if (!std::is_sorted(classes.begin(), classes.end()) ||
      std::adjacent_find(classes.begin(), classes.end()) != classes.end()) {
    throw DataError("class list must be sorted and unique");
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != schema.size()) throw DataError("row " + std::to_string(r) + " has wrong width");
    if (labels[r] >= classes.size()) throw DataError("row " + std::to_string(r) + " has unknown class");
    for (std::size_t f = 0; f < schema.size(); ++f) {
      double v = rows[r][f];
      if (!std::isfinite(v)) throw DataError("row " + std::to_string(r) + " has non-finite " + schema[f].name);
      if (schema[f].kind == FeatureKind::categorical &&
          (v < 0 || v != std::floor(v) || v >= static_cast<double>(schema[f].levels.size()))) {
        throw DataError("row " + std::to_string(r) + " has invalid level for " + schema[f].name);
      }
    }
  }
}

std::vector<std::size_t> TrainingSet::all_rows() const {
  std::vector<std::size_t> out(rows.size());
  std::iota(out.begin(), out.end(), std::size_t{0});
  return out;
}

ClassDistribution TrainingSet::distribution(std::span<const std::size_t> members) const {
  ClassDistribution d(classes.size());
  for (std::size_t r : members) d.add(labels[r]);
  return d;
}

std::vector<SplitCandidate> enumerate_splits(const TrainingSet& set, std::span<const std::size_t> members,
                                             std::size_t feature) {
  if (feature >= set.schema.size()) throw UsageError("feature index out of range");
  if (set.schema[feature].kind == FeatureKind::continuous) return continuous_splits(set, members, feature);
  return categorical_splits(set, members, feature);
}

std::optional<SplitCandidate> best_split(const TrainingSet& set, std::span<const std::size_t> members) {
  std::optional<SplitCandidate> best;
  for (std::size_t f = 0; f < set.schema.size(); ++f) {
    for (auto& c : enumerate_splits(set, members, f)) {
      if (!best || preferred(c, *best)) best = std::move(c);
    }
  }
  if (best && !has_positive_gain(*best)) return std::nullopt;
  return best;
}

std::size_t DecisionTree::leaf_index(std::span<const double> x) const {
  if (x.size() != schema.size()) throw UsageError("feature vector width does not match the tree schema");
  std::size_t id = 0;
  while (const auto& split = nodes.at(id).split) {
    auto left = split->rule.goes_left(x[split->rule.feature]);
    if (!left) left = nodes.at(split->left).distribution.total >= nodes.at(split->right).distribution.total;
    id = *left ? split->left : split->right;
  }
  return id;
}

const std::string& DecisionTree::predict(std::span<const double> x) const {
  return classes.at(nodes.at(leaf_index(x)).label);
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

void DecisionTree::validate() const {
  if (nodes.empty()) throw DataError("tree has no nodes");
  std::size_t next_child = 1;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    const std::string where = "node " + std::to_string(i) + ": ";
    if (n.distribution.counts.size() != classes.size()) throw DataError(where + "class count width mismatch");
    if (n.distribution.total == 0) throw DataError(where + "empty node");
    if (n.label >= classes.size()) throw DataError(where + "label out of range");
    if (!n.split) continue;
    const auto& s = *n.split;
    if (s.left != next_child || s.right != next_child + 1 || s.right >= nodes.size()) {
      throw DataError(where + "children are not in breadth-first order");
    }
    next_child += 2;
    if (s.rule.feature >= schema.size()) throw DataError(where + "unknown feature");
    const auto& spec = schema[s.rule.feature];
    bool subset = s.rule.kind == SplitRule::Kind::subset;
    if (subset != (spec.kind == FeatureKind::categorical)) throw DataError(where + "rule kind does not match feature");
    if (subset) {
      for (const auto* levels : {&s.rule.left_levels, &s.rule.right_levels}) {
        if (levels->empty() || !std::is_sorted(levels->begin(), levels->end())) {
          throw DataError(where + "level sets must be nonempty and sorted");
        }
        if (levels->back() >= spec.levels.size()) throw DataError(where + "level out of range");
      }
    }
    const auto& l = nodes.at(s.left).distribution;
    const auto& r = nodes.at(s.right).distribution;
    if (merged(l, r) != n.distribution) throw DataError(where + "children do not sum to the parent");
    if (nodes[s.left].depth != n.depth + 1 || nodes[s.right].depth != n.depth + 1) {
      throw DataError(where + "child depth mismatch");
    }
  }
  if (next_child != nodes.size()) throw DataError("tree has unreachable nodes");
}

DecisionTree grow_tree(const TrainingSet& set, const TrainConfig& config) {
  config.validate();
  if (set.size() == 0) throw DomainError("cannot grow a tree on an empty dataset");

  DecisionTree tree;
  tree.schema = set.schema;
  tree.classes = set.classes;

  struct Pending {
    std::size_t node;
    std::vector<std::size_t> members;
  };
  std::deque<Pending> queue;
  auto add_node = [&](std::vector<std::size_t> members, std::size_t depth) {
    TreeNode node;
    node.distribution = set.distribution(members);
    node.label = node.distribution.majority();
    node.depth = depth;
    tree.nodes.push_back(std::move(node));
    queue.push_back({tree.nodes.size() - 1, std::move(members)});
  };
  add_node(set.all_rows(), 0);

  // FIFO processing appends children in breadth-first order, so node ids are
  // BFS ids.
  while (!queue.empty()) {
    Pending item = std::move(queue.front());
    queue.pop_front();
    const TreeNode& node = tree.nodes[item.node];
    if (item.members.size() < config.min_samples || node.distribution.pure()) continue;
    if (config.max_depth && node.depth >= *config.max_depth) continue;
    auto split = best_split(set, item.members);
    if (!split || split->gain < config.min_gain) continue;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t r : item.members) {
      (*split->rule.goes_left(set.rows[r][split->rule.feature]) ? left : right).push_back(r);
    }
    const std::size_t depth = node.depth + 1;
    const std::size_t left_id = tree.nodes.size();
    tree.nodes[item.node].split = TreeNode::Split{split->rule, split->gain, left_id, left_id + 1};
    add_node(std::move(left), depth);
    add_node(std::move(right), depth);
  }
  return tree;
}

std::vector<std::string> internal_features(const DecisionTree& tree) {
  std::vector<std::string> out;
  for (const auto& node : tree.nodes) {
    if (!node.split) continue;
    const auto& name = tree.schema[node.split->rule.feature].name;
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  }
  return out;
}

std::vector<std::vector<std::size_t>> node_members(const DecisionTree& tree, const TrainingSet& set) {
  std::vector<std::vector<std::size_t>> out(tree.nodes.size());
  for (std::size_t r = 0; r < set.size(); ++r) {
    std::size_t id = 0;
    while (true) {
      out[id].push_back(r);
      const auto& split = tree.nodes[id].split;
      if (!split) break;
      auto left = split->rule.goes_left(set.rows[r][split->rule.feature]);
      if (!left) left = tree.nodes[split->left].distribution.total >= tree.nodes[split->right].distribution.total;
      id = *left ? split->left : split->right;
    }
  }
  return out;
}

}  // namespace delaytree
