#pragma once

#include <string>
#include <string_view>

#include "delaytree/cart.hpp"

namespace delaytree {

enum class TreeFormat { json, dot, text };

// Throws UsageError for anything but "json", "dot" or "text".
TreeFormat parse_tree_format(std::string_view name);

// Byte-deterministic rendering. Node ids are the tree's breadth-first ids.
//  json: nested nodes with keys id, kind, rule, gain, n, counts, label,
//        children, wrapped with the schema and class list needed to reload.
//  dot:  Graphviz digraph; the left edge is labeled "yes" (rule holds).
//  text: indented outline.
std::string export_tree(const DecisionTree& tree, TreeFormat format);

// Rebuilds a tree from export_tree(tree, TreeFormat::json). Throws DataError
// on malformed or structurally invalid documents.
DecisionTree import_tree_json(std::string_view text);

// Human-readable rule with the threshold at six significant digits, e.g. "temperature_f <= 67.5" or "season in {Spring, Summer}".
std::string describe_rule(const DecisionTree& tree, const SplitRule& rule);

}  // namespace delaytree
