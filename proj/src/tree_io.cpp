#include "delaytree/tree_io.hpp"

#include <cstdio>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "delaytree/error.hpp"
#include "delaytree/text.hpp"

namespace delaytree {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kFormatTag = "delaytree-tree-v1";

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string level_list(const FeatureSpec& spec, const std::vector<std::size_t>& levels) {
  std::string out = "{";
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i > 0) out += ", ";
    out += spec.levels.at(levels[i]);
  }
  return out + "}";
}

ordered_json node_json(const DecisionTree& tree, std::size_t id) {
  const TreeNode& node = tree.nodes[id];
  ordered_json j;
  j["id"] = id;
  j["kind"] = node.is_leaf() ? "leaf" : "split";
  if (node.split) {
    const auto& rule = node.split->rule;
    const auto& spec = tree.schema[rule.feature];
    ordered_json r;
    r["feature"] = spec.name;
    if (rule.kind == SplitRule::Kind::threshold) {
      r["type"] = "threshold";
      r["threshold"] = rule.threshold;
    } else {
      r["type"] = "subset";
      auto names = [&](const std::vector<std::size_t>& levels) {
        ordered_json arr = ordered_json::array();
        for (std::size_t l : levels) arr.push_back(spec.levels[l]);
        return arr;
      };
      r["left"] = names(rule.left_levels);
      r["right"] = names(rule.right_levels);
    }
    j["rule"] = std::move(r);
    j["gain"] = node.split->gain;
  }
  j["n"] = node.distribution.total;
  ordered_json counts = ordered_json::object();
  for (std::size_t c = 0; c < tree.classes.size(); ++c) {
    if (node.distribution.counts[c] > 0) counts[tree.classes[c]] = node.distribution.counts[c];
  }
  j["counts"] = std::move(counts);
  j["label"] = tree.classes[node.label];
  if (node.split) {
    j["children"] = ordered_json::array({node_json(tree, node.split->left), node_json(tree, node.split->right)});
  }
  return j;
}

std::string export_json(const DecisionTree& tree) {
  ordered_json doc;
  doc["format"] = kFormatTag;
  ordered_json meta = ordered_json::object();
  for (const auto& [k, v] : tree.metadata) meta[k] = v;
  doc["metadata"] = std::move(meta);
  ordered_json schema = ordered_json::array();
  for (const auto& f : tree.schema.features()) {
    ordered_json jf;
    jf["name"] = f.name;
    jf["kind"] = f.kind == FeatureKind::continuous ? "continuous" : "categorical";
    if (f.kind == FeatureKind::categorical) jf["levels"] = f.levels;
    schema.push_back(std::move(jf));
  }
  doc["schema"] = std::move(schema);
  doc["classes"] = tree.classes;
  doc["root"] = node_json(tree, 0);
  return doc.dump(2) + "\n";
}

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string export_dot(const DecisionTree& tree) {
  std::ostringstream out;
  out << "digraph tree {\n";
  out << "  node [shape=box, fontname=\"Helvetica\"];\n";
  out << "  edge [fontname=\"Helvetica\"];\n";
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    const auto& node = tree.nodes[id];
    std::string label;
    if (node.split) {
      label = describe_rule(tree, node.split->rule) + "\\nn=" + std::to_string(node.distribution.total) +
              "  gain=" + fixed(node.split->gain, 4);
      out << "  n" << id << " [label=\"" << dot_escape(label) << "\"];\n";
    } else {
      label = tree.classes[node.label] + "\\nn=" + std::to_string(node.distribution.total) + "  " +
              std::to_string(node.distribution.counts[node.label]) + "/" + std::to_string(node.distribution.total);
      out << "  n" << id << " [label=\"" << dot_escape(label) << "\", style=rounded];\n";
    }
  }
  for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
    const auto& split = tree.nodes[id].split;
    if (!split) continue;
    out << "  n" << id << " -> n" << split->left << " [label=\"yes\"];\n";
    out << "  n" << id << " -> n" << split->right << " [label=\"no\"];\n";
  }
  out << "}\n";
  return out.str();
}

std::string export_text(const DecisionTree& tree) {
  std::ostringstream out;
  std::function<void(std::size_t, int, std::string_view)> walk = [&](std::size_t id, int indent,
                                                                     std::string_view edge) {
    const auto& node = tree.nodes[id];
    out << std::string(static_cast<std::size_t>(indent) * 2, ' ') << edge << "[" << id << "] ";
    if (node.split) {
      out << describe_rule(tree, node.split->rule) << " (n=" << node.distribution.total
          << ", gain=" << fixed(node.split->gain, 4) << ")\n";
      walk(node.split->left, indent + 1, "yes: ");
      walk(node.split->right, indent + 1, "no: ");
    } else {
      out << "leaf " << tree.classes[node.label] << " (n=" << node.distribution.total << ", "
          << node.distribution.counts[node.label] << "/" << node.distribution.total << ")\n";
    }
  };
  walk(0, 0, "");
  return out.str();
}

[[noreturn]] void malformed(const std::string& reason) { throw DataError("tree json", 0, reason); }

const ordered_json& member(const ordered_json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) malformed(std::string("missing '") + key + "'");
  return j.at(key);
}

std::string string_member(const ordered_json& j, const char* key) {
  const auto& v = member(j, key);
  if (!v.is_string()) malformed(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

std::size_t size_member(const ordered_json& j, const char* key) {
  const auto& v = member(j, key);
  if (!v.is_number_unsigned()) malformed(std::string("'") + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

double double_member(const ordered_json& j, const char* key) {
  const auto& v = member(j, key);
  if (!v.is_number()) malformed(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

}  // namespace

TreeFormat parse_tree_format(std::string_view name) {
  if (name == "json") return TreeFormat::json;
  if (name == "dot") return TreeFormat::dot;
  if (name == "text") return TreeFormat::text;
  throw UsageError("unknown tree format '" + std::string(name) + "' (expected json, dot or text)");
}

std::string describe_rule(const DecisionTree& tree, const SplitRule& rule) {
  const auto& spec = tree.schema[rule.feature];
  if (rule.kind == SplitRule::Kind::threshold) {
    // Display only; json keeps the exact threshold.
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", rule.threshold);
    return spec.name + " <= " + buf;
  }
  return spec.name + " in " + level_list(spec, rule.left_levels);
}

std::string export_tree(const DecisionTree& tree, TreeFormat format) {
  tree.validate();
  switch (format) {
    case TreeFormat::json: return export_json(tree);
    case TreeFormat::dot: return export_dot(tree);
    case TreeFormat::text: return export_text(tree);
  }
  throw UsageError("unknown tree format");
}

DecisionTree import_tree_json(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    malformed(std::string("invalid JSON: ") + e.what());
  }
  if (string_member(doc, "format") != kFormatTag) malformed("unsupported format tag");

  DecisionTree tree;
  for (const auto& [k, v] : member(doc, "metadata").items()) {
    if (!v.is_string()) malformed("metadata values must be strings");
    tree.metadata[k] = v.get<std::string>();
  }
  std::vector<FeatureSpec> specs;
  const auto& schema = member(doc, "schema");
  if (!schema.is_array()) malformed("'schema' must be an array");
  for (const auto& jf : schema) {
    FeatureSpec f;
    f.name = string_member(jf, "name");
    std::string kind = string_member(jf, "kind");
    if (kind == "continuous") {
      f.kind = FeatureKind::continuous;
    } else if (kind == "categorical") {
      f.kind = FeatureKind::categorical;
      for (const auto& l : member(jf, "levels")) {
        if (!l.is_string()) malformed("levels must be strings");
        f.levels.push_back(l.get<std::string>());
      }
    } else {
      malformed("unknown feature kind '" + kind + "'");
    }
    specs.push_back(std::move(f));
  }
  try {
    tree.schema = FeatureSchema(std::move(specs));
  } catch (const UsageError& e) {
    malformed(e.what());
  }
  for (const auto& c : member(doc, "classes")) {
    if (!c.is_string()) malformed("classes must be strings");
    tree.classes.push_back(c.get<std::string>());
  }

  std::vector<std::optional<TreeNode>> slots;
  std::function<std::size_t(const ordered_json&, std::size_t)> load = [&](const ordered_json& j,
                                                                           std::size_t depth) -> std::size_t {
    const std::size_t id = size_member(j, "id");
    if (id > 1'000'000) malformed("node id too large");
    if (slots.size() <= id) slots.resize(id + 1);
    if (slots[id]) malformed("duplicate node id " + std::to_string(id));
    TreeNode node;
    node.depth = depth;
    node.distribution = ClassDistribution(tree.classes.size());
    for (const auto& [label, count] : member(j, "counts").items()) {
      auto it = std::find(tree.classes.begin(), tree.classes.end(), label);
      if (it == tree.classes.end()) malformed("unknown class '" + label + "'");
      if (!count.is_number_unsigned()) malformed("class counts must be non-negative integers");
      node.distribution.add(static_cast<std::size_t>(it - tree.classes.begin()), count.get<std::size_t>());
    }
    if (node.distribution.total != size_member(j, "n")) malformed("node " + std::to_string(id) + ": n != sum of counts");
    std::string label = string_member(j, "label");
    auto it = std::find(tree.classes.begin(), tree.classes.end(), label);
    if (it == tree.classes.end()) malformed("unknown label '" + label + "'");
    node.label = static_cast<std::size_t>(it - tree.classes.begin());

    std::string kind = string_member(j, "kind");
    if (kind == "split") {
      const auto& jr = member(j, "rule");
      TreeNode::Split split;
      auto feature = tree.schema.index_of(string_member(jr, "feature"));
      if (!feature) malformed("unknown feature in rule");
      split.rule.feature = *feature;
      std::string type = string_member(jr, "type");
      if (type == "threshold") {
        split.rule.kind = SplitRule::Kind::threshold;
        split.rule.threshold = double_member(jr, "threshold");
      } else if (type == "subset") {
        split.rule.kind = SplitRule::Kind::subset;
        auto levels = [&](const char* key) {
          std::vector<std::size_t> out;
          for (const auto& l : member(jr, key)) {
            auto idx = l.is_string() ? tree.schema.level_index(*feature, l.get<std::string>()) : std::nullopt;
            if (!idx) malformed("unknown level in rule");
            out.push_back(*idx);
          }
          return out;
        };
        split.rule.left_levels = levels("left");
        split.rule.right_levels = levels("right");
      } else {
        malformed("unknown rule type '" + type + "'");
      }
      split.gain = double_member(j, "gain");
      const auto& children = member(j, "children");
      if (!children.is_array() || children.size() != 2) malformed("split nodes need exactly two children");
      split.left = load(children[0], depth + 1);
      split.right = load(children[1], depth + 1);
      node.split = std::move(split);
    } else if (kind != "leaf") {
      malformed("unknown node kind '" + kind + "'");
    }
    slots[id] = std::move(node);
    return id;
  };
  if (load(member(doc, "root"), 0) != 0) malformed("root node must have id 0");
  for (auto& slot : slots) {
    if (!slot) malformed("node ids are not contiguous");
    tree.nodes.push_back(std::move(*slot));
  }
  tree.validate();
  return tree;
}

}  // namespace delaytree
