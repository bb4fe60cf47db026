#pragma once

// Human-readable decision-tree export. The text form mirrors J48 output:
//
//   mean_avg_accel_R <= 2.25
//       leaf: AR (w=15, td=0, ar=15)
//   mean_avg_accel_R > 2.25
//       leaf: TD (w=16, td=16, ar=0)
//
// and parses back into the same tree. The DOT form has one node per tree node.

#include <sstream>
#include <string>
#include <vector>

#include "legmove/model.hpp"

namespace legmove {

enum class TreeFormat { Text, Dot };

namespace detail {

inline std::string leaf_text(const DecisionTree::Node& n) {
  return "leaf: " + std::string(to_string(n.label)) + " (w=" + format_double(n.weight()) +
         ", td=" + format_double(n.td_weight) + ", ar=" + format_double(n.ar_weight) + ")";
}

inline void text_node(const DecisionTree& t, std::size_t i, int indent, std::ostringstream& os) {
  const auto& n = t.nodes()[i];
  const std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
  if (n.is_leaf()) {
    os << pad << leaf_text(n) << '\n';
    return;
  }
  const std::string& f = t.feature_names()[n.feature];
  const std::string thr = format_double(n.threshold);
  os << pad << f << " <= " << thr << '\n';
  text_node(t, static_cast<std::size_t>(n.left), indent + 1, os);
  os << pad << f << " > " << thr << '\n';
  text_node(t, static_cast<std::size_t>(n.right), indent + 1, os);
}

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

inline std::string export_tree(const DecisionTree& t, TreeFormat format) {
  std::ostringstream os;
  if (format == TreeFormat::Text) {
    detail::text_node(t, 0, 0, os);
    return os.str();
  }
  os << "digraph tree {\n";
  os << "  node [shape=box, fontname=\"Helvetica\"];\n";
  for (std::size_t i = 0; i < t.nodes().size(); ++i) {
    const auto& n = t.nodes()[i];
    if (n.is_leaf()) {
      os << "  n" << i << " [label=\"" << to_string(n.label) << "\\nw=" << format_double(n.weight())
         << " (td=" << format_double(n.td_weight) << ", ar=" << format_double(n.ar_weight) << ")\", shape=ellipse];\n";
    } else {
      os << "  n" << i << " [label=\"" << detail::dot_escape(t.feature_names()[n.feature]) << "\"];\n";
    }
  }
  for (std::size_t i = 0; i < t.nodes().size(); ++i) {
    const auto& n = t.nodes()[i];
    if (n.is_leaf()) continue;
    const std::string thr = format_double(n.threshold);
    os << "  n" << i << " -> n" << n.left << " [label=\"<= " << thr << "\"];\n";
    os << "  n" << i << " -> n" << n.right << " [label=\"> " << thr << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

// Tree of a DecisionTree model, or tree `tree_index` of a random forest.
inline std::string export_tree(const Model& m, TreeFormat format, std::size_t tree_index = 0) {
  if (auto t = m.as<DecisionTree>()) return export_tree(*t, format);
  if (auto f = m.as<ForestModel>()) {
    if (tree_index >= f->trees().size()) throw Error(ErrorKind::Usage, "forest has no tree " + std::to_string(tree_index));
    return export_tree(f->trees()[tree_index], format);
  }
  throw Error(ErrorKind::Unsupported, "tree export needs a DecisionTree or RandomForest model, got " +
                                          std::string(to_string(m.family())));
}

// Inverse of the text export. Split gains are not part of the text form and
// come back as 0. Feature order follows `feature_names` when given, otherwise
// first appearance.
inline DecisionTree parse_tree_text(const std::string& text, std::vector<std::string> feature_names = {}) {
  struct Line {
    int indent;
    std::string body;
  };
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.find_first_not_of(' ') == std::string::npos) continue;
    const auto spaces = raw.find_first_not_of(' ');
    if (spaces % 4 != 0) throw Error(ErrorKind::Validation, "tree text: indentation must be a multiple of 4: '" + raw + "'");
    lines.push_back({static_cast<int>(spaces / 4), raw.substr(spaces)});
  }
  auto bad = [](const std::string& why) { return Error(ErrorKind::Validation, "tree text: " + why); };
  auto feature_id = [&](const std::string& name) {
    for (std::size_t i = 0; i < feature_names.size(); ++i)
      if (feature_names[i] == name) return i;
    feature_names.push_back(name);
    return feature_names.size() - 1;
  };
  auto number = [&](const std::string& s) {
    auto v = parse_double(s);
    if (!v) throw bad("bad number '" + s + "'");
    return *v;
  };

  std::vector<DecisionTree::Node> nodes;
  std::size_t pos = 0;
  auto parse = [&](auto&& self, int indent) -> int {
    if (pos >= lines.size()) throw bad("unexpected end of input");
    const Line& l = lines[pos];
    if (l.indent != indent) throw bad("unexpected indentation at '" + l.body + "'");
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    if (l.body.rfind("leaf: ", 0) == 0) {
      // leaf: AR (w=15, td=0, ar=15)
      const auto open = l.body.find(" (");
      if (open == std::string::npos || l.body.back() != ')') throw bad("malformed leaf '" + l.body + "'");
      auto label = parse_label(l.body.substr(6, open - 6));
      if (!label) throw bad("bad leaf label in '" + l.body + "'");
      const std::string inner = l.body.substr(open + 2, l.body.size() - open - 3);
      double td = 0.0, ar = 0.0;
      std::istringstream parts(inner);
      std::string part;
      while (std::getline(parts, part, ',')) {
        part = part.substr(part.find_first_not_of(' '));
        const auto eq = part.find('=');
        if (eq == std::string::npos) throw bad("malformed leaf field '" + part + "'");
        const std::string key = part.substr(0, eq);
        const double v = number(part.substr(eq + 1));
        if (key == "td") td = v;
        else if (key == "ar") ar = v;
        else if (key != "w") throw bad("unknown leaf field '" + key + "'");
      }
      auto& n = nodes[static_cast<std::size_t>(id)];
      n.label = *label;
      n.td_weight = td;
      n.ar_weight = ar;
      ++pos;
      return id;
    }
    const auto le = l.body.rfind(" <= ");
    if (le == std::string::npos) throw bad("expected '<feature> <= <threshold>' at '" + l.body + "'");
    const std::string feature = l.body.substr(0, le);
    const double thr = number(l.body.substr(le + 4));
    ++pos;
    const int left = self(self, indent + 1);
    if (pos >= lines.size() || lines[pos].indent != indent || lines[pos].body != feature + " > " + l.body.substr(le + 4))
      throw bad("missing '" + feature + " > ...' branch");
    ++pos;
    const int right = self(self, indent + 1);
    auto& n = nodes[static_cast<std::size_t>(id)];
    n.left = left;
    n.right = right;
    n.feature = feature_id(feature);
    n.threshold = thr;
    n.td_weight = nodes[static_cast<std::size_t>(left)].td_weight + nodes[static_cast<std::size_t>(right)].td_weight;
    n.ar_weight = nodes[static_cast<std::size_t>(left)].ar_weight + nodes[static_cast<std::size_t>(right)].ar_weight;
    n.label = weighted_majority(n.td_weight, n.ar_weight);
    return id;
  };
  parse(parse, 0);
  if (pos != lines.size()) throw bad("trailing content after the tree");
  return DecisionTree(std::move(feature_names), std::move(nodes));
}

}  // namespace legmove
