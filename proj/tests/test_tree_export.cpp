#include <gtest/gtest.h>

#include <map>
#include <regex>
#include <set>

#include "support.hpp"

using namespace legmove;

namespace {

DecisionTree fixture_tree(std::uint64_t seed = 1) {
  const Dataset d = generate(acceleration_split_profile(seed));
  return *fit(d, FeatureMask::all(d.schema()), LearnerSpec(Family::DecisionTree)).as<DecisionTree>();
}

DecisionTree deep_tree() {
  const Dataset d = paper_census_fixture(AgeBand::SixToTwelve, 0.5, 9);
  return *fit(d, FeatureMask::all(d.schema()), LearnerSpec(Family::DecisionTree, {{"prune", false}})).as<DecisionTree>();
}

// Structural equality ignoring split gains and internal-node labels, matching features by name.
bool isomorphic(const DecisionTree& a, std::size_t i, const DecisionTree& b, std::size_t j) {
  const auto& x = a.nodes()[i];
  const auto& y = b.nodes()[j];
  if (x.is_leaf() != y.is_leaf()) return false;
  if (x.is_leaf() && x.label != y.label) return false;
  if (std::abs(x.td_weight - y.td_weight) > 1e-9 * (1 + x.td_weight)) return false;
  if (std::abs(x.ar_weight - y.ar_weight) > 1e-9 * (1 + x.ar_weight)) return false;
  if (x.is_leaf()) return true;
  if (a.feature_names()[x.feature] != b.feature_names()[y.feature] || x.threshold != y.threshold) return false;
  return isomorphic(a, static_cast<std::size_t>(x.left), b, static_cast<std::size_t>(y.left)) &&
         isomorphic(a, static_cast<std::size_t>(x.right), b, static_cast<std::size_t>(y.right));
}

// Minimal DOT reader: node ids, edges, and the leaf/split shape of each node.
struct DotGraph {
  std::map<std::string, bool> nodes;  // id -> is ellipse
  std::vector<std::pair<std::string, std::string>> edges;
};

DotGraph parse_dot(const std::string& dot) {
  DotGraph g;
  std::istringstream in(dot);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "digraph tree {");
  const std::regex node_re(R"(^\s*(n\d+) \[label="[^"]*"(, shape=ellipse)?\];$)");
  const std::regex edge_re(R"(^\s*(n\d+) -> (n\d+) \[label="(<=|>) [^"]+"\];$)");
  bool closed = false;
  while (std::getline(in, line)) {
    std::smatch m;
    if (line == "}") {
      closed = true;
      continue;
    }
    EXPECT_FALSE(closed) << "content after closing brace";
    if (line.find("node [") != std::string::npos) continue;
    if (std::regex_match(line, m, edge_re)) {
      g.edges.emplace_back(m[1], m[2]);
    } else if (std::regex_match(line, m, node_re)) {
      g.nodes[m[1]] = m[2].matched;
    } else {
      ADD_FAILURE() << "unparsed DOT line: " << line;
    }
  }
  EXPECT_TRUE(closed);
  return g;
}

void expect_well_formed(const DecisionTree& t) {
  const DotGraph g = parse_dot(export_tree(t, TreeFormat::Dot));
  EXPECT_EQ(g.nodes.size(), t.nodes().size());
  EXPECT_EQ(g.edges.size(), 2 * (t.nodes().size() - t.leaf_count()));
  std::map<std::string, int> indegree, outdegree;
  for (const auto& [from, to] : g.edges) {
    ASSERT_TRUE(g.nodes.count(from)) << from;
    ASSERT_TRUE(g.nodes.count(to)) << to;
    ++outdegree[from];
    ++indegree[to];
  }
  for (const auto& [id, leaf] : g.nodes) {
    EXPECT_EQ(indegree[id], id == "n0" ? 0 : 1) << id;
    EXPECT_EQ(outdegree[id], leaf ? 0 : 2) << id;
  }
}

}  // namespace

TEST(TreeExport, SingleLeafIsOneLine) {
  const auto data = legmove::testing::make_training_set({{1}, {2}}, {Label::TD, Label::TD});
  const auto t = DecisionTree::fit(data, TreeParams{}, {"f0"});
  EXPECT_EQ(export_tree(t, TreeFormat::Text), "leaf: TD (w=2, td=2, ar=0)\n");
  expect_well_formed(t);
}

TEST(TreeExport, FixtureTextForm) {
  const auto t = fixture_tree();
  const std::string text = export_tree(t, TreeFormat::Text);
  const std::regex re(
      "mean_avg_accel_R <= ([0-9.]+)\n    leaf: AR \\(w=[0-9.e+-]+, td=0, ar=[0-9.e+-]+\\)\n"
      "mean_avg_accel_R > \\1\n    leaf: TD \\(w=[0-9.e+-]+, td=[0-9.e+-]+, ar=0\\)\n");
  EXPECT_TRUE(std::regex_match(text, re)) << text;
}

TEST(TreeExport, FixtureDotHasTwoLeaves) {
  const auto t = fixture_tree();
  const DotGraph g = parse_dot(export_tree(t, TreeFormat::Dot));
  ASSERT_EQ(g.nodes.size(), 3u);
  EXPECT_FALSE(g.nodes.at("n0"));
  std::size_t leaves = 0;
  for (const auto& [id, leaf] : g.nodes) leaves += leaf;
  EXPECT_EQ(leaves, 2u);
  expect_well_formed(t);
}

TEST(TreeExport, TextRoundTripIsIsomorphic) {
  for (const auto& t : {fixture_tree(), fixture_tree(5), deep_tree()}) {
    const auto back = parse_tree_text(export_tree(t, TreeFormat::Text), t.feature_names());
    EXPECT_TRUE(isomorphic(t, 0, back, 0));
    EXPECT_EQ(back.nodes().size(), t.nodes().size());
    EXPECT_EQ(export_tree(back, TreeFormat::Text), export_tree(t, TreeFormat::Text));
  }
}

TEST(TreeExport, DeepTreeDotIsWellFormed) {
  const auto t = deep_tree();
  ASSERT_GT(t.leaf_count(), 2u);
  expect_well_formed(t);
}

TEST(TreeExport, MalformedTextRejected) {
  for (const char* bad : {"", "f <= 1\n    leaf: TD (w=1, td=1, ar=0)\n", "  leaf: TD (w=1, td=1, ar=0)\n",
                          "leaf: XX (w=1, td=1, ar=0)\n", "leaf: TD (w=1, td=one, ar=0)\n",
                          "leaf: TD (w=1, td=1, ar=0)\nleaf: AR (w=1, td=0, ar=1)\n",
                          "f <= 1\n    leaf: TD (w=1, td=1, ar=0)\ng > 1\n    leaf: AR (w=1, td=0, ar=1)\n"}) {
    EXPECT_THROW(parse_tree_text(bad), Error) << bad;
  }
}

TEST(TreeExport, ModelDispatch) {
  const Dataset d = generate(acceleration_split_profile(2));
  const auto mask = FeatureMask::all(d.schema());
  const Model forest = fit(d, mask, LearnerSpec(Family::RandomForest, {{"n_trees", 4.0}}, 1));
  for (std::size_t i = 0; i < 4; ++i) {
    const auto text = export_tree(forest, TreeFormat::Text, i);
    EXPECT_EQ(text, export_tree(forest.as<ForestModel>()->trees()[i], TreeFormat::Text));
    expect_well_formed(forest.as<ForestModel>()->trees()[i]);
  }
  EXPECT_THROW(export_tree(forest, TreeFormat::Text, 4), Error);
  for (auto f : {Family::LogisticRegression, Family::SVM, Family::KNN, Family::AdaBoost}) {
    const Model m = fit(d, mask, LearnerSpec(f));
    try {
      export_tree(m, TreeFormat::Dot);
      ADD_FAILURE() << to_string(f);
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Unsupported);
    }
  }
}
