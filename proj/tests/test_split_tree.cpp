#include <gtest/gtest.h>

#include "oracles.hpp"
#include "support.hpp"

using namespace legmove;
using legmove::testing::make_training_set;

using legmove::oracle::gain_ratio_split;

TEST(BestSplit, TwoByTwo) {
  const std::vector<double> v = {1, 1, 2, 2}, w(4, 1.0);
  const std::vector<Label> y = {Label::TD, Label::TD, Label::AR, Label::AR};
  auto s = best_numeric_split(v, y, w, SplitCriterion::GainRatio);
  ASSERT_TRUE(s);
  EXPECT_DOUBLE_EQ(s->threshold, 1.5);
  EXPECT_DOUBLE_EQ(s->gain, 1.0);
  EXPECT_DOUBLE_EQ(s->score, 1.0);
}

TEST(BestSplit, PureLabelsHaveNoSplit) {
  const std::vector<double> v = {1, 2, 3, 4}, w(4, 1.0);
  const std::vector<Label> y(4, Label::AR);
  EXPECT_FALSE(best_numeric_split(v, y, w, SplitCriterion::GainRatio));
  EXPECT_FALSE(best_numeric_split(v, y, w, SplitCriterion::Gini));
}

TEST(BestSplit, SixPointMixedSetMatchesEnumeration) {
  const std::vector<double> v = {0.3, 1.7, 1.2, 2.9, 0.8, 2.2}, w(6, 1.0);
  const std::vector<Label> y = {Label::TD, Label::AR, Label::TD, Label::AR, Label::AR, Label::TD};
  auto s = best_numeric_split(v, y, w, SplitCriterion::GainRatio);
  auto o = gain_ratio_split(v, y, w);
  ASSERT_TRUE(s && o);
  EXPECT_DOUBLE_EQ(s->threshold, o->first);
  EXPECT_NEAR(s->score, o->second, 1e-12);
}

TEST(BestSplit, RandomSetsMatchEnumeration) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(8), w(8);
    std::vector<Label> y(8);
    for (std::size_t i = 0; i < 8; ++i) {
      v[i] = static_cast<double>(rng.index(6));  // repeated values on purpose
      y[i] = rng.uniform() < 0.5 ? Label::AR : Label::TD;
      w[i] = trial % 2 ? 0.5 + rng.uniform() : 1.0;
    }
    auto s = best_numeric_split(v, y, w, SplitCriterion::GainRatio);
    auto o = gain_ratio_split(v, y, w);
    ASSERT_EQ(s.has_value(), o.has_value()) << "trial " << trial;
    if (!s) continue;
    EXPECT_DOUBLE_EQ(s->threshold, o->first) << "trial " << trial;
    EXPECT_NEAR(s->score, o->second, 1e-12) << "trial " << trial;
  }
}

TEST(BestSplit, MinLeafWeightIsRespected) {
  const std::vector<double> v = {1, 2, 3, 4}, w(4, 1.0);
  const std::vector<Label> y = {Label::AR, Label::TD, Label::TD, Label::TD};
  auto loose = best_numeric_split(v, y, w, SplitCriterion::GainRatio, 0.0);
  ASSERT_TRUE(loose);
  EXPECT_DOUBLE_EQ(loose->threshold, 1.5);
  auto strict = best_numeric_split(v, y, w, SplitCriterion::GainRatio, 2.0);
  ASSERT_TRUE(strict);
  EXPECT_DOUBLE_EQ(strict->threshold, 2.5);
}

TEST(C45, ConfidenceDeviate) {
  EXPECT_NEAR(c45::deviate_for_confidence(0.25), 0.84 + (0.25 - 0.84) * 0.25, 1e-12);
  EXPECT_DOUBLE_EQ(c45::deviate_for_confidence(0.10), 1.28);
}

TEST(C45, AddedErrors) {
  // Zero observed errors: n (1 - cf^(1/n)).
  EXPECT_NEAR(c45::added_errors(6, 0, 0.25), 6 * (1 - std::pow(0.25, 1.0 / 6)), 1e-12);
  // e >= 1: upper limit of the binomial interval, minus e.
  const double z = c45::deviate_for_confidence(0.25), n = 14, e = 3;
  const double f = (e + 0.5) / n;
  const double upper = (f + z * z / (2 * n) + z * std::sqrt(f / n - f * f / n + z * z / (4 * n * n))) / (1 + z * z / n);
  EXPECT_NEAR(c45::added_errors(n, e, 0.25), n * upper - e, 1e-9);
  EXPECT_DOUBLE_EQ(c45::added_errors(4, 3.6, 0.25), 0.67 * 0.4);
}

namespace {

DecisionTree fit_tree(const TrainingSet& t, TreeParams p = {}) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < t.dims(); ++j) names.push_back("f" + std::to_string(j));
  return DecisionTree::fit(t, p, names);
}

}  // namespace

TEST(DecisionTree, PureDataIsOneLeaf) {
  const auto t = fit_tree(make_training_set({{1}, {2}, {3}}, {Label::TD, Label::TD, Label::TD}));
  EXPECT_EQ(t.nodes().size(), 1u);
  EXPECT_EQ(t.root().label, Label::TD);
  EXPECT_DOUBLE_EQ(t.root().td_weight, 3.0);
}

TEST(DecisionTree, XorNeedsDepthTwo) {
  const auto data = make_training_set({{0, 0}, {1, 1}, {0, 1}, {1, 0}}, {Label::TD, Label::TD, Label::AR, Label::AR});
  TreeParams p;
  p.prune = false;
  const auto t = fit_tree(data, p);
  EXPECT_EQ(t.depth(), 2);
  for (std::size_t i = 0; i < data.size(); ++i) EXPECT_EQ(t.predict(data.x.row(i)), data.y[i]);
}

TEST(DecisionTree, AccelerationSplitFixture) {
  const Dataset d = generate(acceleration_split_profile(1));
  const Model m = fit(d, FeatureMask::all(d.schema()), LearnerSpec(Family::DecisionTree));
  const auto* t = m.as<DecisionTree>();
  ASSERT_NE(t, nullptr);
  ASSERT_EQ(t->leaf_count(), 2u);
  EXPECT_EQ(t->feature_names()[t->root().feature], "mean_avg_accel_R");
  EXPECT_NEAR(t->root().threshold, 2.25, 0.5);
  EXPECT_EQ(t->nodes()[static_cast<std::size_t>(t->root().right)].label, Label::TD);
  EXPECT_EQ(t->nodes()[static_cast<std::size_t>(t->root().left)].label, Label::AR);
}

TEST(DecisionTree, MidpointThreshold) {
  // All TD above 2.261074, all AR at or below it.
  std::vector<std::vector<double>> x;
  std::vector<Label> y;
  const double td[] = {2.30, 2.45, 2.61, 2.9, 3.1, 2.262148};
  const double ar[] = {1.5, 1.8, 2.0, 2.1, 2.26, 2.26};
  for (double v : td) x.push_back({0.5, v}), y.push_back(Label::TD);
  for (double v : ar) x.push_back({0.5, v}), y.push_back(Label::AR);
  const auto t = fit_tree(make_training_set(x, y));
  ASSERT_EQ(t.leaf_count(), 2u);
  EXPECT_EQ(t.root().feature, 1u);
  EXPECT_NEAR(t.root().threshold, 2.261074, 1e-6);
  EXPECT_EQ(t.nodes()[static_cast<std::size_t>(t.root().right)].label, Label::TD);
}

TEST(DecisionTree, PruningCollapsesNoise) {
  // One AR among TDs on the left half, one TD among ARs on the right.
  std::vector<std::vector<double>> x;
  std::vector<Label> y;
  for (int i = 0; i < 40; ++i) {
    x.push_back({double(i)});
    const bool ar = i >= 20;
    y.push_back((i == 7 || i == 31) ? (ar ? Label::TD : Label::AR) : (ar ? Label::AR : Label::TD));
  }
  const auto data = make_training_set(x, y);
  TreeParams raw;
  raw.prune = false;
  const auto full = fit_tree(data, raw);
  const auto pruned = fit_tree(data);
  EXPECT_GT(full.leaf_count(), 2u);
  EXPECT_EQ(pruned.leaf_count(), 2u);
  EXPECT_DOUBLE_EQ(pruned.root().threshold, 19.5);
}

TEST(DecisionTree, MaxDepthLimitsGrowth) {
  const auto data = make_training_set({{0, 0}, {1, 1}, {0, 1}, {1, 0}}, {Label::TD, Label::TD, Label::AR, Label::AR});
  TreeParams p;
  p.prune = false;
  p.max_depth = 1;
  EXPECT_LE(fit_tree(data, p).depth(), 1);
}

TEST(DecisionTree, ImportancesSumToOne) {
  const Dataset d = paper_census_fixture(AgeBand::ZeroToSix, 1.0, 4);
  const Model m = fit(d, FeatureMask::all(d.schema()), LearnerSpec(Family::DecisionTree, {{"prune", false}}));
  auto imp = m.importances();
  ASSERT_TRUE(imp);
  double s = 0;
  for (double v : *imp) {
    EXPECT_GE(v, 0.0);
    s += v;
  }
  EXPECT_NEAR(s, 1.0, 1e-12);
}
