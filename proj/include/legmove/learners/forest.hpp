#pragma once

#include <cmath>
#include <vector>

#include "legmove/learners/tree.hpp"

namespace legmove {

enum class MaxFeatures { Sqrt, All };

struct ForestParams {
  int n_trees = 100;
  MaxFeatures max_features = MaxFeatures::Sqrt;
  int max_depth = 0;
  double min_leaf_weight = 1.0;
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

// Gini trees on weighted bootstrap resamples, majority vote of trees.
class ForestModel {
 public:
  ForestModel() = default;
  explicit ForestModel(std::vector<DecisionTree> trees) : trees_(std::move(trees)) {}

  // Tree t draws from its own stream mix_seed(seed, t), so trees could be
  // trained in any order with the same result.
  static ForestModel fit(const TrainingSet& data, const ForestParams& params, const std::vector<std::string>& names) {
    check_training_set(data);
    if (params.n_trees < 1) throw Error(ErrorKind::Usage, "random forest: n_trees must be >= 1");
    const std::size_t n = data.size(), d = data.dims();
    std::vector<double> cumulative(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) cumulative[i] = acc += data.w[i];

    std::vector<DecisionTree> trees;
    trees.reserve(static_cast<std::size_t>(params.n_trees));
    for (int t = 0; t < params.n_trees; ++t) {
      const std::uint64_t tree_seed = mix_seed(params.seed, static_cast<std::uint64_t>(t));
      Rng rng(tree_seed);
      TreeParams tp;
      tp.criterion = SplitCriterion::Gini;
      tp.max_depth = params.max_depth;
      tp.min_leaf_weight = params.min_leaf_weight;
      tp.prune = false;
      tp.max_features = params.max_features == MaxFeatures::All
                            ? 0
                            : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))));
      tp.seed = mix_seed(tree_seed, 0xF0F0);
      if (!params.bootstrap) {
        trees.push_back(DecisionTree::fit(data, tp, names));
        continue;
      }
      // Draw n rows with probability proportional to weight; drawn rows count once each.
      TrainingSet boot;
      boot.x = Matrix(n, d);
      boot.y.resize(n);
      boot.w.assign(n, 1.0);
      for (std::size_t k = 0; k < n; ++k) {
        const double u = rng.uniform() * acc;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        std::size_t i = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative.begin(), static_cast<std::ptrdiff_t>(n - 1)));
        for (std::size_t j = 0; j < d; ++j) boot.x(k, j) = data.x(i, j);
        boot.y[k] = data.y[i];
      }
      trees.push_back(DecisionTree::fit(boot, tp, names));
    }
    return ForestModel(std::move(trees));
  }

  // Unweighted vote; ties go to AR.
  Label predict(std::span<const double> row) const {
    std::size_t ar = 0;
    for (const auto& t : trees_)
      if (t.predict(row) == Label::AR) ++ar;
    return 2 * ar >= trees_.size() ? Label::AR : Label::TD;
  }

  std::vector<double> importances() const {
    std::vector<double> out;
    for (const auto& t : trees_) {
      const auto& imp = t.importances();
      if (out.empty()) out.assign(imp.size(), 0.0);
      for (std::size_t j = 0; j < imp.size(); ++j) out[j] += imp[j] / static_cast<double>(trees_.size());
    }
    return out;
  }

  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

 private:
  std::vector<DecisionTree> trees_;
};

}  // namespace legmove
