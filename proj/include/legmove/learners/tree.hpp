#pragma once

// Binary decision tree over numeric features. With the gain-ratio criterion and
// pruning on it behaves like C4.5 (J48); with gini, no pruning and a per-split
// feature sample it is the random-forest base learner.

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "legmove/learners/common.hpp"
#include "legmove/learners/split.hpp"

namespace legmove {

struct TreeParams {
  SplitCriterion criterion = SplitCriterion::GainRatio;
  int max_depth = 0;  // 0 = unlimited
  double min_leaf_weight = 1.0;
  bool prune = true;
  double pruning_confidence = 0.25;
  std::size_t max_features = 0;  // features sampled per split, 0 = all
  std::uint64_t seed = 0;        // only used when max_features samples
};

namespace c45 {

// Normal deviate for a one-sided confidence level, interpolated from the
// table C4.5 uses.
inline double deviate_for_confidence(double cf) {
  static constexpr double val[] = {0, 0.001, 0.005, 0.01, 0.05, 0.10, 0.20, 0.40, 1.00};
  static constexpr double dev[] = {4.0, 3.09, 2.58, 2.33, 1.65, 1.28, 0.84, 0.25, 0.00};
  int i = 0;
  while (cf > val[i]) ++i;
  if (i == 0) return dev[0];
  return dev[i - 1] + (dev[i] - dev[i - 1]) * (cf - val[i - 1]) / (val[i] - val[i - 1]);
}

// Extra errors to add to `e` observed errors out of `n` so the total is the
// upper confidence bound on the error count (C4.5's AddErrs).
inline double added_errors(double n, double e, double cf) {
  if (n <= 0.0) return 0.0;
  const double z = deviate_for_confidence(cf);
  const double coeff = z * z;
  if (e < 1e-6) return n * (1.0 - std::exp(std::log(cf) / n));
  if (e < 0.9999) {
    const double v0 = n * (1.0 - std::exp(std::log(cf) / n));
    return v0 + e * (added_errors(n, 1.0, cf) - v0);
  }
  if (e + 0.5 >= n) return 0.67 * (n - e);
  const double pr = (e + 0.5 + coeff / 2.0 + std::sqrt(coeff * ((e + 0.5) * (1.0 - (e + 0.5) / n) + coeff / 4.0))) /
                    (n + coeff);
  return n * pr - e;
}

}  // namespace c45

class DecisionTree {
 public:
  // Split when left >= 0: rows with value <= threshold go left. Leaves carry
  // the label and the weighted class counts that reached them.
  struct Node {
    int left = -1;
    int right = -1;
    std::size_t feature = 0;
    double threshold = 0.0;
    Label label = Label::AR;
    double td_weight = 0.0;
    double ar_weight = 0.0;
    double gain = 0.0;

    bool is_leaf() const noexcept { return left < 0; }
    double weight() const noexcept { return td_weight + ar_weight; }
    friend bool operator==(const Node&, const Node&) = default;
  };

  DecisionTree() = default;

  DecisionTree(std::vector<std::string> feature_names, std::vector<Node> nodes)
      : feature_names_(std::move(feature_names)), nodes_(std::move(nodes)) {
    validate();
    compute_importances();
  }

  // Weights are used as given; callers normalize.
  static DecisionTree fit(const TrainingSet& data, const TreeParams& params, std::vector<std::string> feature_names) {
    check_training_set(data);
    if (feature_names.size() != data.dims())
      throw Error(ErrorKind::Usage, "decision tree: feature name count does not match columns");
    DecisionTree t;
    t.feature_names_ = std::move(feature_names);
    Builder b{data, params, t.nodes_, Rng(params.seed)};
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), 0);
    b.grow(all, 0);
    if (params.prune) {
      t.prune_subtree(0, params.pruning_confidence);
      t.compact();
    }
    t.compute_importances();
    return t;
  }

  Label predict(std::span<const double> row) const { return nodes_[leaf_index(row)].label; }

  std::size_t leaf_index(std::span<const double> row) const {
    std::size_t i = 0;
    while (!nodes_[i].is_leaf())
      i = static_cast<std::size_t>(row[nodes_[i].feature] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right);
    return i;
  }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const Node& root() const { return nodes_.at(0); }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  // Weighted impurity decrease per feature, normalized to sum 1 (all zero for a single leaf).
  const std::vector<double>& importances() const noexcept { return importances_; }

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
  }

  int depth() const { return depth_from(0); }

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  struct Builder {
    const TrainingSet& data;
    const TreeParams& params;
    std::vector<Node>& nodes;
    Rng rng;

    std::vector<std::size_t> candidate_features() {
      const std::size_t d = data.dims();
      std::vector<std::size_t> f(d);
      std::iota(f.begin(), f.end(), 0);
      if (params.max_features == 0 || params.max_features >= d) return f;
      for (std::size_t i = 0; i < params.max_features; ++i) std::swap(f[i], f[i + rng.index(d - i)]);
      f.resize(params.max_features);
      std::sort(f.begin(), f.end());
      return f;
    }

    int grow(const std::vector<std::size_t>& rows, int depth) {
      const int id = static_cast<int>(nodes.size());
      nodes.emplace_back();
      double td = 0.0, ar = 0.0;
      for (auto i : rows) (data.y[i] == Label::AR ? ar : td) += data.w[i];
      {
        Node& n = nodes[static_cast<std::size_t>(id)];
        n.td_weight = td;
        n.ar_weight = ar;
        n.label = weighted_majority(td, ar);
      }
      const bool pure = td <= 0.0 || ar <= 0.0;
      if (pure || rows.size() < 2 || (params.max_depth > 0 && depth >= params.max_depth)) return id;

      std::vector<double> values(rows.size()), weights(rows.size());
      std::vector<Label> labels(rows.size());
      for (std::size_t k = 0; k < rows.size(); ++k) {
        labels[k] = data.y[rows[k]];
        weights[k] = data.w[rows[k]];
      }

      const auto features = candidate_features();
      std::optional<NumericSplit> best;
      std::size_t best_feature = 0;
      for (auto f : features) {
        for (std::size_t k = 0; k < rows.size(); ++k) values[k] = data.x(rows[k], f);
        auto s = best_numeric_split(values, labels, weights, params.criterion, params.min_leaf_weight);
        if (s && (!best || s->score > best->score + 1e-12 * std::max(1.0, std::abs(best->score)))) {
          best = s;
          best_feature = f;
        }
      }
      if (!best) {
        // No split lowers impurity (XOR-like structure). Take the most balanced
        // admissible split so deeper levels can still separate the classes.
        auto fallback = balanced_split(rows, features);
        if (!fallback) return id;
        best = NumericSplit{fallback->second, 0.0, 0.0, 0.0};
        best_feature = fallback->first;
      }

      std::vector<std::size_t> left, right;
      for (auto i : rows) (data.x(i, best_feature) <= best->threshold ? left : right).push_back(i);
      const int l = grow(left, depth + 1);
      const int r = grow(right, depth + 1);
      Node& n = nodes[static_cast<std::size_t>(id)];
      n.left = l;
      n.right = r;
      n.feature = best_feature;
      n.threshold = best->threshold;
      n.gain = best->gain;
      return id;
    }

    std::optional<std::pair<std::size_t, double>> balanced_split(const std::vector<std::size_t>& rows,
                                                                 const std::vector<std::size_t>& features) {
      std::optional<std::pair<std::size_t, double>> out;
      double best_balance = -1.0;
      double total = 0.0;
      for (auto i : rows) total += data.w[i];
      for (auto f : features) {
        std::vector<std::size_t> order = rows;
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return data.x(a, f) < data.x(b, f); });
        double lw = 0.0;
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
          lw += data.w[order[k]];
          const double v = data.x(order[k], f), next = data.x(order[k + 1], f);
          if (!(v < next)) continue;
          const double rw = total - lw;
          if (lw < params.min_leaf_weight || rw < params.min_leaf_weight || lw <= 0.0 || rw <= 0.0) continue;
          const double balance = std::min(lw, rw);
          if (balance > best_balance + 1e-12) {
            best_balance = balance;
            out = std::make_pair(f, 0.5 * (v + next));
          }
        }
      }
      return out;
    }
  };

  // Subtree replacement: collapse a split when the pessimistic error of a leaf
  // is no worse than that of the subtree. Returns the estimated error.
  double prune_subtree(std::size_t i, double cf) {
    Node& n = nodes_[i];
    const double errors = std::min(n.td_weight, n.ar_weight);
    const double as_leaf = errors + c45::added_errors(n.weight(), errors, cf);
    if (n.is_leaf()) return as_leaf;
    const double as_tree = prune_subtree(static_cast<std::size_t>(n.left), cf) +
                           prune_subtree(static_cast<std::size_t>(n.right), cf);
    Node& m = nodes_[i];
    if (as_leaf <= as_tree + 0.1) {
      m.left = m.right = -1;
      m.feature = 0;
      m.threshold = 0.0;
      m.gain = 0.0;
      return as_leaf;
    }
    return as_tree;
  }

  // Drops nodes orphaned by pruning; keeps pre-order numbering.
  void compact() {
    std::vector<Node> out;
    auto copy = [&](auto&& self, std::size_t i) -> int {
      const int id = static_cast<int>(out.size());
      out.push_back(nodes_[i]);
      if (!nodes_[i].is_leaf()) {
        const int l = self(self, static_cast<std::size_t>(nodes_[i].left));
        const int r = self(self, static_cast<std::size_t>(nodes_[i].right));
        out[static_cast<std::size_t>(id)].left = l;
        out[static_cast<std::size_t>(id)].right = r;
      }
      return id;
    };
    copy(copy, 0);
    nodes_ = std::move(out);
  }

  void compute_importances() {
    importances_.assign(feature_names_.size(), 0.0);
    double total = 0.0;
    for (const auto& n : nodes_) {
      if (n.is_leaf()) continue;
      importances_[n.feature] += n.weight() * n.gain;
      total += n.weight() * n.gain;
    }
    if (total > 0.0)
      for (double& v : importances_) v /= total;
  }

  int depth_from(std::size_t i) const {
    const Node& n = nodes_[i];
    if (n.is_leaf()) return 0;
    return 1 + std::max(depth_from(static_cast<std::size_t>(n.left)), depth_from(static_cast<std::size_t>(n.right)));
  }

  void validate() const {
    if (nodes_.empty()) throw Error(ErrorKind::Validation, "decision tree: no nodes");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& n = nodes_[i];
      if (n.is_leaf()) {
        if (n.right >= 0) throw Error(ErrorKind::Validation, "decision tree: leaf with a right child");
        continue;
      }
      auto ok = [&](int c) { return c > static_cast<int>(i) && c < static_cast<int>(nodes_.size()); };
      if (!ok(n.left) || !ok(n.right) || n.feature >= feature_names_.size())
        throw Error(ErrorKind::Validation, "decision tree: malformed node " + std::to_string(i));
    }
  }

  std::vector<std::string> feature_names_;
  std::vector<Node> nodes_;
  std::vector<double> importances_;
};

}  // namespace legmove
