#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "legmove/core.hpp"

namespace legmove {

enum class SplitCriterion { GainRatio, Gini };

inline std::string_view to_string(SplitCriterion c) { return c == SplitCriterion::Gini ? "gini" : "gain_ratio"; }

inline std::optional<SplitCriterion> parse_split_criterion(std::string_view s) {
  if (s == "gini") return SplitCriterion::Gini;
  if (s == "gain_ratio") return SplitCriterion::GainRatio;
  return std::nullopt;
}

struct NumericSplit {
  double threshold = 0.0;  // left: value <= threshold
  double score = 0.0;      // gain ratio, or gini decrease
  double gain = 0.0;       // impurity decrease (bits for gain ratio, gini units otherwise)
  double split_info = 0.0;
};

namespace impurity {

inline double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

// Entropy in bits of a two-class weight pair.
inline double entropy(double td, double ar) {
  const double t = td + ar;
  if (t <= 0.0) return 0.0;
  return -(plogp(td / t) + plogp(ar / t));
}

inline double gini(double td, double ar) {
  const double t = td + ar;
  if (t <= 0.0) return 0.0;
  const double p = td / t, q = ar / t;
  return 1.0 - p * p - q * q;
}

// Score of splitting (ltd, lar) | (rtd, rar). Returns {score, gain, split_info}.
inline std::array<double, 3> evaluate(SplitCriterion c, double ltd, double lar, double rtd, double rar) {
  const double lw = ltd + lar, rw = rtd + rar, w = lw + rw;
  if (c == SplitCriterion::Gini) {
    const double gain = gini(ltd + rtd, lar + rar) - (lw / w) * gini(ltd, lar) - (rw / w) * gini(rtd, rar);
    return {gain, gain, 0.0};
  }
  const double gain = entropy(ltd + rtd, lar + rar) - (lw / w) * entropy(ltd, lar) - (rw / w) * entropy(rtd, rar);
  const double split_info = -(plogp(lw / w) + plogp(rw / w));
  const double score = split_info > 0.0 ? gain / split_info : 0.0;
  return {score, gain, split_info};
}

}  // namespace impurity

// Gains at or below this are treated as no improvement.
inline constexpr double kMinGain = 1e-12;

// Best threshold over midpoints of consecutive distinct values. Each side must
// carry at least `min_leaf_weight`. Ties go to the smallest threshold.
inline std::optional<NumericSplit> best_numeric_split(std::span<const double> values, std::span<const Label> labels,
                                                      std::span<const double> weights, SplitCriterion criterion,
                                                      double min_leaf_weight = 0.0) {
  const std::size_t n = values.size();
  if (labels.size() != n || weights.size() != n)
    throw Error(ErrorKind::Usage, "best_numeric_split: values, labels and weights differ in length");
  if (n < 2) return std::nullopt;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  double total_td = 0.0, total_ar = 0.0;
  for (std::size_t i = 0; i < n; ++i) (labels[i] == Label::AR ? total_ar : total_td) += weights[i];

  std::optional<NumericSplit> best;
  double ltd = 0.0, lar = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::size_t i = order[k];
    (labels[i] == Label::AR ? lar : ltd) += weights[i];
    const double v = values[i], next = values[order[k + 1]];
    if (!(v < next)) continue;
    const double rtd = total_td - ltd, rar = total_ar - lar;
    if (ltd + lar < min_leaf_weight || rtd + rar < min_leaf_weight) continue;
    if (ltd + lar <= 0.0 || rtd + rar <= 0.0) continue;
    auto [score, gain, split_info] = impurity::evaluate(criterion, ltd, lar, rtd, rar);
    if (gain <= kMinGain) continue;
    if (!best || score > best->score + 1e-12 * std::max(1.0, std::abs(best->score)))
      best = NumericSplit{0.5 * (v + next), score, gain, split_info};
  }
  return best;
}

}  // namespace legmove
