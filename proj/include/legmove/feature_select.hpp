#pragma once

// Feature selection: univariate ANOVA F ranking, recursive feature elimination,
// greedy stepwise search scored by inner leave-one-out accuracy, and pruning of
// highly correlated pairs. Every selector is deterministic.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "legmove/mask.hpp"
#include "legmove/model.hpp"

namespace legmove {

inline constexpr double kInfiniteF = std::numeric_limits<double>::infinity();

// One-way ANOVA F per schema feature, schema order. Zero within-class variance
// with a between-class difference gives +infinity.
inline std::vector<double> univariate_f_scores(const Dataset& d) {
  const std::size_t n_td = d.count(Label::TD), n_ar = d.count(Label::AR);
  if (n_td < 2 || n_ar < 2)
    throw Error(ErrorKind::DegenerateDataset, "univariate F needs at least 2 samples per class (TD=" +
                                                  std::to_string(n_td) + ", AR=" + std::to_string(n_ar) + ")");
  const std::size_t n = d.size(), p = d.schema().size();
  std::vector<double> out(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    double sum_td = 0.0, sum_ar = 0.0;
    for (const auto& r : d.records()) (r.label == Label::AR ? sum_ar : sum_td) += r.features[j];
    const double m_td = sum_td / static_cast<double>(n_td), m_ar = sum_ar / static_cast<double>(n_ar);
    const double grand = (sum_td + sum_ar) / static_cast<double>(n);
    const double ssb = static_cast<double>(n_td) * (m_td - grand) * (m_td - grand) +
                       static_cast<double>(n_ar) * (m_ar - grand) * (m_ar - grand);
    double ssw = 0.0;
    for (const auto& r : d.records()) {
      const double m = r.label == Label::AR ? m_ar : m_td;
      ssw += (r.features[j] - m) * (r.features[j] - m);
    }
    const double scale = std::max({1.0, std::abs(m_td), std::abs(m_ar)});
    if (ssb <= 1e-24 * scale * scale) {
      out[j] = 0.0;
    } else if (ssw <= 1e-24 * scale * scale * static_cast<double>(n)) {
      out[j] = kInfiniteF;
    } else {
      out[j] = ssb / (ssw / static_cast<double>(n - 2));  // df1 = 1
    }
  }
  return out;
}

inline nlohmann::json score_json(double f) { return std::isinf(f) ? nlohmann::json("inf") : nlohmann::json(f); }

// Top-k features by F; ties keep the schema-earlier feature. Output in rank order.
inline FeatureMask select_univariate(const Dataset& d, std::size_t k) {
  const std::size_t p = d.schema().size();
  if (k < 1 || k > p)
    throw Error(ErrorKind::Usage, "univariate selection: k must be in [1, " + std::to_string(p) + "], got " + std::to_string(k));
  const auto f = univariate_f_scores(d);
  std::vector<std::size_t> order(p);
  for (std::size_t j = 0; j < p; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });
  FeatureMask m;
  m.method = SelectionMethod::Univariate;
  nlohmann::json scores = nlohmann::json::object();
  for (std::size_t j = 0; j < p; ++j) scores[d.schema().name(j)] = score_json(f[j]);
  for (std::size_t r = 0; r < k; ++r) m.selected.push_back(d.schema().name(order[r]));
  m.params = {{"k", k}, {"f_scores", scores}};
  return m;
}

namespace detail {

inline FeatureMask mask_of(const FeatureSchema& schema, const std::vector<std::size_t>& idx) {
  FeatureMask m;
  for (auto i : idx) m.selected.push_back(schema.name(i));
  return m;
}

inline std::vector<std::size_t> starting_features(const Dataset& d, const std::optional<FeatureMask>& start) {
  std::vector<std::size_t> idx;
  if (start) {
    idx = start->indices(d.schema());
    std::sort(idx.begin(), idx.end());
  } else {
    for (std::size_t j = 0; j < d.schema().size(); ++j) idx.push_back(j);
  }
  return idx;
}

}  // namespace detail

// Refit, drop the least important surviving feature (ties drop the
// schema-later one), repeat until k remain.
inline FeatureMask select_rfe(const Dataset& d, std::size_t k, const LearnerSpec& base,
                              const std::optional<FeatureMask>& start = std::nullopt) {
  if (!supports_importances(base))
    throw Error(ErrorKind::Unsupported, "RFE: learner " + std::string(to_string(base.family())) +
                                            (base.family() == Family::SVM ? " with a non-linear kernel" : "") +
                                            " has no feature importances");
  auto surviving = detail::starting_features(d, start);
  if (k < 1 || k > surviving.size())
    throw Error(ErrorKind::Usage, "RFE: k must be in [1, " + std::to_string(surviving.size()) + "], got " + std::to_string(k));
  std::vector<std::string> eliminated;
  while (surviving.size() > k) {
    const Model m = fit(d, detail::mask_of(d.schema(), surviving), base);
    const auto imp = *m.importances();
    std::size_t worst = 0;
    for (std::size_t i = 1; i < imp.size(); ++i)
      if (imp[i] <= imp[worst]) worst = i;
    eliminated.push_back(d.schema().name(surviving[worst]));
    surviving.erase(surviving.begin() + static_cast<std::ptrdiff_t>(worst));
  }
  FeatureMask out = detail::mask_of(d.schema(), surviving);
  out.method = SelectionMethod::RFE;
  out.seed = base.seed();
  out.params = {{"k", k}, {"base", to_json(base)}, {"elimination_order", eliminated}};
  return out;
}

enum class StepDirection { Forward, Backward };

inline std::string_view to_string(StepDirection s) { return s == StepDirection::Forward ? "forward" : "backward"; }

// Leave-one-out accuracy of `spec` on `mask`, each record weighted by the
// dataset's balanced class weight. Throws DegenerateDataset if a training fold
// loses a class.
inline double inner_loocv_weighted_accuracy(const Dataset& d, const FeatureMask& mask, const LearnerSpec& spec) {
  const ClassWeights cw = balanced_class_weights(d);
  double hit = 0.0, total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Dataset train = d.without(i);
    const Model m = fit(train, mask, spec);
    const double w = cw.of(d[i].label);
    total += w;
    if (m.predict(d, i) == d[i].label) hit += w;
  }
  return hit / total;
}

inline constexpr double kStepwiseTolerance = 1e-9;

// Greedy stepwise search. Forward adds the candidate with the best inner-LOOCV
// weighted accuracy while it improves the score by more than the tolerance.
// Backward removes the candidate whose removal scores best as long as the score
// does not drop by more than the tolerance, never going below one feature.
// Candidates whose inner folds cannot be fitted are skipped with a warning.
inline FeatureMask select_stepwise(const Dataset& d, const LearnerSpec& base, StepDirection direction,
                                   const std::optional<FeatureMask>& start = std::nullopt) {
  if (d.count(Label::TD) < 3 || d.count(Label::AR) < 3)
    throw Error(ErrorKind::DegenerateDataset, "stepwise selection needs at least 3 samples per class");
  const auto& schema = d.schema();
  const auto pool = detail::starting_features(d, start);
  std::vector<std::string> warnings;
  nlohmann::json history = nlohmann::json::array();

  auto score = [&](const std::vector<std::size_t>& idx) -> std::optional<double> {
    try {
      return inner_loocv_weighted_accuracy(d, detail::mask_of(schema, idx), base);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateDataset && e.kind() != ErrorKind::Convergence) throw;
      std::string names;
      for (auto i : idx) names += (names.empty() ? "" : "+") + schema.name(i);
      warnings.push_back("skipped {" + names + "}: " + e.what());
      return std::nullopt;
    }
  };

  std::vector<std::size_t> current;
  double current_score = -std::numeric_limits<double>::infinity();
  if (direction == StepDirection::Forward) {
    std::vector<std::size_t> remaining = pool;
    while (!remaining.empty()) {
      std::optional<double> best;
      std::size_t best_pos = 0;
      for (std::size_t c = 0; c < remaining.size(); ++c) {
        auto trial = current;
        trial.push_back(remaining[c]);
        std::sort(trial.begin(), trial.end());
        auto s = score(trial);
        if (s && (!best || *s > *best)) {
          best = s;
          best_pos = c;
        }
      }
      if (!best || !(*best > current_score + kStepwiseTolerance)) break;
      current.push_back(remaining[best_pos]);
      std::sort(current.begin(), current.end());
      history.push_back({{"added", schema.name(remaining[best_pos])}, {"score", *best}});
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_pos));
      current_score = *best;
    }
    if (current.empty()) throw Error(ErrorKind::DegenerateDataset, "stepwise selection: no candidate could be scored");
  } else {
    current = pool;
    auto s0 = score(current);
    if (!s0) throw Error(ErrorKind::DegenerateDataset, "stepwise selection: starting mask could not be scored");
    current_score = *s0;
    while (current.size() > 1) {
      std::optional<double> best;
      std::size_t best_pos = 0;
      for (std::size_t c = 0; c < current.size(); ++c) {
        auto trial = current;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(c));
        auto s = score(trial);
        if (s && (!best || *s > *best)) {
          best = s;
          best_pos = c;
        }
      }
      if (!best || *best < current_score - kStepwiseTolerance) break;
      history.push_back({{"removed", schema.name(current[best_pos])}, {"score", *best}});
      current.erase(current.begin() + static_cast<std::ptrdiff_t>(best_pos));
      current_score = *best;
    }
  }

  FeatureMask out = detail::mask_of(schema, current);
  out.method = SelectionMethod::Stepwise;
  out.seed = base.seed();
  out.params = {{"direction", std::string(to_string(direction))},
                {"base", to_json(base)},
                {"score", current_score},
                {"history", history},
                {"warnings", warnings}};
  return out;
}

// Pearson correlation of two schema columns; 0 if either is constant.
inline double pearson(const Dataset& d, std::size_t a, std::size_t b) {
  const double n = static_cast<double>(d.size());
  double ma = 0.0, mb = 0.0;
  for (const auto& r : d.records()) {
    ma += r.features[a];
    mb += r.features[b];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (const auto& r : d.records()) {
    const double x = r.features[a] - ma, y = r.features[b] - mb;
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  const double scale_a = std::max(1.0, ma * ma) * n, scale_b = std::max(1.0, mb * mb) * n;
  if (saa <= 1e-24 * scale_a || sbb <= 1e-24 * scale_b) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

// Repeatedly takes the most correlated pair above `threshold` and drops the
// member with the lower F (ties drop the schema-later one).
inline FeatureMask prune_correlated(const Dataset& d, const FeatureMask& mask, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw Error(ErrorKind::Usage, "correlation threshold must be in (0, 1], got " + format_double(threshold));
  const auto f = univariate_f_scores(d);
  auto idx = mask.indices(d.schema());
  std::vector<std::string> dropped;
  for (;;) {
    double worst = threshold;
    std::optional<std::pair<std::size_t, std::size_t>> pair;
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        const double r = std::abs(pearson(d, idx[a], idx[b]));
        if (r > worst) {
          worst = r;
          pair = {a, b};
        }
      }
    if (!pair) break;
    const std::size_t ia = idx[pair->first], ib = idx[pair->second];
    std::size_t drop_pos;
    if (f[ia] != f[ib])
      drop_pos = f[ia] < f[ib] ? pair->first : pair->second;
    else
      drop_pos = ia > ib ? pair->first : pair->second;
    dropped.push_back(d.schema().name(idx[drop_pos]));
    idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(drop_pos));
  }
  FeatureMask out = mask;
  out.selected.clear();
  for (auto i : idx) out.selected.push_back(d.schema().name(i));
  out.params["corr_threshold"] = threshold;
  out.params["corr_dropped"] = dropped;
  return out;
}

// A selector run: method, its parameters, and the correlation pruning applied
// afterwards (threshold 1 keeps everything but exact duplicates).
struct SelectorConfig {
  SelectionMethod method = SelectionMethod::Univariate;
  std::size_t k = 8;
  double corr_threshold = 0.9;
  LearnerSpec base = LearnerSpec(Family::LogisticRegression);
  StepDirection direction = StepDirection::Forward;
};

inline nlohmann::json to_json(const SelectorConfig& c) {
  return {{"method", std::string(to_string(c.method))},
          {"k", c.k},
          {"corr_threshold", c.corr_threshold},
          {"base", to_json(c.base)},
          {"direction", std::string(to_string(c.direction))}};
}

inline FeatureMask run_selector(const Dataset& d, const SelectorConfig& c) {
  FeatureMask m;
  switch (c.method) {
    case SelectionMethod::Univariate: m = select_univariate(d, std::min(c.k, d.schema().size())); break;
    case SelectionMethod::RFE: m = select_rfe(d, std::min(c.k, d.schema().size()), c.base); break;
    case SelectionMethod::Stepwise: m = select_stepwise(d, c.base, c.direction); break;
    case SelectionMethod::Manual: m = FeatureMask::all(d.schema()); break;
  }
  return prune_correlated(d, m, c.corr_threshold);
}

// The eight-feature set used for the 0-6 month models: mean and peak
// acceleration, unilateral percentage and movement rate for each leg.
inline FeatureMask infant_0_6_mask() {
  FeatureMask m;
  m.method = SelectionMethod::Manual;
  for (const char* leg : {"L", "R"})
    for (const char* base : {"movements_per_awake_hour", "pct_unilateral", "mean_avg_accel", "mean_peak_accel"})
      m.selected.push_back(std::string(base) + "_" + leg);
  return m;
}

}  // namespace legmove
