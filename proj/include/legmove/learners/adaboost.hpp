#pragma once

// Discrete AdaBoost over decision stumps. The initial distribution is
// proportional to the sample weights, so class balancing carries into the
// first round.

#include <cmath>
#include <vector>

#include "legmove/learners/common.hpp"
#include "legmove/learners/split.hpp"

namespace legmove {

struct AdaBoostParams {
  int n_rounds = 50;
  SplitCriterion stump_criterion = SplitCriterion::Gini;
};

// Error floor used to cap alpha on a perfect round.
inline constexpr double kMinBoostError = 1e-10;

inline double boost_alpha(double error) {
  const double e = std::max(error, kMinBoostError);
  return 0.5 * std::log((1.0 - e) / e);
}

struct Stump {
  bool constant = false;  // no split: predicts `left` everywhere
  std::size_t feature = 0;
  double threshold = 0.0;
  Label left = Label::AR;  // value <= threshold
  Label right = Label::AR;

  Label predict(std::span<const double> row) const {
    if (constant) return left;
    return row[feature] <= threshold ? left : right;
  }
  friend bool operator==(const Stump&, const Stump&) = default;
};

struct BoostRound {
  Stump stump;
  double error = 0.0;  // weighted training error under the round's distribution
  double alpha = 0.0;
  friend bool operator==(const BoostRound&, const BoostRound&) = default;
};

// Best stump across all features under distribution `dist`; ties keep the earlier feature.
inline Stump fit_stump(const TrainingSet& data, std::span<const double> dist, SplitCriterion criterion) {
  const std::size_t n = data.size();
  std::vector<double> values(n);
  std::optional<NumericSplit> best;
  std::size_t best_feature = 0;
  for (std::size_t f = 0; f < data.dims(); ++f) {
    for (std::size_t i = 0; i < n; ++i) values[i] = data.x(i, f);
    auto s = best_numeric_split(values, data.y, dist, criterion);
    if (s && (!best || s->score > best->score + 1e-12 * std::max(1.0, std::abs(best->score)))) {
      best = s;
      best_feature = f;
    }
  }
  Stump st;
  if (!best) {
    double td = 0.0, ar = 0.0;
    for (std::size_t i = 0; i < n; ++i) (data.y[i] == Label::AR ? ar : td) += dist[i];
    st.constant = true;
    st.left = st.right = weighted_majority(td, ar);
    return st;
  }
  double ltd = 0.0, lar = 0.0, rtd = 0.0, rar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool left = data.x(i, best_feature) <= best->threshold;
    const bool ar = data.y[i] == Label::AR;
    (left ? (ar ? lar : ltd) : (ar ? rar : rtd)) += dist[i];
  }
  st.feature = best_feature;
  st.threshold = best->threshold;
  st.left = weighted_majority(ltd, lar);
  st.right = weighted_majority(rtd, rar);
  return st;
}

class AdaBoostModel {
 public:
  AdaBoostModel() = default;
  explicit AdaBoostModel(std::vector<BoostRound> rounds) : rounds_(std::move(rounds)) {}

  static AdaBoostModel fit(const TrainingSet& data, const AdaBoostParams& params) {
    check_training_set(data);
    if (params.n_rounds < 1) throw Error(ErrorKind::Usage, "adaboost: n_rounds must be >= 1");
    const std::size_t n = data.size();
    std::vector<double> dist(data.w);
    double total = 0.0;
    for (double v : dist) total += v;
    for (double& v : dist) v /= total;

    std::vector<BoostRound> rounds;
    for (int t = 0; t < params.n_rounds; ++t) {
      Stump st = fit_stump(data, dist, params.stump_criterion);
      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (st.predict(data.x.row(i)) != data.y[i]) err += dist[i];
      if (err >= 0.5) {
        // No better than chance. A first-round stump is still kept so the
        // ensemble is never empty.
        if (rounds.empty()) rounds.push_back({st, err, 1.0});
        break;
      }
      const double alpha = boost_alpha(err);
      rounds.push_back({st, err, alpha});
      if (err <= 0.0) break;
      double z = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double agree = st.predict(data.x.row(i)) == data.y[i] ? 1.0 : -1.0;
        dist[i] *= std::exp(-alpha * agree);
        z += dist[i];
      }
      for (double& v : dist) v /= z;
    }
    return AdaBoostModel(std::move(rounds));
  }

  double decision(std::span<const double> row) const {
    double s = 0.0;
    for (const auto& r : rounds_) s += r.alpha * sign_of(r.stump.predict(row));
    return s;
  }

  Label predict(std::span<const double> row) const { return label_from_score(decision(row)); }

  const std::vector<BoostRound>& rounds() const noexcept { return rounds_; }

 private:
  std::vector<BoostRound> rounds_;
};

}  // namespace legmove
