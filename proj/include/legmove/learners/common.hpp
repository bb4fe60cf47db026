#pragma once

#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "legmove/core.hpp"

namespace legmove {

// Training rows restricted to the selected features, with per-sample weights.
struct TrainingSet {
  Matrix x;
  std::vector<Label> y;
  std::vector<double> w;

  std::size_t size() const noexcept { return y.size(); }
  std::size_t dims() const noexcept { return x.cols(); }
};

// Weights rescaled to mean 1. Learners call this so that multiplying every
// weight by a constant leaves the fit unchanged.
inline std::vector<double> normalized_weights(std::span<const double> w) {
  if (w.empty()) return {};
  double total = 0.0;
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorKind::Validation, "sample weights must be finite and >= 0");
    total += v;
  }
  if (!(total > 0.0)) throw Error(ErrorKind::Validation, "sample weights sum to zero");
  std::vector<double> out(w.begin(), w.end());
  const double scale = static_cast<double>(w.size()) / total;
  for (double& v : out) v *= scale;
  return out;
}

inline void check_training_set(const TrainingSet& t) {
  if (t.size() == 0) throw Error(ErrorKind::DegenerateDataset, "empty training set");
  if (t.x.rows() != t.size() || t.w.size() != t.size())
    throw Error(ErrorKind::Usage, "training set: rows, labels and weights differ in length");
}

inline double class_weight_sum(const TrainingSet& t, Label l) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t.y[i] == l) s += t.w[i];
  return s;
}

// Weighted majority; ties go to AR.
inline Label weighted_majority(double td, double ar) { return ar >= td ? Label::AR : Label::TD; }

// Per-column z-scoring fitted on training rows (population sd). Constant
// columns map to 0.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> sd;  // 0 marks a constant column

  static Standardizer fit(const Matrix& x) {
    Standardizer s;
    const std::size_t n = x.rows(), d = x.cols();
    s.mean.assign(d, 0.0);
    s.sd.assign(d, 0.0);
    if (n == 0) return s;
    for (std::size_t j = 0; j < d; ++j) {
      double m = 0.0;
      for (std::size_t i = 0; i < n; ++i) m += x(i, j);
      m /= static_cast<double>(n);
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) v += (x(i, j) - m) * (x(i, j) - m);
      v /= static_cast<double>(n);
      s.mean[j] = m;
      const double sd = std::sqrt(v);
      s.sd[j] = sd > 1e-12 * std::max(1.0, std::abs(m)) ? sd : 0.0;
    }
    return s;
  }

  void apply(std::span<const double> in, std::span<double> out) const {
    for (std::size_t j = 0; j < mean.size(); ++j) out[j] = sd[j] > 0.0 ? (in[j] - mean[j]) / sd[j] : 0.0;
  }

  std::vector<double> apply(std::span<const double> in) const {
    std::vector<double> out(mean.size());
    apply(in, out);
    return out;
  }

  Matrix apply(const Matrix& x) const {
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) apply(x.row(i), out.row(i));
    return out;
  }
};

}  // namespace legmove
