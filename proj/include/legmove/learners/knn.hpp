#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "legmove/learners/common.hpp"

namespace legmove {

struct KnnParams {
  std::size_t k = 5;
};

// Weighted k-nearest-neighbour vote in standardized Euclidean space. Training
// points tied with the k-th distance all vote; label ties go to AR.
class KnnModel {
 public:
  KnnModel() = default;
  KnnModel(Standardizer scale, Matrix rows, std::vector<Label> labels, std::vector<double> weights, std::size_t k)
      : scale_(std::move(scale)), rows_(std::move(rows)), labels_(std::move(labels)), weights_(std::move(weights)), k_(k) {}

  static KnnModel fit(const TrainingSet& data, const KnnParams& params) {
    check_training_set(data);
    if (params.k < 1 || params.k > data.size())
      throw Error(ErrorKind::Usage, "knn: k must be in [1, " + std::to_string(data.size()) + "], got " +
                                        std::to_string(params.k));
    Standardizer scale = Standardizer::fit(data.x);
    Matrix z = scale.apply(data.x);
    return KnnModel(std::move(scale), std::move(z), data.y, data.w, params.k);
  }

  // Indices of the voting neighbours, nearest first.
  std::vector<std::size_t> neighbours(std::span<const double> row) const {
    const auto z = scale_.apply(row);
    const std::size_t n = labels_.size();
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < z.size(); ++j) s += (rows_(i, j) - z[j]) * (rows_(i, j) - z[j]);
      dist[i] = s;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
    const double kth = dist[order[k_ - 1]];
    std::size_t m = k_;
    while (m < n && dist[order[m]] <= kth) ++m;
    order.resize(m);
    return order;
  }

  Label predict(std::span<const double> row) const {
    double td = 0.0, ar = 0.0;
    for (auto i : neighbours(row)) (labels_[i] == Label::AR ? ar : td) += weights_[i];
    return weighted_majority(td, ar);
  }

  std::size_t k() const noexcept { return k_; }
  const Standardizer& standardizer() const noexcept { return scale_; }
  const Matrix& training_rows() const noexcept { return rows_; }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

 private:
  Standardizer scale_;
  Matrix rows_;
  std::vector<Label> labels_;
  std::vector<double> weights_;
  std::size_t k_ = 1;
};

}  // namespace legmove
