#pragma once

#include <cmath>
#include <vector>

#include "legmove/learners/common.hpp"

namespace legmove {

struct LogisticParams {
  double l2_lambda = 1.0;
  int max_iter = 100;
  double tol = 1e-10;
};

namespace linalg {

// Solves a * x = b in place for a small symmetric positive (semi)definite
// matrix by Gaussian elimination with partial pivoting. Returns false when
// the matrix is numerically singular.
inline bool solve(std::vector<double> a, std::vector<double>& b, std::size_t n) {
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (std::abs(a[piv * n + c]) < 1e-14) return false;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    double s = b[c];
    for (std::size_t k = c + 1; k < n; ++k) s -= a[c * n + k] * b[k];
    b[c] = s / a[c * n + c];
  }
  return true;
}

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace linalg

// log(1 + exp(t)) without overflow.
inline double log1p_exp(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// Weighted negative log-likelihood plus (lambda/2)|beta|^2 over parameters
// theta = (intercept, beta...). Labels enter as y = +1 (AR) / -1 (TD).
struct LogisticObjective {
  const Matrix& x;
  std::span<const Label> y;
  std::span<const double> w;
  double lambda;

  std::size_t dims() const { return x.cols() + 1; }

  double margin(std::span<const double> theta, std::size_t i) const {
    double z = theta[0];
    for (std::size_t j = 0; j < x.cols(); ++j) z += theta[j + 1] * x(i, j);
    return z;
  }

  double value(std::span<const double> theta) const {
    double f = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) f += w[i] * log1p_exp(-sign_of(y[i]) * margin(theta, i));
    for (std::size_t j = 1; j < theta.size(); ++j) f += 0.5 * lambda * theta[j] * theta[j];
    return f;
  }

  std::vector<double> gradient(std::span<const double> theta) const {
    std::vector<double> g(dims(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const double yi = sign_of(y[i]);
      const double r = -yi * w[i] * sigmoid(-yi * margin(theta, i));
      g[0] += r;
      for (std::size_t j = 0; j < x.cols(); ++j) g[j + 1] += r * x(i, j);
    }
    for (std::size_t j = 1; j < dims(); ++j) g[j] += lambda * theta[j];
    return g;
  }

  // Row-major (dims x dims).
  std::vector<double> hessian(std::span<const double> theta) const {
    const std::size_t p = dims();
    std::vector<double> h(p * p, 0.0);
    std::vector<double> row(p);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const double s = sigmoid(margin(theta, i));
      const double c = w[i] * s * (1.0 - s);
      row[0] = 1.0;
      for (std::size_t j = 0; j < x.cols(); ++j) row[j + 1] = x(i, j);
      for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = 0; b < p; ++b) h[a * p + b] += c * row[a] * row[b];
    }
    for (std::size_t j = 1; j < p; ++j) h[j * p + j] += lambda;
    return h;
  }
};

class LogisticModel {
 public:
  LogisticModel() = default;
  LogisticModel(Standardizer scale, double intercept, std::vector<double> coef)
      : scale_(std::move(scale)), intercept_(intercept), coef_(std::move(coef)) {}

  // Minimizes the objective in standardized coordinates by damped Newton.
  // Constant columns keep a zero coefficient.
  static LogisticModel fit(const TrainingSet& data, const LogisticParams& params) {
    check_training_set(data);
    if (!(params.l2_lambda >= 0.0)) throw Error(ErrorKind::Usage, "logistic regression: l2_lambda must be >= 0");
    Standardizer scale = Standardizer::fit(data.x);

    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < data.dims(); ++j)
      if (scale.sd[j] > 0.0) active.push_back(j);
    const Matrix z_all = scale.apply(data.x);
    Matrix z(data.size(), active.size());
    for (std::size_t i = 0; i < data.size(); ++i)
      for (std::size_t k = 0; k < active.size(); ++k) z(i, k) = z_all(i, active[k]);

    LogisticObjective obj{z, data.y, data.w, params.l2_lambda};
    std::vector<double> theta(obj.dims(), 0.0);
    double fval = obj.value(theta);
    // The objective sums over records, so the gradient tolerance scales with total weight.
    double total_weight = 0.0;
    for (double v : data.w) total_weight += v;
    const double gtol = params.tol * std::max(1.0, total_weight);
    double gnorm = 0.0;
    bool converged = false;
    for (int it = 0; it <= params.max_iter; ++it) {
      auto g = obj.gradient(theta);
      gnorm = linalg::norm2(g);
      if (gnorm <= gtol) {
        converged = true;
        break;
      }
      if (it == params.max_iter) break;
      std::vector<double> step = g;
      if (!linalg::solve(obj.hessian(theta), step, obj.dims())) step = g;  // steepest descent fallback
      double slope = 0.0;
      for (std::size_t k = 0; k < step.size(); ++k) slope += g[k] * step[k];
      if (!(slope > 0.0)) {
        step = g;
        slope = gnorm * gnorm;
      }
      std::vector<double> trial(theta.size());
      if (slope <= 1e-10 * std::max(1.0, std::abs(fval))) {
        // Predicted decrease is below the rounding noise of the objective: take the full step.
        for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= step[k];
        fval = obj.value(theta);
        continue;
      }
      double t = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        for (std::size_t k = 0; k < theta.size(); ++k) trial[k] = theta[k] - t * step[k];
        const double ft = obj.value(trial);
        if (ft <= fval - 1e-4 * t * slope) {
          theta = trial;
          fval = ft;
          moved = true;
          break;
        }
        t *= 0.5;
      }
      if (!moved) {
        // No decrease is representable: converged when the Newton decrement is at rounding level.
        converged = slope <= 1e-12 * std::max(1.0, std::abs(fval));
        break;
      }
    }
    if (!converged)
      throw Error(ErrorKind::Convergence, "logistic regression did not converge in " + std::to_string(params.max_iter) +
                                              " iterations (gradient norm " + format_double(gnorm) + ")");
    std::vector<double> coef(data.dims(), 0.0);
    for (std::size_t k = 0; k < active.size(); ++k) coef[active[k]] = theta[k + 1];
    return LogisticModel(std::move(scale), theta[0], std::move(coef));
  }

  double decision(std::span<const double> row) const {
    double z = intercept_;
    for (std::size_t j = 0; j < coef_.size(); ++j)
      if (scale_.sd[j] > 0.0) z += coef_[j] * (row[j] - scale_.mean[j]) / scale_.sd[j];
    return z;
  }

  double probability_ar(std::span<const double> row) const { return sigmoid(decision(row)); }

  // p >= 0.5 is AR.
  Label predict(std::span<const double> row) const { return label_from_score(decision(row)); }

  // Standardized-space parameters.
  double intercept() const noexcept { return intercept_; }
  const std::vector<double>& coefficients() const noexcept { return coef_; }
  const Standardizer& standardizer() const noexcept { return scale_; }

  // The same decision function expressed on raw feature values.
  std::pair<std::vector<double>, double> raw_coefficients() const {
    std::vector<double> w(coef_.size(), 0.0);
    double b = intercept_;
    for (std::size_t j = 0; j < coef_.size(); ++j) {
      if (scale_.sd[j] <= 0.0) continue;
      w[j] = coef_[j] / scale_.sd[j];
      b -= coef_[j] * scale_.mean[j] / scale_.sd[j];
    }
    return {w, b};
  }

  std::vector<double> importances() const {
    std::vector<double> out(coef_.size());
    for (std::size_t j = 0; j < coef_.size(); ++j) out[j] = std::abs(coef_[j]);
    return out;
  }

 private:
  Standardizer scale_;
  double intercept_ = 0.0;
  std::vector<double> coef_;
};

}  // namespace legmove
