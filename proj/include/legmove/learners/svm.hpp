#pragma once

// Soft-margin SVM trained by sequential minimal optimization on the dual
//
//   min_a  1/2 a'Qa - e'a   s.t.  y'a = 0,  0 <= a_i <= C_i,
//
// with Q_ij = y_i y_j K(x_i, x_j) and C_i = C * w_i. Working pairs are chosen
// by maximal violation with second-order selection of the partner.

#include <cmath>
#include <limits>
#include <vector>

#include "legmove/learners/common.hpp"

namespace legmove {

enum class KernelType { Linear, Rbf };

inline std::string_view to_string(KernelType k) { return k == KernelType::Rbf ? "rbf" : "linear"; }

struct SvmParams {
  double c = 1.0;
  KernelType kernel = KernelType::Rbf;
  double gamma = 0.0;  // <= 0 means 1/d
  double tol = 1e-3;
  int max_passes = 10000;  // iteration cap is max_passes * n
};

struct Kernel {
  KernelType type = KernelType::Linear;
  double gamma = 1.0;

  double operator()(std::span<const double> a, std::span<const double> b) const {
    if (type == KernelType::Linear) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
      return s;
    }
    double d2 = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
    return std::exp(-gamma * d2);
  }
};

class SvmModel {
 public:
  SvmModel() = default;
  SvmModel(Standardizer scale, Kernel kernel, Matrix support, std::vector<double> alpha, std::vector<Label> labels,
           std::vector<double> upper, double bias, int iterations)
      : scale_(std::move(scale)),
        kernel_(kernel),
        rows_(std::move(support)),
        alpha_(std::move(alpha)),
        labels_(std::move(labels)),
        upper_(std::move(upper)),
        bias_(bias),
        iterations_(iterations) {}

  static SvmModel fit(const TrainingSet& data, const SvmParams& params) {
    check_training_set(data);
    if (!(params.c > 0.0)) throw Error(ErrorKind::Usage, "svm: C must be > 0");
    if (!(params.tol > 0.0)) throw Error(ErrorKind::Usage, "svm: tol must be > 0");
    const std::size_t n = data.size();
    bool has_td = false, has_ar = false;
    for (auto l : data.y) (l == Label::AR ? has_ar : has_td) = true;
    if (!has_td || !has_ar) throw Error(ErrorKind::DegenerateDataset, "svm: training data has a single class");

    Standardizer scale = Standardizer::fit(data.x);
    Matrix z = scale.apply(data.x);
    Kernel kernel{params.kernel, params.gamma > 0.0 ? params.gamma : 1.0 / static_cast<double>(std::max<std::size_t>(1, data.dims()))};

    std::vector<double> y(n), cap(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = sign_of(data.y[i]);
      cap[i] = params.c * data.w[i];
    }
    std::vector<double> q(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) q[i * n + j] = q[j * n + i] = y[i] * y[j] * kernel(z.row(i), z.row(j));

    std::vector<double> alpha(n, 0.0), grad(n, -1.0);
    auto in_up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < cap[t]) || (y[t] < 0 && alpha[t] > 0); };
    auto in_low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < cap[t]); };
    constexpr double kTau = 1e-12;
    const long max_iter = static_cast<long>(params.max_passes) * static_cast<long>(std::max<std::size_t>(n, 1));

    long iter = 0;
    double violation = 0.0;
    for (;; ++iter) {
      double gmax = -std::numeric_limits<double>::infinity();
      std::ptrdiff_t i_sel = -1;
      for (std::size_t t = 0; t < n; ++t)
        if (in_up(t) && -y[t] * grad[t] > gmax) {
          i_sel = static_cast<std::ptrdiff_t>(t);
          gmax = -y[t] * grad[t];
        }
      double gmax2 = -std::numeric_limits<double>::infinity();
      std::ptrdiff_t j_sel = -1;
      double obj_min = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < n; ++t) {
        if (!in_low(t)) continue;
        gmax2 = std::max(gmax2, y[t] * grad[t]);
        if (i_sel < 0) continue;
        const double b = gmax + y[t] * grad[t];
        if (b > 0.0) {
          const auto i = static_cast<std::size_t>(i_sel);
          double a = q[i * n + i] + q[t * n + t] - 2.0 * y[i] * y[t] * q[i * n + t];
          if (a <= 0.0) a = kTau;
          if (-(b * b) / a < obj_min) {
            obj_min = -(b * b) / a;
            j_sel = static_cast<std::ptrdiff_t>(t);
          }
        }
      }
      violation = gmax + gmax2;
      if (violation < params.tol || i_sel < 0 || j_sel < 0) break;
      if (iter >= max_iter) {
        std::size_t violators = 0;
        for (std::size_t t = 0; t < n; ++t)
          if ((in_up(t) && -y[t] * grad[t] > -gmax2 + params.tol) || (in_low(t) && -y[t] * grad[t] < gmax - params.tol))
            ++violators;
        throw Error(ErrorKind::Convergence, "svm: SMO did not converge after " + std::to_string(iter) +
                                                " iterations (" + std::to_string(violators) +
                                                " KKT violators, max violation " + format_double(violation) + ")");
      }
      const auto i = static_cast<std::size_t>(i_sel), j = static_cast<std::size_t>(j_sel);
      const double ci = cap[i], cj = cap[j];
      const double old_ai = alpha[i], old_aj = alpha[j];
      if (y[i] != y[j]) {
        double quad = q[i * n + i] + q[j * n + j] + 2.0 * q[i * n + j];
        if (quad <= 0.0) quad = kTau;
        const double delta = (-grad[i] - grad[j]) / quad;
        const double diff = alpha[i] - alpha[j];
        alpha[i] += delta;
        alpha[j] += delta;
        if (diff > 0.0) {
          if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
        } else {
          if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = -diff; }
        }
        if (diff > ci - cj) {
          if (alpha[i] > ci) { alpha[i] = ci; alpha[j] = ci - diff; }
        } else {
          if (alpha[j] > cj) { alpha[j] = cj; alpha[i] = cj + diff; }
        }
      } else {
        double quad = q[i * n + i] + q[j * n + j] - 2.0 * q[i * n + j];
        if (quad <= 0.0) quad = kTau;
        const double delta = (grad[i] - grad[j]) / quad;
        const double sum = alpha[i] + alpha[j];
        alpha[i] -= delta;
        alpha[j] += delta;
        if (sum > ci) {
          if (alpha[i] > ci) { alpha[i] = ci; alpha[j] = sum - ci; }
        } else {
          if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = sum; }
        }
        if (sum > cj) {
          if (alpha[j] > cj) { alpha[j] = cj; alpha[i] = sum - cj; }
        } else {
          if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = sum; }
        }
      }
      const double dai = alpha[i] - old_ai, daj = alpha[j] - old_aj;
      for (std::size_t t = 0; t < n; ++t) grad[t] += q[t * n + i] * dai + q[t * n + j] * daj;
    }

    // Offset: mean of y_i G_i over free variables, else midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const double yg = y[t] * grad[t];
      const bool at_upper = alpha[t] >= cap[t];
      const bool at_lower = alpha[t] <= 0.0;
      if (at_upper) {
        if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else if (at_lower) {
        if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else {
        ++n_free;
        sum_free += yg;
      }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

    std::vector<double> a_out(alpha.begin(), alpha.end());
    return SvmModel(std::move(scale), kernel, std::move(z), std::move(a_out), data.y, std::move(cap), -rho,
                    static_cast<int>(iter));
  }

  // Decision value on a raw (unstandardized) row.
  double decision(std::span<const double> row) const {
    const auto z = scale_.apply(row);
    return decision_standardized(z);
  }

  double decision_standardized(std::span<const double> z) const {
    double s = bias_;
    for (std::size_t i = 0; i < alpha_.size(); ++i)
      if (alpha_[i] > 0.0) s += alpha_[i] * sign_of(labels_[i]) * kernel_(rows_.row(i), z);
    return s;
  }

  // Zero decision goes to AR.
  Label predict(std::span<const double> row) const { return label_from_score(decision(row)); }

  // Weight vector and offset on raw feature values; linear kernel only.
  std::pair<std::vector<double>, double> raw_linear_weights() const {
    if (kernel_.type != KernelType::Linear) throw Error(ErrorKind::Unsupported, "svm: weights need a linear kernel");
    const auto ws = standardized_weights();
    std::vector<double> w(ws.size(), 0.0);
    double b = bias_;
    for (std::size_t j = 0; j < ws.size(); ++j) {
      if (scale_.sd[j] <= 0.0) continue;
      w[j] = ws[j] / scale_.sd[j];
      b -= ws[j] * scale_.mean[j] / scale_.sd[j];
    }
    return {w, b};
  }

  std::vector<double> standardized_weights() const {
    std::vector<double> w(rows_.cols(), 0.0);
    for (std::size_t i = 0; i < alpha_.size(); ++i)
      for (std::size_t j = 0; j < rows_.cols(); ++j) w[j] += alpha_[i] * sign_of(labels_[i]) * rows_(i, j);
    return w;
  }

  std::vector<double> importances() const {
    auto w = standardized_weights();
    for (double& v : w) v = std::abs(v);
    return w;
  }

  const Standardizer& standardizer() const noexcept { return scale_; }
  const Kernel& kernel() const noexcept { return kernel_; }
  const Matrix& training_rows() const noexcept { return rows_; }  // standardized
  const std::vector<double>& alpha() const noexcept { return alpha_; }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  const std::vector<double>& upper_bounds() const noexcept { return upper_; }
  double bias() const noexcept { return bias_; }
  int iterations() const noexcept { return iterations_; }

 private:
  Standardizer scale_;
  Kernel kernel_;
  Matrix rows_;
  std::vector<double> alpha_;
  std::vector<Label> labels_;
  std::vector<double> upper_;
  double bias_ = 0.0;
  int iterations_ = 0;
};

}  // namespace legmove
