#pragma once

// Leave-one-out cross-validation, the per-class / averaged metric table, and
// the weighted-random baseline.

#include <cstdio>
#include <exception>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "json.hpp"
#include "legmove/feature_select.hpp"
#include "legmove/model.hpp"

namespace legmove {

// Rows are the true class; td_wrong counts TD records predicted AR.
struct ConfusionMatrix {
  std::size_t td_correct = 0;
  std::size_t td_wrong = 0;
  std::size_t ar_correct = 0;
  std::size_t ar_wrong = 0;

  std::size_t n_td() const noexcept { return td_correct + td_wrong; }
  std::size_t n_ar() const noexcept { return ar_correct + ar_wrong; }
  std::size_t total() const noexcept { return n_td() + n_ar(); }

  void add(Label actual, Label predicted) {
    if (actual == Label::TD)
      (predicted == Label::TD ? td_correct : td_wrong)++;
    else
      (predicted == Label::AR ? ar_correct : ar_wrong)++;
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct MetricRow {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  friend bool operator==(const MetricRow&, const MetricRow&) = default;
};

struct FoldPrediction {
  std::string record_id;
  Label predicted = Label::AR;
  Label actual = Label::AR;
  std::vector<Label> votes;  // member predictions, ensembles only
  friend bool operator==(const FoldPrediction&, const FoldPrediction&) = default;
};

struct EvalReport {
  std::string mode;  // what produced the report, e.g. "loocv/mask_fixed"
  ConfusionMatrix confusion;
  MetricRow td_row;
  MetricRow ar_row;
  MetricRow average_row;
  bool td_present = true;
  bool ar_present = true;
  std::vector<FoldPrediction> predictions;
  std::vector<std::string> flags;
  std::size_t skipped_folds = 0;
  std::size_t runs = 1;  // > 1 for averaged baseline reports
  std::vector<ConfusionMatrix> run_confusions;

  const MetricRow& row(Label l) const { return l == Label::AR ? ar_row : td_row; }
  double accuracy() const noexcept { return average_row.accuracy; }
};

inline std::string record_id(const SampleRecord& r) { return r.infant_id + "#" + std::to_string(r.visit_index); }

// Class rows: per-class accuracy is class recall; precision with a zero
// denominator is 0 and flagged. The average row weights class rows by class size.
inline EvalReport compute_report(const ConfusionMatrix& c) {
  if (c.total() == 0) throw Error(ErrorKind::Validation, "cannot report on an empty confusion matrix");
  EvalReport r;
  r.confusion = c;
  r.td_present = c.n_td() > 0;
  r.ar_present = c.n_ar() > 0;

  auto ratio = [](std::size_t num, std::size_t den) { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); };
  auto make_row = [&](std::size_t tp, std::size_t fn, std::size_t fp, std::string_view cls) {
    MetricRow m;
    m.recall = ratio(tp, tp + fn);
    m.accuracy = m.recall;
    if (tp + fp == 0) r.flags.push_back("precision(" + std::string(cls) + ") undefined: no " + std::string(cls) + " predictions; reported as 0");
    m.precision = ratio(tp, tp + fp);
    m.f1 = ratio(2 * tp, 2 * tp + fp + fn);
    return m;
  };
  r.td_row = make_row(c.td_correct, c.td_wrong, c.ar_wrong, "TD");
  r.ar_row = make_row(c.ar_correct, c.ar_wrong, c.td_wrong, "AR");
  if (!r.td_present) r.flags.push_back("class TD absent");
  if (!r.ar_present) r.flags.push_back("class AR absent");

  const double n = static_cast<double>(c.total());
  const double wt = static_cast<double>(c.n_td()) / n, wa = static_cast<double>(c.n_ar()) / n;
  r.average_row.accuracy = static_cast<double>(c.td_correct + c.ar_correct) / n;
  r.average_row.precision = wt * r.td_row.precision + wa * r.ar_row.precision;
  r.average_row.recall = wt * r.td_row.recall + wa * r.ar_row.recall;
  r.average_row.f1 = wt * r.td_row.f1 + wa * r.ar_row.f1;
  return r;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers. Exceptions are
// collected and the one from the lowest index is rethrown.
inline void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct FoldOutcome {
  Label predicted = Label::AR;
  std::vector<Label> votes;
};

// Produces the label for the held-out record given the fold's training set.
using FoldPredictor = std::function<FoldOutcome(const Dataset& train, const SampleRecord& held_out, const FeatureSchema& schema)>;

// Leave-one-out driver. Folds run in canonical record order; a fold whose
// training set is single-class is skipped and flagged.
inline EvalReport loocv_with(const Dataset& d, const FoldPredictor& predictor, const std::string& mode, std::size_t threads = 1) {
  if (d.size() < 3) throw Error(ErrorKind::DegenerateDataset, "LOOCV needs at least 3 records");
  if (d.count(Label::TD) == 0 || d.count(Label::AR) == 0)
    throw Error(ErrorKind::DegenerateDataset, "LOOCV needs both classes present");
  const auto order = d.canonical_order();
  std::vector<std::optional<FoldOutcome>> predicted(order.size());
  std::vector<std::string> skip_reason(order.size());
  parallel_for(order.size(), threads, [&](std::size_t k) {
    const std::size_t i = order[k];
    const Dataset train = d.without(i);
    if (train.count(Label::TD) == 0 || train.count(Label::AR) == 0) {
      skip_reason[k] = "fold " + record_id(d[i]) + " skipped: single-class training set";
      return;
    }
    try {
      predicted[k] = predictor(train, d[i], d.schema());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateDataset) throw;
      skip_reason[k] = "fold " + record_id(d[i]) + " skipped: " + e.what();
    }
  });

  ConfusionMatrix c;
  std::vector<FoldPrediction> preds;
  std::vector<std::string> flags;
  std::size_t skipped = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& rec = d[order[k]];
    if (!predicted[k]) {
      ++skipped;
      flags.push_back(skip_reason[k]);
      continue;
    }
    c.add(rec.label, predicted[k]->predicted);
    preds.push_back({record_id(rec), predicted[k]->predicted, rec.label, predicted[k]->votes});
  }
  if (c.total() == 0) throw Error(ErrorKind::DegenerateDataset, "LOOCV: every fold was skipped");
  EvalReport r = compute_report(c);
  r.mode = mode;
  r.predictions = std::move(preds);
  r.skipped_folds = skipped;
  r.flags.insert(r.flags.end(), flags.begin(), flags.end());
  return r;
}

struct MaskFixed {};
struct SelectPerFold {
  SelectorConfig selector;
};
using SelectionMode = std::variant<MaskFixed, SelectPerFold>;

inline std::string mode_name(const SelectionMode& m) {
  return std::holds_alternative<MaskFixed>(m) ? "mask_fixed" : "select_per_fold";
}

// Each fold refits `spec` with balanced class weights recomputed on the fold.
// With SelectPerFold the feature selector also reruns on every training fold.
inline EvalReport loocv(const Dataset& d, const FeatureMask& mask, const LearnerSpec& spec,
                        const SelectionMode& selection = MaskFixed{}, std::size_t threads = 1) {
  FoldPredictor predictor = [&](const Dataset& train, const SampleRecord& held, const FeatureSchema& schema) {
    if (auto per_fold = std::get_if<SelectPerFold>(&selection)) {
      const FeatureMask fold_mask = run_selector(train, per_fold->selector);
      return FoldOutcome{fit(train, fold_mask, spec).predict(schema, held.features), {}};
    }
    return FoldOutcome{fit(train, mask, spec).predict(schema, held.features), {}};
  };
  return loocv_with(d, predictor, "loocv/" + mode_name(selection), threads);
}

// `runs` rounds of predicting every record by sampling the empirical class
// prior; the metric rows are averaged over rounds. Round r draws from stream
// mix_seed(seed, r).
inline EvalReport weighted_random_baseline(const Dataset& d, std::size_t runs, std::uint64_t seed) {
  if (runs < 1) throw Error(ErrorKind::Usage, "baseline needs runs >= 1");
  if (d.empty()) throw Error(ErrorKind::DegenerateDataset, "baseline on an empty dataset");
  const double p_td = static_cast<double>(d.count(Label::TD)) / static_cast<double>(d.size());
  const auto order = d.canonical_order();

  EvalReport avg;
  avg.mode = "baseline/weighted_random";
  avg.runs = runs;
  MetricRow td{}, ar{}, mean{};
  for (std::size_t run = 0; run < runs; ++run) {
    Rng rng(mix_seed(seed, run));
    ConfusionMatrix c;
    std::vector<FoldPrediction> preds;
    for (auto i : order) {
      const Label guess = rng.uniform() < p_td ? Label::TD : Label::AR;
      c.add(d[i].label, guess);
      if (run == 0) preds.push_back({record_id(d[i]), guess, d[i].label, {}});
    }
    const EvalReport r = compute_report(c);
    auto accumulate = [](MetricRow& into, const MetricRow& x) {
      into.accuracy += x.accuracy;
      into.precision += x.precision;
      into.recall += x.recall;
      into.f1 += x.f1;
    };
    accumulate(td, r.td_row);
    accumulate(ar, r.ar_row);
    accumulate(mean, r.average_row);
    avg.run_confusions.push_back(c);
    if (run == 0) {
      avg.confusion = c;
      avg.predictions = std::move(preds);
      avg.td_present = r.td_present;
      avg.ar_present = r.ar_present;
    }
    for (const auto& f : r.flags)
      if (std::find(avg.flags.begin(), avg.flags.end(), f) == avg.flags.end()) avg.flags.push_back(f);
  }
  auto divide = [&](MetricRow m) {
    const double k = static_cast<double>(runs);
    return MetricRow{m.accuracy / k, m.precision / k, m.recall / k, m.f1 / k};
  };
  avg.td_row = divide(td);
  avg.ar_row = divide(ar);
  avg.average_row = divide(mean);
  return avg;
}

// p_TD^2 + p_AR^2: expected accuracy of prior-sampled guessing.
inline double baseline_expected_accuracy(const Dataset& d) {
  const double n = static_cast<double>(d.size());
  const double p = static_cast<double>(d.count(Label::TD)) / n, q = static_cast<double>(d.count(Label::AR)) / n;
  return p * p + q * q;
}

// Difference of average accuracies, in percentage points.
inline double improvement_over_baseline(double model_accuracy, double baseline_accuracy) {
  return 100.0 * (model_accuracy - baseline_accuracy);
}

inline double improvement_over_baseline(const EvalReport& model, const EvalReport& baseline) {
  return improvement_over_baseline(model.accuracy(), baseline.accuracy());
}

// ---------------------------------------------------------------------------
// Presentation

inline std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// Class | Accuracy | Precision | Recall | F1 Score, then the Average row.
inline std::string render_table(const EvalReport& r, const std::string& title = "") {
  std::ostringstream os;
  if (!title.empty()) os << title << '\n';
  auto line = [&](const std::string& c, const std::string& a, const std::string& p, const std::string& re, const std::string& f) {
    os << std::left << std::setw(9) << c << "| " << std::setw(9) << a << "| " << std::setw(10) << p << "| " << std::setw(7)
       << re << "| " << f << '\n';
  };
  auto row = [&](const std::string& name, const MetricRow& m, bool present) {
    if (!present)
      line(name, "-", "-", "-", "-");
    else
      line(name, fixed3(m.accuracy), fixed3(m.precision), fixed3(m.recall), fixed3(m.f1));
  };
  line("Class", "Accuracy", "Precision", "Recall", "F1 Score");
  os << std::string(53, '-') << '\n';
  row("TD", r.td_row, r.td_present);
  row("AR", r.ar_row, r.ar_present);
  os << std::string(53, '=') << '\n';
  row("Average", r.average_row, true);
  return os.str();
}

inline nlohmann::json to_json(const ConfusionMatrix& c) {
  return {{"td_correct", c.td_correct}, {"td_wrong", c.td_wrong}, {"ar_correct", c.ar_correct}, {"ar_wrong", c.ar_wrong}};
}

inline nlohmann::json to_json(const MetricRow& m) {
  return {{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json preds = nlohmann::json::array();
  for (const auto& p : r.predictions) {
    nlohmann::json e = {{"record", p.record_id},
                        {"predicted", std::string(to_string(p.predicted))},
                        {"actual", std::string(to_string(p.actual))}};
    if (!p.votes.empty()) {
      std::vector<std::string> v;
      for (auto l : p.votes) v.emplace_back(to_string(l));
      e["votes"] = v;
    }
    preds.push_back(e);
  }
  nlohmann::json j = {{"mode", r.mode},
                      {"confusion", to_json(r.confusion)},
                      {"td", r.td_present ? to_json(r.td_row) : nlohmann::json(nullptr)},
                      {"ar", r.ar_present ? to_json(r.ar_row) : nlohmann::json(nullptr)},
                      {"average", to_json(r.average_row)},
                      {"skipped_folds", r.skipped_folds},
                      {"flags", r.flags},
                      {"runs", r.runs},
                      {"predictions", preds}};
  if (!r.run_confusions.empty()) {
    nlohmann::json rc = nlohmann::json::array();
    for (const auto& c : r.run_confusions) rc.push_back(to_json(c));
    j["run_confusions"] = rc;
  }
  return j;
}

}  // namespace legmove
