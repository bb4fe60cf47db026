#pragma once

// Declarative learner configuration (LearnerSpec), the uniform fit entry point
// and the immutable fitted Model with its versioned JSON form.

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "legmove/core.hpp"
#include "legmove/learners/adaboost.hpp"
#include "legmove/learners/forest.hpp"
#include "legmove/learners/knn.hpp"
#include "legmove/learners/logistic.hpp"
#include "legmove/learners/svm.hpp"
#include "legmove/learners/tree.hpp"
#include "legmove/mask.hpp"

namespace legmove {

enum class Family { DecisionTree, LogisticRegression, SVM, KNN, RandomForest, AdaBoost };

inline constexpr std::array<Family, 6> kAllFamilies = {Family::DecisionTree, Family::LogisticRegression, Family::SVM,
                                                       Family::KNN,          Family::RandomForest,       Family::AdaBoost};

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::DecisionTree: return "DecisionTree";
    case Family::LogisticRegression: return "LogisticRegression";
    case Family::SVM: return "SVM";
    case Family::KNN: return "KNN";
    case Family::RandomForest: return "RandomForest";
    case Family::AdaBoost: return "AdaBoost";
  }
  return "?";
}

inline std::optional<Family> parse_family(std::string_view s) {
  for (auto f : kAllFamilies)
    if (to_string(f) == s) return f;
  if (s == "LogReg") return Family::LogisticRegression;
  if (s == "Tree") return Family::DecisionTree;
  if (s == "RF") return Family::RandomForest;
  return std::nullopt;
}

using ParamValue = std::variant<double, bool, std::string>;
using ParamMap = std::map<std::string, ParamValue>;

inline nlohmann::json to_json(const ParamValue& v) {
  return std::visit([](const auto& x) { return nlohmann::json(x); }, v);
}

inline ParamValue param_from_json(const nlohmann::json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw Error(ErrorKind::Validation, "hyperparameter values must be numbers, booleans or strings, got " + j.dump());
}

inline std::string param_text(const ParamValue& v) {
  if (auto d = std::get_if<double>(&v)) return format_double(*d);
  if (auto b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  return std::get<std::string>(v);
}

namespace detail {

struct ParamRule {
  std::string_view key;
  enum Kind { Positive, NonNegative, PositiveInt, Unit, Bool, Depth, Choice, GammaValue } kind;
  std::vector<std::string_view> choices = {};
};

inline const std::vector<ParamRule>& rules_for(Family f) {
  using R = ParamRule;
  static const std::vector<R> tree = {{"max_depth", R::Depth},
                                      {"min_leaf_weight", R::NonNegative},
                                      {"pruning_confidence", R::Unit},
                                      {"prune", R::Bool},
                                      {"criterion", R::Choice, {"gain_ratio", "gini"}}};
  static const std::vector<R> logreg = {{"l2_lambda", R::NonNegative}, {"max_iter", R::PositiveInt}, {"tol", R::Positive}};
  static const std::vector<R> svm = {{"C", R::Positive},
                                     {"kernel", R::Choice, {"linear", "rbf"}},
                                     {"gamma", R::GammaValue},
                                     {"tol", R::Positive},
                                     {"max_passes", R::PositiveInt}};
  static const std::vector<R> knn = {{"k", R::PositiveInt}, {"metric", R::Choice, {"euclidean"}}};
  static const std::vector<R> rf = {{"n_trees", R::PositiveInt},
                                    {"max_features", R::Choice, {"sqrt", "all"}},
                                    {"max_depth", R::Depth},
                                    {"min_leaf_weight", R::NonNegative},
                                    {"bootstrap", R::Bool}};
  static const std::vector<R> ada = {{"n_rounds", R::PositiveInt}, {"stump_criterion", R::Choice, {"gini", "gain_ratio"}}};
  switch (f) {
    case Family::DecisionTree: return tree;
    case Family::LogisticRegression: return logreg;
    case Family::SVM: return svm;
    case Family::KNN: return knn;
    case Family::RandomForest: return rf;
    case Family::AdaBoost: return ada;
  }
  return tree;
}

inline void check_param(Family f, const std::string& key, const ParamValue& v) {
  const auto& rules = rules_for(f);
  auto it = std::find_if(rules.begin(), rules.end(), [&](const ParamRule& r) { return r.key == key; });
  auto bad = [&](const std::string& why) {
    return Error(ErrorKind::Validation,
                 std::string(to_string(f)) + ": hyperparameter " + key + "=" + param_text(v) + " " + why);
  };
  if (it == rules.end()) throw Error(ErrorKind::Validation, std::string(to_string(f)) + ": unknown hyperparameter '" + key + "'");
  const double* d = std::get_if<double>(&v);
  const std::string* s = std::get_if<std::string>(&v);
  switch (it->kind) {
    case ParamRule::Positive:
      if (!d || !(*d > 0.0) || !std::isfinite(*d)) throw bad("must be a positive number");
      break;
    case ParamRule::NonNegative:
      if (!d || !(*d >= 0.0) || !std::isfinite(*d)) throw bad("must be a non-negative number");
      break;
    case ParamRule::PositiveInt:
      if (!d || *d < 1.0 || *d != std::floor(*d) || *d > 1e9) throw bad("must be a positive integer");
      break;
    case ParamRule::Unit:
      if (!d || !(*d > 0.0 && *d < 1.0)) throw bad("must lie in (0, 1)");
      break;
    case ParamRule::Bool:
      if (!std::holds_alternative<bool>(v)) throw bad("must be true or false");
      break;
    case ParamRule::Depth:
      if (s ? *s != "none" : (!d || *d < 1.0 || *d != std::floor(*d) || *d > 1e6)) throw bad("must be a positive integer or \"none\"");
      break;
    case ParamRule::Choice:
      if (!s || std::find(it->choices.begin(), it->choices.end(), *s) == it->choices.end()) throw bad("is not an allowed choice");
      break;
    case ParamRule::GammaValue:
      if (s ? *s != "inv_d" : (!d || !(*d > 0.0))) throw bad("must be positive or \"inv_d\"");
      break;
  }
}

}  // namespace detail

// Classifier family plus hyperparameters. Keys outside the family's vocabulary
// are rejected at construction; absent keys take the family default.
class LearnerSpec {
 public:
  LearnerSpec() : LearnerSpec(Family::DecisionTree) {}
  explicit LearnerSpec(Family family, ParamMap params = {}, std::uint64_t seed = 0)
      : family_(family), params_(std::move(params)), seed_(seed) {
    for (const auto& [k, v] : params_) detail::check_param(family_, k, v);
  }

  Family family() const noexcept { return family_; }
  const ParamMap& params() const noexcept { return params_; }
  std::uint64_t seed() const noexcept { return seed_; }

  LearnerSpec with(const std::string& key, ParamValue v) const {
    ParamMap p = params_;
    p[key] = std::move(v);
    return LearnerSpec(family_, std::move(p), seed_);
  }
  LearnerSpec with_seed(std::uint64_t seed) const { return LearnerSpec(family_, params_, seed); }

  double number(const std::string& key, double fallback) const {
    auto it = params_.find(key);
    if (it == params_.end()) return fallback;
    return std::get<double>(it->second);
  }
  bool flag(const std::string& key, bool fallback) const {
    auto it = params_.find(key);
    return it == params_.end() ? fallback : std::get<bool>(it->second);
  }
  std::string text(const std::string& key, const std::string& fallback) const {
    auto it = params_.find(key);
    if (it == params_.end()) return fallback;
    if (auto s = std::get_if<std::string>(&it->second)) return *s;
    return param_text(it->second);
  }
  // max_depth: 0 for unlimited.
  int depth(const std::string& key) const {
    auto it = params_.find(key);
    if (it == params_.end() || std::holds_alternative<std::string>(it->second)) return 0;
    return static_cast<int>(std::get<double>(it->second));
  }

  // Canonical text form; ties in rankings break on it.
  std::string key() const;

  friend bool operator==(const LearnerSpec&, const LearnerSpec&) = default;

 private:
  Family family_;
  ParamMap params_;
  std::uint64_t seed_;
};

inline nlohmann::json to_json(const LearnerSpec& s) {
  nlohmann::json p = nlohmann::json::object();
  for (const auto& [k, v] : s.params()) p[k] = to_json(v);
  return {{"family", std::string(to_string(s.family()))}, {"params", p}, {"seed", s.seed()}};
}

inline std::string LearnerSpec::key() const { return to_json(*this).dump(); }

inline LearnerSpec spec_from_json(const nlohmann::json& j) {
  try {
    auto fam = parse_family(j.at("family").get<std::string>());
    if (!fam) throw Error(ErrorKind::Validation, "unknown learner family " + j.at("family").dump());
    ParamMap params;
    if (j.contains("params"))
      for (const auto& [k, v] : j.at("params").items()) params[k] = param_from_json(v);
    return LearnerSpec(*fam, std::move(params), j.value("seed", std::uint64_t{0}));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("learner spec: ") + e.what());
  }
}

// Family defaults when a key is absent:
//   DecisionTree{no depth cap, min_leaf_weight 1, pruning_confidence 0.25},
//   LogisticRegression{l2_lambda 1}, SVM{C 1, rbf, gamma 1/d}, KNN{k 5},
//   RandomForest{100 trees, sqrt features}, AdaBoost{50 rounds}.
inline TreeParams tree_params(const LearnerSpec& s) {
  TreeParams p;
  p.criterion = *parse_split_criterion(s.text("criterion", "gain_ratio"));
  p.max_depth = s.depth("max_depth");
  p.min_leaf_weight = s.number("min_leaf_weight", 1.0);
  p.prune = s.flag("prune", true);
  p.pruning_confidence = s.number("pruning_confidence", 0.25);
  return p;
}

inline LogisticParams logistic_params(const LearnerSpec& s) {
  return {s.number("l2_lambda", 1.0), static_cast<int>(s.number("max_iter", 100)), s.number("tol", 1e-10)};
}

inline SvmParams svm_params(const LearnerSpec& s) {
  SvmParams p;
  p.c = s.number("C", 1.0);
  p.kernel = s.text("kernel", "rbf") == "linear" ? KernelType::Linear : KernelType::Rbf;
  auto g = s.params().find("gamma");
  p.gamma = (g == s.params().end() || std::holds_alternative<std::string>(g->second)) ? 0.0 : std::get<double>(g->second);
  p.tol = s.number("tol", 1e-3);
  p.max_passes = static_cast<int>(s.number("max_passes", 10000));
  return p;
}

inline KnnParams knn_params(const LearnerSpec& s) { return {static_cast<std::size_t>(s.number("k", 5))}; }

inline ForestParams forest_params(const LearnerSpec& s) {
  ForestParams p;
  p.n_trees = static_cast<int>(s.number("n_trees", 100));
  p.max_features = s.text("max_features", "sqrt") == "all" ? MaxFeatures::All : MaxFeatures::Sqrt;
  p.max_depth = s.depth("max_depth");
  p.min_leaf_weight = s.number("min_leaf_weight", 1.0);
  p.bootstrap = s.flag("bootstrap", true);
  p.seed = s.seed();
  return p;
}

inline AdaBoostParams adaboost_params(const LearnerSpec& s) {
  return {static_cast<int>(s.number("n_rounds", 50)), *parse_split_criterion(s.text("stump_criterion", "gini"))};
}

using FittedState = std::variant<DecisionTree, LogisticModel, SvmModel, KnnModel, ForestModel, AdaBoostModel>;

// Immutable fitted classifier. Remembers the training schema and the feature
// subset it was trained on.
class Model {
 public:
  Model(LearnerSpec spec, FittedState state, std::vector<std::string> features, std::vector<std::size_t> feature_index,
        std::uint64_t schema_fingerprint)
      : spec_(std::move(spec)),
        state_(std::move(state)),
        features_(std::move(features)),
        feature_index_(std::move(feature_index)),
        fingerprint_(schema_fingerprint) {}

  const LearnerSpec& spec() const noexcept { return spec_; }
  Family family() const noexcept { return spec_.family(); }
  const FittedState& state() const noexcept { return state_; }
  const std::vector<std::string>& features() const noexcept { return features_; }
  const std::vector<std::size_t>& feature_index() const noexcept { return feature_index_; }
  std::uint64_t schema_fingerprint() const noexcept { return fingerprint_; }

  template <class T>
  const T* as() const noexcept {
    return std::get_if<T>(&state_);
  }

  // Prediction on a row already restricted to the model's features.
  Label predict_masked(std::span<const double> row) const {
    return std::visit([&](const auto& m) { return m.predict(row); }, state_);
  }

  // Prediction on a full schema-ordered feature vector.
  Label predict(const FeatureSchema& schema, std::span<const double> features) const {
    if (schema.fingerprint() != fingerprint_)
      throw Error(ErrorKind::Validation, "model was trained on a different feature schema");
    if (features.size() != schema.size())
      throw Error(ErrorKind::Validation, "feature vector length does not match schema");
    std::vector<double> row(feature_index_.size());
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = features[feature_index_[k]];
    return predict_masked(row);
  }

  Label predict(const Dataset& d, std::size_t i) const { return predict(d.schema(), d[i].features); }

  // Per-feature importance in mask order, when the family defines one:
  // |coefficient| for logistic regression and linear SVM, impurity decrease
  // for trees and forests.
  std::optional<std::vector<double>> importances() const {
    if (auto t = as<DecisionTree>()) return t->importances();
    if (auto f = as<ForestModel>()) return f->importances();
    if (auto l = as<LogisticModel>()) return l->importances();
    if (auto s = as<SvmModel>(); s && s->kernel().type == KernelType::Linear) return s->importances();
    return std::nullopt;
  }

 private:
  LearnerSpec spec_;
  FittedState state_;
  std::vector<std::string> features_;
  std::vector<std::size_t> feature_index_;
  std::uint64_t fingerprint_;
};

inline bool supports_importances(const LearnerSpec& s) {
  switch (s.family()) {
    case Family::DecisionTree:
    case Family::RandomForest:
    case Family::LogisticRegression: return true;
    case Family::SVM: return s.text("kernel", "rbf") == "linear";
    default: return false;
  }
}

// Training rows for `mask`, in canonical record order, with the given
// per-record weights (indexed like d.records()) rescaled to mean 1.
inline TrainingSet make_training_set(const Dataset& d, std::span<const std::size_t> feature_index,
                                     std::span<const double> record_weights) {
  const auto order = d.canonical_order();
  TrainingSet t;
  t.x = Matrix(d.size(), feature_index.size());
  t.y.resize(d.size());
  std::vector<double> w(d.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto& rec = d[order[r]];
    for (std::size_t k = 0; k < feature_index.size(); ++k) t.x(r, k) = rec.features[feature_index[k]];
    t.y[r] = rec.label;
    w[r] = record_weights[order[r]];
  }
  t.w = normalized_weights(w);
  return t;
}

inline std::vector<double> balanced_record_weights(const Dataset& d) {
  const ClassWeights cw = balanced_class_weights(d);
  std::vector<double> w(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) w[i] = cw.of(d[i].label);
  return w;
}

inline Model fit(const Dataset& d, const FeatureMask& mask, const LearnerSpec& spec, std::span<const double> record_weights) {
  if (d.empty()) throw Error(ErrorKind::DegenerateDataset, "cannot fit on an empty dataset");
  if (record_weights.size() != d.size()) throw Error(ErrorKind::Usage, "one weight per record is required");
  auto index = mask.indices(d.schema());
  TrainingSet t = make_training_set(d, index, record_weights);
  FittedState state = [&]() -> FittedState {
    switch (spec.family()) {
      case Family::DecisionTree: return DecisionTree::fit(t, tree_params(spec), mask.selected);
      case Family::LogisticRegression: return LogisticModel::fit(t, logistic_params(spec));
      case Family::SVM: return SvmModel::fit(t, svm_params(spec));
      case Family::KNN: return KnnModel::fit(t, knn_params(spec));
      case Family::RandomForest: return ForestModel::fit(t, forest_params(spec), mask.selected);
      case Family::AdaBoost: return AdaBoostModel::fit(t, adaboost_params(spec));
    }
    throw Error(ErrorKind::Unsupported, "unknown family");
  }();
  return Model(spec, std::move(state), mask.selected, std::move(index), d.schema().fingerprint());
}

// Fit with balanced class weights n / (2 n_c).
inline Model fit(const Dataset& d, const FeatureMask& mask, const LearnerSpec& spec) {
  const auto w = balanced_record_weights(d);
  return fit(d, mask, spec, w);
}

// ---------------------------------------------------------------------------
// JSON

inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
  return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? j.at(0).size() : 0;
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j.at(i).size() != cols) throw Error(ErrorKind::Validation, "ragged matrix in model document");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
  }
  return m;
}

inline nlohmann::json labels_json(const std::vector<Label>& l) {
  std::vector<std::string> s;
  for (auto x : l) s.emplace_back(to_string(x));
  return s;
}

inline Label label_from_json(const nlohmann::json& j) {
  auto l = parse_label(j.get<std::string>());
  if (!l) throw Error(ErrorKind::Validation, "bad label " + j.dump());
  return *l;
}

inline std::vector<Label> labels_from_json(const nlohmann::json& j) {
  std::vector<Label> out;
  for (const auto& x : j) out.push_back(label_from_json(x));
  return out;
}

inline nlohmann::json scale_json(const Standardizer& s) { return {{"mean", s.mean}, {"sd", s.sd}}; }

inline Standardizer scale_from_json(const nlohmann::json& j) {
  return {j.at("mean").get<std::vector<double>>(), j.at("sd").get<std::vector<double>>()};
}

inline nlohmann::json tree_json(const DecisionTree& t) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : t.nodes())
    nodes.push_back({{"left", n.left},
                     {"right", n.right},
                     {"feature", n.feature},
                     {"threshold", n.threshold},
                     {"label", std::string(to_string(n.label))},
                     {"td_weight", n.td_weight},
                     {"ar_weight", n.ar_weight},
                     {"gain", n.gain}});
  return {{"features", t.feature_names()}, {"nodes", nodes}};
}

inline DecisionTree tree_from_json(const nlohmann::json& j) {
  std::vector<DecisionTree::Node> nodes;
  for (const auto& n : j.at("nodes")) {
    DecisionTree::Node x;
    x.left = n.at("left").get<int>();
    x.right = n.at("right").get<int>();
    x.feature = n.at("feature").get<std::size_t>();
    x.threshold = n.at("threshold").get<double>();
    x.label = label_from_json(n.at("label"));
    x.td_weight = n.at("td_weight").get<double>();
    x.ar_weight = n.at("ar_weight").get<double>();
    x.gain = n.at("gain").get<double>();
    nodes.push_back(x);
  }
  return DecisionTree(j.at("features").get<std::vector<std::string>>(), std::move(nodes));
}

inline nlohmann::json state_json(const FittedState& s) {
  struct V {
    nlohmann::json operator()(const DecisionTree& t) const { return tree_json(t); }
    nlohmann::json operator()(const LogisticModel& m) const {
      return {{"scale", scale_json(m.standardizer())}, {"intercept", m.intercept()}, {"coef", m.coefficients()}};
    }
    nlohmann::json operator()(const SvmModel& m) const {
      return {{"scale", scale_json(m.standardizer())},
              {"kernel", std::string(to_string(m.kernel().type))},
              {"gamma", m.kernel().gamma},
              {"rows", matrix_json(m.training_rows())},
              {"alpha", m.alpha()},
              {"labels", labels_json(m.labels())},
              {"upper", m.upper_bounds()},
              {"bias", m.bias()},
              {"iterations", m.iterations()}};
    }
    nlohmann::json operator()(const KnnModel& m) const {
      return {{"scale", scale_json(m.standardizer())},
              {"rows", matrix_json(m.training_rows())},
              {"labels", labels_json(m.labels())},
              {"weights", m.weights()},
              {"k", m.k()}};
    }
    nlohmann::json operator()(const ForestModel& m) const {
      nlohmann::json trees = nlohmann::json::array();
      for (const auto& t : m.trees()) trees.push_back(tree_json(t));
      return {{"trees", trees}};
    }
    nlohmann::json operator()(const AdaBoostModel& m) const {
      nlohmann::json rounds = nlohmann::json::array();
      for (const auto& r : m.rounds())
        rounds.push_back({{"constant", r.stump.constant},
                          {"feature", r.stump.feature},
                          {"threshold", r.stump.threshold},
                          {"left", std::string(to_string(r.stump.left))},
                          {"right", std::string(to_string(r.stump.right))},
                          {"error", r.error},
                          {"alpha", r.alpha}});
      return {{"rounds", rounds}};
    }
  };
  return std::visit(V{}, s);
}

inline FittedState state_from_json(Family f, const nlohmann::json& j) {
  switch (f) {
    case Family::DecisionTree: return tree_from_json(j);
    case Family::LogisticRegression:
      return LogisticModel(scale_from_json(j.at("scale")), j.at("intercept").get<double>(),
                           j.at("coef").get<std::vector<double>>());
    case Family::SVM: {
      Kernel k{j.at("kernel").get<std::string>() == "rbf" ? KernelType::Rbf : KernelType::Linear, j.at("gamma").get<double>()};
      return SvmModel(scale_from_json(j.at("scale")), k, matrix_from_json(j.at("rows")), j.at("alpha").get<std::vector<double>>(),
                      labels_from_json(j.at("labels")), j.at("upper").get<std::vector<double>>(), j.at("bias").get<double>(),
                      j.at("iterations").get<int>());
    }
    case Family::KNN:
      return KnnModel(scale_from_json(j.at("scale")), matrix_from_json(j.at("rows")), labels_from_json(j.at("labels")),
                      j.at("weights").get<std::vector<double>>(), j.at("k").get<std::size_t>());
    case Family::RandomForest: {
      std::vector<DecisionTree> trees;
      for (const auto& t : j.at("trees")) trees.push_back(tree_from_json(t));
      return ForestModel(std::move(trees));
    }
    case Family::AdaBoost: {
      std::vector<BoostRound> rounds;
      for (const auto& r : j.at("rounds")) {
        BoostRound b;
        b.stump.constant = r.at("constant").get<bool>();
        b.stump.feature = r.at("feature").get<std::size_t>();
        b.stump.threshold = r.at("threshold").get<double>();
        b.stump.left = label_from_json(r.at("left"));
        b.stump.right = label_from_json(r.at("right"));
        b.error = r.at("error").get<double>();
        b.alpha = r.at("alpha").get<double>();
        rounds.push_back(b);
      }
      return AdaBoostModel(std::move(rounds));
    }
  }
  throw Error(ErrorKind::Validation, "unknown family");
}

}  // namespace detail

inline nlohmann::json to_json(const Model& m) {
  return {{"format", "legmove-model"},
          {"version", kModelFormatVersion},
          {"spec", to_json(m.spec())},
          {"features", m.features()},
          {"feature_index", m.feature_index()},
          {"schema_fingerprint", m.schema_fingerprint()},
          {"state", detail::state_json(m.state())}};
}

inline Model model_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "legmove-model") throw Error(ErrorKind::Validation, "not a model document");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw Error(ErrorKind::Validation, "unsupported model format version " + std::to_string(version));
    LearnerSpec spec = spec_from_json(j.at("spec"));
    return Model(spec, detail::state_from_json(spec.family(), j.at("state")), j.at("features").get<std::vector<std::string>>(),
                 j.at("feature_index").get<std::vector<std::size_t>>(), j.at("schema_fingerprint").get<std::uint64_t>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("model document: ") + e.what());
  }
}

}  // namespace legmove
