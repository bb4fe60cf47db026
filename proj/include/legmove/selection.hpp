#pragma once

// Grid search over learner hyperparameters, the top-3 majority-vote ensemble,
// and reconciliation of the per-method feature masks.

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "legmove/evaluate.hpp"

namespace legmove {

// Hyperparameter name -> candidate values; a family's lattice is the cross product.
using Lattice = std::map<std::string, std::vector<ParamValue>>;
using GridSpec = std::map<Family, Lattice>;

inline GridSpec default_grids() {
  using V = std::vector<ParamValue>;
  GridSpec g;
  g[Family::SVM] = {{"C", V{0.01, 0.1, 1.0, 10.0, 100.0}},
                    {"kernel", V{std::string("linear"), std::string("rbf")}},
                    {"gamma", V{0.01, 0.1, std::string("inv_d"), 1.0}}};
  g[Family::LogisticRegression] = {{"l2_lambda", V{0.001, 0.01, 0.1, 1.0, 10.0, 100.0}}};
  g[Family::KNN] = {{"k", V{1.0, 3.0, 5.0, 7.0, 9.0}}};
  g[Family::DecisionTree] = {{"max_depth", V{1.0, 2.0, 3.0, std::string("none")}},
                             {"pruning_confidence", V{0.1, 0.25, 0.5}}};
  g[Family::RandomForest] = {{"n_trees", V{50.0, 100.0, 200.0}}};
  g[Family::AdaBoost] = {{"n_rounds", V{25.0, 50.0, 100.0}}};
  return g;
}

// A linear-kernel SVM ignores gamma; drop it so equivalent cells collapse.
inline LearnerSpec canonical_spec(const LearnerSpec& s) {
  if (s.family() == Family::SVM && s.text("kernel", "rbf") == "linear" && s.params().count("gamma")) {
    ParamMap p = s.params();
    p.erase("gamma");
    return LearnerSpec(s.family(), std::move(p), s.seed());
  }
  return s;
}

// All distinct specs of the lattice, sorted by spec key.
inline std::vector<LearnerSpec> expand_lattice(Family f, const Lattice& lattice, std::uint64_t seed) {
  for (const auto& [k, values] : lattice)
    if (values.empty()) throw Error(ErrorKind::Validation, std::string(to_string(f)) + ": empty lattice for " + k);
  std::vector<ParamMap> combos{ParamMap{}};
  for (const auto& [k, values] : lattice) {
    std::vector<ParamMap> next;
    for (const auto& c : combos)
      for (const auto& v : values) {
        ParamMap m = c;
        m[k] = v;
        next.push_back(std::move(m));
      }
    combos = std::move(next);
  }
  std::map<std::string, LearnerSpec> unique;
  for (auto& c : combos) {
    LearnerSpec s = canonical_spec(LearnerSpec(f, std::move(c), seed));
    unique.emplace(s.key(), s);
  }
  std::vector<LearnerSpec> out;
  for (auto& [k, s] : unique) out.push_back(s);
  return out;
}

struct GridEntry {
  LearnerSpec spec;
  std::optional<EvalReport> report;
  std::string error;  // set when evaluation failed
};

// Entries ranked by (average accuracy, AR recall, average F1) descending, then
// spec key ascending. Failed entries come last.
struct GridResult {
  std::vector<GridEntry> ranked;

  const GridEntry& best() const {
    if (ranked.empty() || !ranked.front().report) throw Error(ErrorKind::DegenerateDataset, "grid has no successful entry");
    return ranked.front();
  }

  std::optional<GridEntry> best_of(Family f) const {
    for (const auto& e : ranked)
      if (e.report && e.spec.family() == f) return e;
    return std::nullopt;
  }
};

inline bool ranks_before(const GridEntry& a, const GridEntry& b) {
  if (a.report.has_value() != b.report.has_value()) return a.report.has_value();
  if (a.report) {
    const auto ka = std::make_tuple(a.report->average_row.accuracy, a.report->ar_row.recall, a.report->average_row.f1);
    const auto kb = std::make_tuple(b.report->average_row.accuracy, b.report->ar_row.recall, b.report->average_row.f1);
    if (ka != kb) return ka > kb;
  }
  return a.spec.key() < b.spec.key();
}

inline GridResult rank(std::vector<GridEntry> entries) {
  std::sort(entries.begin(), entries.end(), ranks_before);
  return GridResult{std::move(entries)};
}

// LOOCV every spec; a spec whose evaluation throws is kept with its error.
inline GridResult evaluate_specs(const Dataset& d, const FeatureMask& mask, const std::vector<LearnerSpec>& specs,
                                 const SelectionMode& selection = MaskFixed{}, std::size_t threads = 1) {
  std::vector<GridEntry> entries(specs.size());
  parallel_for(specs.size(), threads, [&](std::size_t i) {
    entries[i].spec = specs[i];
    try {
      entries[i].report = loocv(d, mask, specs[i], selection);
    } catch (const Error& e) {
      entries[i].error = e.what();
    }
  });
  return rank(std::move(entries));
}

// One LOOCV report per family at its defaults.
inline GridResult spot_check(const Dataset& d, const FeatureMask& mask, std::uint64_t seed = 0,
                             const SelectionMode& selection = MaskFixed{}, std::size_t threads = 1) {
  std::vector<LearnerSpec> specs;
  for (auto f : kAllFamilies) specs.emplace_back(f, ParamMap{}, seed);
  return evaluate_specs(d, mask, specs, selection, threads);
}

inline GridResult grid_search(const Dataset& d, const FeatureMask& mask, const GridSpec& grids, std::uint64_t seed = 0,
                              const SelectionMode& selection = MaskFixed{}, std::size_t threads = 1) {
  if (grids.empty()) throw Error(ErrorKind::Validation, "grid search: no families in the grid");
  std::vector<LearnerSpec> specs;
  for (const auto& [f, lattice] : grids) {
    auto s = expand_lattice(f, lattice, seed);
    specs.insert(specs.end(), s.begin(), s.end());
  }
  return evaluate_specs(d, mask, specs, selection, threads);
}

// Three members; majority vote over an odd count cannot tie.
struct EnsembleSpec {
  std::array<LearnerSpec, 3> members;
};

// Best spec of each of the three top-ranked distinct families.
inline EnsembleSpec build_ensemble(const GridResult& grid) {
  std::vector<LearnerSpec> picked;
  std::set<Family> seen;
  for (const auto& e : grid.ranked) {
    if (!e.report || seen.count(e.spec.family())) continue;
    seen.insert(e.spec.family());
    picked.push_back(e.spec);
    if (picked.size() == 3) break;
  }
  if (picked.size() < 3)
    throw Error(ErrorKind::DegenerateDataset,
                "ensemble needs 3 distinct families in the grid, found " + std::to_string(picked.size()));
  return EnsembleSpec{{picked[0], picked[1], picked[2]}};
}

inline Label majority_vote(std::span<const Label> votes) {
  std::size_t ar = 0;
  for (auto v : votes)
    if (v == Label::AR) ++ar;
  return 2 * ar >= votes.size() ? Label::AR : Label::TD;
}

// Every fold retrains the three members and takes their 2-of-3 vote.
inline EvalReport evaluate_ensemble(const Dataset& d, const FeatureMask& mask, const EnsembleSpec& e,
                                    const SelectionMode& selection = MaskFixed{}, std::size_t threads = 1) {
  FoldPredictor predictor = [&](const Dataset& train, const SampleRecord& held, const FeatureSchema& schema) {
    FeatureMask fold_mask = mask;
    if (auto per_fold = std::get_if<SelectPerFold>(&selection)) fold_mask = run_selector(train, per_fold->selector);
    FoldOutcome out;
    for (const auto& m : e.members) out.votes.push_back(fit(train, fold_mask, m).predict(schema, held.features));
    out.predicted = majority_vote(out.votes);
    return out;
  };
  return loocv_with(d, predictor, "ensemble/" + mode_name(selection), threads);
}

struct MaskChoice {
  FeatureMask chosen;
  std::vector<std::pair<FeatureMask, double>> candidates;  // mask, LOOCV accuracy
};

// Picks the candidate mask with the highest LOOCV accuracy of `judge`; ties keep the earlier candidate.
inline MaskChoice choose_mask(const Dataset& d, const std::vector<FeatureMask>& masks, const LearnerSpec& judge) {
  if (masks.empty()) throw Error(ErrorKind::Usage, "no candidate masks");
  MaskChoice out;
  double best = -1.0;
  for (const auto& m : masks) {
    const double acc = loocv(d, m, judge).accuracy();
    out.candidates.emplace_back(m, acc);
    if (acc > best) {
      best = acc;
      out.chosen = m;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const GridResult& g) {
  nlohmann::json arr = nlohmann::json::array();
  std::size_t rank_no = 1;
  for (const auto& e : g.ranked) {
    nlohmann::json j = {{"rank", rank_no++}, {"spec", to_json(e.spec)}};
    if (e.report) {
      j["average_accuracy"] = e.report->average_row.accuracy;
      j["ar_recall"] = e.report->ar_row.recall;
      j["average_f1"] = e.report->average_row.f1;
      j["report"] = to_json(*e.report);
    } else {
      j["error"] = e.error;
    }
    arr.push_back(j);
  }
  return {{"ranking_key", {"average_accuracy", "ar_recall", "average_f1"}}, {"entries", arr}};
}

inline nlohmann::json to_json(const EnsembleSpec& e) {
  nlohmann::json m = nlohmann::json::array();
  for (const auto& s : e.members) m.push_back(to_json(s));
  return {{"vote", "majority"}, {"members", m}};
}

inline EnsembleSpec ensemble_from_json(const nlohmann::json& j) {
  const auto& m = j.at("members");
  if (m.size() != 3) throw Error(ErrorKind::Validation, "ensemble needs exactly 3 members");
  return EnsembleSpec{{spec_from_json(m.at(0)), spec_from_json(m.at(1)), spec_from_json(m.at(2))}};
}

inline nlohmann::json to_json(const GridSpec& g) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [f, lattice] : g) {
    nlohmann::json l = nlohmann::json::object();
    for (const auto& [k, values] : lattice) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& v : values) arr.push_back(to_json(v));
      l[k] = arr;
    }
    out[std::string(to_string(f))] = l;
  }
  return out;
}

inline GridSpec grid_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Validation, "grid document must be an object keyed by family");
  GridSpec g;
  for (const auto& [fname, lattice] : j.items()) {
    auto f = parse_family(fname);
    if (!f) throw Error(ErrorKind::Validation, "grid: unknown family '" + fname + "'");
    Lattice l;
    for (const auto& [k, values] : lattice.items()) {
      if (!values.is_array()) throw Error(ErrorKind::Validation, "grid: " + fname + "." + k + " must be an array");
      for (const auto& v : values) l[k].push_back(param_from_json(v));
      if (l[k].empty()) throw Error(ErrorKind::Validation, "grid: empty lattice for " + fname + "." + k);
    }
    g[*f] = std::move(l);
  }
  return g;
}

}  // namespace legmove
