#pragma once

// The batch commands behind the CLI. Each cmd_* reads its inputs from a
// RunConfig, writes files into config.out_dir and returns the file names it
// wrote. run_command wraps a command so that manifest.json is written on both
// the success and the failure path.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "legmove/ingest.hpp"
#include "legmove/selection.hpp"
#include "legmove/synth.hpp"
#include "legmove/tree_export.hpp"

namespace legmove {

inline constexpr const char* kOutDirEnv = "LEGMOVE_OUT";
inline constexpr const char* kVersion = "1.0.0";

enum class Leakage { Fixed, PerFold };

inline std::string_view to_string(Leakage l) { return l == Leakage::Fixed ? "fixed" : "per-fold"; }

inline std::optional<Leakage> parse_leakage(std::string_view s) {
  if (s == "fixed") return Leakage::Fixed;
  if (s == "per-fold" || s == "per_fold") return Leakage::PerFold;
  return std::nullopt;
}

struct RunConfig {
  std::string input;
  std::string mask_path;   // empty: every feature
  std::string grid_path;   // empty: default_grids()
  std::string model_path;  // export-tree: a saved model instead of fitting one
  std::string profile_path;
  std::optional<AgeBand> band;
  bool normalize = true;
  bool reconcile = false;  // select: run every method and keep the best mask
  SelectorConfig selector;
  Leakage leakage = Leakage::Fixed;
  std::optional<GridSpec> grids;  // inline grid from the config file
  bool ensemble = true;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::size_t threads = 1;
  std::size_t baseline_runs = 10;
  LearnerSpec learner = LearnerSpec(Family::DecisionTree);
  std::string preset = "census";  // synth: census | accel-split
  double separation = 3.0;
  std::size_t tree_index = 0;
};

// Everything that influences results; out_dir and threads are left out so
// that reruns into another directory or with more workers compare equal.
inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j = {{"input", c.input},
                      {"mask", c.mask_path},
                      {"grid", c.grid_path},
                      {"model", c.model_path},
                      {"profile", c.profile_path},
                      {"band", c.band ? nlohmann::json(std::string(to_string(*c.band))) : nlohmann::json(nullptr)},
                      {"normalize", c.normalize},
                      {"reconcile", c.reconcile},
                      {"selection", to_json(c.selector)},
                      {"leakage", std::string(to_string(c.leakage))},
                      {"ensemble", c.ensemble},
                      {"seed", c.seed},
                      {"baseline_runs", c.baseline_runs},
                      {"learner", to_json(c.learner)},
                      {"preset", c.preset},
                      {"separation", c.separation},
                      {"tree_index", c.tree_index}};
  if (c.grids) j["grids"] = to_json(*c.grids);
  return j;
}

namespace detail {

template <typename T>
T config_get(const nlohmann::json& j, const char* key, const T& fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::Validation, std::string("config: bad value for '") + key + "': " + j.at(key).dump());
  }
}

inline SelectorConfig selector_from_json(const nlohmann::json& j, SelectorConfig base) {
  if (j.contains("method")) {
    auto m = parse_selection_method(config_get<std::string>(j, "method", ""));
    if (!m) throw Error(ErrorKind::Validation, "config: unknown selection method " + j.at("method").dump());
    base.method = *m;
  }
  const auto k = config_get<long long>(j, "k", static_cast<long long>(base.k));
  if (k < 1) throw Error(ErrorKind::Usage, "selection k must be >= 1");
  base.k = static_cast<std::size_t>(k);
  base.corr_threshold = config_get<double>(j, "corr_threshold", base.corr_threshold);
  if (j.contains("base")) base.base = spec_from_json(j.at("base"));
  if (j.contains("direction")) {
    const auto d = config_get<std::string>(j, "direction", "");
    if (d == "forward") base.direction = StepDirection::Forward;
    else if (d == "backward") base.direction = StepDirection::Backward;
    else throw Error(ErrorKind::Validation, "config: unknown stepwise direction '" + d + "'");
  }
  return base;
}

}  // namespace detail

// Keys absent from the document keep the values already in `base`.
inline RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {}) {
  if (!j.is_object()) throw Error(ErrorKind::Validation, "config: top level must be a JSON object");
  static const std::set<std::string> known = {"input", "mask", "grid", "model", "profile", "band", "normalize",
                                              "reconcile", "selection", "leakage", "ensemble", "seed", "out_dir",
                                              "threads", "baseline_runs", "learner", "preset", "separation",
                                              "tree_index", "grids"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw Error(ErrorKind::Validation, "config: unknown key '" + k + "'");
  using detail::config_get;
  RunConfig c = std::move(base);
  c.input = config_get(j, "input", c.input);
  c.mask_path = config_get(j, "mask", c.mask_path);
  c.grid_path = config_get(j, "grid", c.grid_path);
  c.model_path = config_get(j, "model", c.model_path);
  c.profile_path = config_get(j, "profile", c.profile_path);
  if (j.contains("band") && !j.at("band").is_null()) {
    auto b = parse_age_band(config_get<std::string>(j, "band", ""));
    if (!b) throw Error(ErrorKind::Validation, "config: unknown band " + j.at("band").dump());
    c.band = *b;
  }
  c.normalize = config_get(j, "normalize", c.normalize);
  c.reconcile = config_get(j, "reconcile", c.reconcile);
  if (j.contains("selection")) c.selector = detail::selector_from_json(j.at("selection"), c.selector);
  if (j.contains("leakage")) {
    auto l = parse_leakage(config_get<std::string>(j, "leakage", ""));
    if (!l) throw Error(ErrorKind::Validation, "config: leakage must be 'fixed' or 'per-fold'");
    c.leakage = *l;
  }
  if (j.contains("grids")) c.grids = grid_from_json(j.at("grids"));
  c.ensemble = config_get(j, "ensemble", c.ensemble);
  c.seed = config_get(j, "seed", c.seed);
  c.out_dir = config_get(j, "out_dir", c.out_dir);
  c.threads = config_get(j, "threads", c.threads);
  c.baseline_runs = config_get(j, "baseline_runs", c.baseline_runs);
  if (j.contains("learner")) c.learner = spec_from_json(j.at("learner"));
  c.preset = config_get(j, "preset", c.preset);
  c.separation = config_get(j, "separation", c.separation);
  c.tree_index = config_get(j, "tree_index", c.tree_index);
  return c;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Validation, path + ": " + e.what());
  }
}

// Collects the files a command writes, relative to the output directory.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const noexcept { return root_; }

  std::filesystem::path path(const std::string& name) const { return root_ / name; }

  void write(const std::string& name, const std::string& content) {
    const auto p = path(name);
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
    out << content;
    if (!out) throw Error(ErrorKind::Io, "write failed for " + p.string());
    if (std::find(written_.begin(), written_.end(), name) == written_.end()) written_.push_back(name);
  }

  void write_json(const std::string& name, const nlohmann::json& j) { write(name, j.dump(2) + "\n"); }

  const std::vector<std::string>& written() const noexcept { return written_; }

 private:
  std::filesystem::path root_;
  std::vector<std::string> written_;
};

namespace detail {

inline Dataset load_input(const RunConfig& c) {
  if (c.input.empty()) throw Error(ErrorKind::Usage, "an input CSV is required");
  Dataset d = load_csv(c.input);
  if (d.empty()) throw Error(ErrorKind::Validation, c.input + ": no data rows");
  if (c.normalize) d = normalize_by_awake_time(d);
  if (c.band) {
    for (const auto& r : d.records())
      if (!age_in_band(r.age_months, *c.band))
        throw Error(ErrorKind::Validation, c.input + ": record " + record_id(r) + " (age " + format_double(r.age_months) +
                                               ") is outside band " + std::string(to_string(*c.band)));
    d = with_band(d, *c.band);
  }
  return d;
}

inline FeatureMask load_mask(const RunConfig& c, const Dataset& d) {
  if (c.mask_path.empty()) return FeatureMask::all(d.schema());
  FeatureMask m = mask_from_json(read_json_file(c.mask_path));
  for (const auto& f : m.selected)
    if (!d.schema().index_of(f)) throw Error(ErrorKind::Validation, c.mask_path + ": feature '" + f + "' is not in the input");
  return in_schema_order(std::move(m), d.schema());
}

inline GridSpec load_grids(const RunConfig& c) {
  if (!c.grid_path.empty()) return grid_from_json(read_json_file(c.grid_path));
  if (c.grids) return *c.grids;
  return default_grids();
}

inline SelectionMode selection_mode(const RunConfig& c) {
  if (c.leakage == Leakage::PerFold) return SelectPerFold{c.selector};
  return MaskFixed{};
}

inline nlohmann::json census_json(const Dataset& d) {
  return {{"td", d.count(Label::TD)}, {"ar", d.count(Label::AR)}, {"total", d.size()}};
}

inline std::string file_stem(Family f) { return std::string(to_string(f)); }

}  // namespace detail

// Normalizes by awake time and splits into age bands. With config.band set the
// input is validated against that band and passed through.
inline void cmd_preprocess(const RunConfig& c, OutputDir& out) {
  RunConfig load = c;
  load.band.reset();
  const Dataset d = detail::load_input(load);
  nlohmann::json census = nlohmann::json::object();
  if (c.band) {
    const Dataset banded = detail::load_input(c);
    const std::string name = std::string(to_string(*c.band)) + ".csv";
    out.write(name, to_csv_string(banded));
    census[std::string(to_string(*c.band))] = detail::census_json(banded);
  } else {
    const BandSplit s = split_age_bands(d);
    out.write("0-6.csv", to_csv_string(s.zero_to_six));
    out.write("6-12.csv", to_csv_string(s.six_to_twelve));
    out.write("discarded.csv", to_csv_string(s.discarded));
    census["0-6"] = detail::census_json(s.zero_to_six);
    census["6-12"] = detail::census_json(s.six_to_twelve);
    census["discarded"] = detail::census_json(s.discarded);
  }
  out.write_json("census.json", census);
}

inline void cmd_select(const RunConfig& c, OutputDir& out) {
  if (c.selector.k < 1) throw Error(ErrorKind::Usage, "--k must be >= 1");
  const Dataset d = detail::load_input(c);
  auto tagged = [&](FeatureMask m, const SelectorConfig& s) {
    m.params = to_json(s);
    m.seed = c.seed;
    return m;
  };
  if (!c.reconcile) {
    out.write_json("mask.json", to_json(tagged(run_selector(d, c.selector), c.selector)));
    return;
  }
  std::vector<FeatureMask> candidates;
  for (auto method : {SelectionMethod::Univariate, SelectionMethod::RFE, SelectionMethod::Stepwise}) {
    SelectorConfig s = c.selector;
    s.method = method;
    candidates.push_back(tagged(run_selector(d, s), s));
  }
  const MaskChoice choice = choose_mask(d, candidates, c.selector.base.with_seed(c.seed));
  nlohmann::json cands = nlohmann::json::array();
  for (const auto& [m, acc] : choice.candidates) cands.push_back({{"mask", to_json(m)}, {"loocv_accuracy", acc}});
  out.write_json("mask.json", to_json(choice.chosen));
  out.write_json("mask_candidates.json", {{"judge", to_json(c.selector.base)}, {"candidates", cands}});
}

namespace detail {

inline void write_grid_reports(const GridResult& g, OutputDir& out, const std::string& prefix) {
  out.write_json(prefix + ".json", to_json(g));
  std::ostringstream txt;
  for (const auto& e : g.ranked) {
    if (e.report)
      txt << render_table(*e.report, e.spec.key()) << '\n';
    else
      txt << e.spec.key() << "\nerror: " << e.error << "\n\n";
  }
  out.write(prefix + ".txt", txt.str());
}

}  // namespace detail

// Every family at default hyperparameters.
inline void cmd_spotcheck(const RunConfig& c, OutputDir& out) {
  const Dataset d = detail::load_input(c);
  const FeatureMask mask = detail::load_mask(c, d);
  const GridResult g = spot_check(d, mask, c.seed, detail::selection_mode(c), c.threads);
  detail::write_grid_reports(g, out, "spotcheck");
}

inline void cmd_baseline(const RunConfig& c, OutputDir& out) {
  const Dataset d = detail::load_input(c);
  const EvalReport b = weighted_random_baseline(d, c.baseline_runs, c.seed);
  nlohmann::json j = to_json(b);
  j["expected_accuracy"] = baseline_expected_accuracy(d);
  out.write_json("baseline.json", j);
  out.write("baseline.txt", render_table(b, "Weighted random baseline (" + std::to_string(c.baseline_runs) + " runs)"));
}

// Grid search, per-family best reports, the ensemble, the baseline, the
// improvement summary and tree exports.
inline void cmd_run(const RunConfig& c, OutputDir& out) {
  const Dataset d = detail::load_input(c);
  const FeatureMask mask = detail::load_mask(c, d);
  const GridSpec grids = detail::load_grids(c);
  const SelectionMode selection = detail::selection_mode(c);

  const GridResult g = grid_search(d, mask, grids, c.seed, selection, c.threads);
  detail::write_grid_reports(g, out, "grid");

  std::ostringstream bars;
  bars << "model,average_accuracy,td_accuracy,ar_accuracy\n";
  nlohmann::json per_family = nlohmann::json::object();
  for (auto f : kAllFamilies) {
    auto best = g.best_of(f);
    if (!best) continue;
    const std::string stem = "reports/" + detail::file_stem(f);
    nlohmann::json j = {{"spec", to_json(best->spec)}, {"report", to_json(*best->report)}};
    out.write_json(stem + ".json", j);
    out.write(stem + ".txt", render_table(*best->report, std::string(to_string(f)) + " " + best->spec.key()));
    bars << to_string(f) << ',' << format_double(best->report->average_row.accuracy) << ','
         << format_double(best->report->td_row.accuracy) << ',' << format_double(best->report->ar_row.accuracy) << '\n';
    per_family[std::string(to_string(f))] = best->report->accuracy();
  }

  const EvalReport baseline = weighted_random_baseline(d, c.baseline_runs, c.seed);
  out.write_json("baseline.json", to_json(baseline));
  out.write("baseline.txt", render_table(baseline, "Weighted random baseline"));

  const GridEntry& top = g.best();
  nlohmann::json improvement = {{"baseline_accuracy", baseline.accuracy()},
                                {"expected_baseline_accuracy", baseline_expected_accuracy(d)},
                                {"best_model", to_json(top.spec)},
                                {"best_model_accuracy", top.report->accuracy()},
                                {"best_model_improvement_pp", improvement_over_baseline(*top.report, baseline)}};
  nlohmann::json family_gain = nlohmann::json::object();
  for (const auto& [name, acc] : per_family.items())
    family_gain[name] = improvement_over_baseline(acc.get<double>(), baseline.accuracy());
  improvement["family_improvement_pp"] = family_gain;

  std::vector<LearnerSpec> tree_specs;
  if (c.ensemble) {
    const EnsembleSpec e = build_ensemble(g);
    const EvalReport er = evaluate_ensemble(d, mask, e, selection, c.threads);
    out.write_json("ensemble.json", {{"ensemble", to_json(e)}, {"report", to_json(er)}});
    out.write("ensemble.txt", render_table(er, "Majority-vote ensemble"));
    bars << "Ensemble," << format_double(er.average_row.accuracy) << ',' << format_double(er.td_row.accuracy) << ','
         << format_double(er.ar_row.accuracy) << '\n';
    improvement["ensemble_accuracy"] = er.accuracy();
    improvement["ensemble_improvement_pp"] = improvement_over_baseline(er, baseline);
    for (const auto& m : e.members) tree_specs.push_back(m);
  }
  bars << "Baseline," << format_double(baseline.average_row.accuracy) << ',' << format_double(baseline.td_row.accuracy)
       << ',' << format_double(baseline.ar_row.accuracy) << '\n';
  out.write("accuracy_bars.csv", bars.str());
  out.write_json("improvement.json", improvement);

  // Trees are exported for the best tree-based specs, refit on the full band.
  for (auto f : {Family::DecisionTree, Family::RandomForest})
    if (auto best = g.best_of(f)) tree_specs.push_back(best->spec);
  std::set<std::string> done;
  for (const auto& s : tree_specs) {
    if (s.family() != Family::DecisionTree && s.family() != Family::RandomForest) continue;
    if (!done.insert(detail::file_stem(s.family())).second) continue;
    const Model m = fit(d, mask, s);
    const std::string stem = "trees/" + detail::file_stem(s.family());
    out.write(stem + ".txt", export_tree(m, TreeFormat::Text));
    out.write(stem + ".dot", export_tree(m, TreeFormat::Dot));
  }
}

// Exports a saved model's tree, or fits config.learner on the input and exports that.
inline void cmd_export_tree(const RunConfig& c, OutputDir& out) {
  std::optional<Model> m;
  if (!c.model_path.empty()) {
    m = model_from_json(read_json_file(c.model_path));
  } else {
    const Dataset d = detail::load_input(c);
    const FeatureMask mask = detail::load_mask(c, d);
    m = fit(d, mask, c.learner.with_seed(c.seed));
    out.write_json("model.json", to_json(*m));
  }
  out.write("tree.txt", export_tree(*m, TreeFormat::Text, c.tree_index));
  out.write("tree.dot", export_tree(*m, TreeFormat::Dot, c.tree_index));
}

inline void cmd_synth(const RunConfig& c, OutputDir& out) {
  GeneratorProfile p;
  if (!c.profile_path.empty()) {
    p = profile_from_json(read_json_file(c.profile_path));
  } else if (c.preset == "census") {
    p = census_profile(c.band.value_or(AgeBand::ZeroToSix), c.separation, c.seed);
  } else if (c.preset == "accel-split") {
    p = acceleration_split_profile(c.seed);
  } else {
    throw Error(ErrorKind::Usage, "unknown synth preset '" + c.preset + "' (census | accel-split)");
  }
  const Dataset d = generate(p);
  out.write("synth.csv", to_csv_string(d));
  out.write_json("profile.json", to_json(p));
}

using Command = std::function<void(const RunConfig&, OutputDir&)>;

inline const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table = {
      {"preprocess", cmd_preprocess}, {"select", cmd_select},           {"spotcheck", cmd_spotcheck},
      {"run", cmd_run},               {"baseline", cmd_baseline},       {"export-tree", cmd_export_tree},
      {"synth", cmd_synth}};
  return table;
}

inline int exit_code_for(ErrorKind k) {
  return (k == ErrorKind::Usage || k == ErrorKind::Validation) ? 2 : 1;
}

struct CommandResult {
  int exit_code = 0;
  std::string error;
  std::vector<std::string> outputs;
};

// Runs `name` and always writes manifest.json next to its outputs.
inline CommandResult run_command(const std::string& name, const RunConfig& c) {
  auto it = commands().find(name);
  if (it == commands().end()) throw Error(ErrorKind::Usage, "unknown command '" + name + "'");
  CommandResult result;
  std::error_code ec;
  std::filesystem::create_directories(c.out_dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + c.out_dir + ": " + ec.message());
  OutputDir out(c.out_dir);
  try {
    it->second(c, out);
  } catch (const Error& e) {
    result.exit_code = exit_code_for(e.kind());
    result.error = e.what();
  } catch (const std::exception& e) {
    result.exit_code = 1;
    result.error = e.what();
  }
  result.outputs = out.written();
  std::sort(result.outputs.begin(), result.outputs.end());
  nlohmann::json manifest = {{"tool", "legmove"},
                             {"version", kVersion},
                             {"command", name},
                             {"config", to_json(c)},
                             {"status", result.exit_code == 0 ? "ok" : "error"},
                             {"exit_code", result.exit_code},
                             {"outputs", result.outputs}};
  if (!result.error.empty()) manifest["error"] = result.error;
  out.write_json("manifest.json", manifest);
  return result;
}

}  // namespace legmove
