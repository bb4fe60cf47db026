// legmove: classify infant leg-movement records as TD or AR.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "legmove.hpp"

namespace {

// Raw flag values; only flags actually given override the config file.
struct Flags {
  std::string config;
  std::optional<std::string> input, mask, grid, model, profile, band, out, method, base, direction, leakage, learner,
      preset;
  std::optional<long long> k;
  std::optional<double> corr_threshold, separation;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads, runs, tree_index;
  bool no_normalize = false;
  bool no_ensemble = false;
  bool reconcile = false;
};

legmove::RunConfig resolve(const Flags& f) {
  using namespace legmove;
  RunConfig c;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) c.out_dir = env;
  if (!f.config.empty()) c = config_from_json(read_json_file(f.config), c);
  if (f.input) c.input = *f.input;
  if (f.mask) c.mask_path = *f.mask;
  if (f.grid) c.grid_path = *f.grid;
  if (f.model) c.model_path = *f.model;
  if (f.profile) c.profile_path = *f.profile;
  if (f.band) {
    auto b = parse_age_band(*f.band);
    if (!b) throw Error(ErrorKind::Usage, "--band must be 0-6, 6-12 or unbanded");
    c.band = *b;
  }
  if (f.out) c.out_dir = *f.out;
  if (f.method) {
    auto m = parse_selection_method(*f.method);
    if (!m) throw Error(ErrorKind::Usage, "--method must be univariate, rfe or stepwise");
    c.selector.method = *m;
  }
  if (f.k) {
    if (*f.k < 1) throw Error(ErrorKind::Usage, "--k must be >= 1");
    c.selector.k = static_cast<std::size_t>(*f.k);
  }
  if (f.corr_threshold) c.selector.corr_threshold = *f.corr_threshold;
  if (f.base) {
    auto fam = parse_family(*f.base);
    if (!fam) throw Error(ErrorKind::Usage, "--base: unknown family '" + *f.base + "'");
    c.selector.base = LearnerSpec(*fam);
  }
  if (f.direction) {
    if (*f.direction == "forward") c.selector.direction = StepDirection::Forward;
    else if (*f.direction == "backward") c.selector.direction = StepDirection::Backward;
    else throw Error(ErrorKind::Usage, "--direction must be forward or backward");
  }
  if (f.leakage) {
    auto l = parse_leakage(*f.leakage);
    if (!l) throw Error(ErrorKind::Usage, "--leakage must be fixed or per-fold");
    c.leakage = *l;
  }
  if (f.learner) {
    // Either a family name or an inline JSON spec.
    if (auto fam = parse_family(*f.learner)) {
      c.learner = LearnerSpec(*fam);
    } else {
      try {
        c.learner = spec_from_json(nlohmann::json::parse(*f.learner));
      } catch (const nlohmann::json::exception&) {
        throw Error(ErrorKind::Usage, "--learner: expected a family name or a JSON spec");
      }
    }
  }
  if (f.preset) c.preset = *f.preset;
  if (f.separation) c.separation = *f.separation;
  if (f.seed) c.seed = *f.seed;
  if (f.threads) c.threads = *f.threads;
  if (f.runs) c.baseline_runs = *f.runs;
  if (f.tree_index) c.tree_index = *f.tree_index;
  if (f.no_normalize) c.normalize = false;
  if (f.no_ensemble) c.ensemble = false;
  if (f.reconcile) c.reconcile = true;
  if (c.threads < 1) throw Error(ErrorKind::Usage, "--threads must be >= 1");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leg-movement TD/AR classification pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", legmove::kVersion);
  Flags f;

  auto common = [&](CLI::App* s) {
    s->add_option("--config", f.config, "JSON config; flags override its values");
    s->add_option("-o,--out", f.out, std::string("Output directory (default $") + legmove::kOutDirEnv + " or .)");
    s->add_option("--seed", f.seed, "Seed for every random choice");
    s->add_option("--threads", f.threads, "Worker cap; results do not depend on it");
  };
  auto data = [&](CLI::App* s) {
    s->add_option("input", f.input, "Input CSV");
    s->add_option("--band", f.band, "Age band the input must lie in: 0-6 | 6-12 | unbanded");
    s->add_flag("--no-normalize", f.no_normalize, "Skip awake-time normalization of count columns");
  };
  auto selector = [&](CLI::App* s) {
    s->add_option("--method", f.method, "univariate | rfe | stepwise");
    s->add_option("--k", f.k, "Features to keep (univariate, rfe)");
    s->add_option("--corr-threshold", f.corr_threshold, "Drop one of each pair with |r| above this");
    s->add_option("--base", f.base, "Base learner family for rfe / stepwise");
    s->add_option("--direction", f.direction, "Stepwise direction: forward | backward");
  };

  auto* pre = app.add_subcommand("preprocess", "Normalize and split into 0-6 / 6-12 month bands");
  common(pre);
  data(pre);

  auto* sel = app.add_subcommand("select", "Select features and write mask.json");
  common(sel);
  data(sel);
  selector(sel);
  sel->add_flag("--reconcile", f.reconcile, "Run all three methods and keep the mask with the best LOOCV accuracy");

  auto* spot = app.add_subcommand("spotcheck", "LOOCV every family at default settings");
  common(spot);
  data(spot);
  spot->add_option("--mask", f.mask, "mask.json (default: all features)");
  spot->add_option("--leakage", f.leakage, "fixed | per-fold feature selection");
  selector(spot);

  auto* run = app.add_subcommand("run", "Grid search, ensemble, baseline and reports");
  common(run);
  data(run);
  run->add_option("--mask", f.mask, "mask.json (default: all features)");
  run->add_option("--grid", f.grid, "Grid JSON keyed by family (default: built-in lattices)");
  run->add_option("--leakage", f.leakage, "fixed | per-fold feature selection");
  run->add_flag("--no-ensemble", f.no_ensemble, "Skip the majority-vote ensemble");
  run->add_option("--runs", f.runs, "Baseline repetitions");
  selector(run);

  auto* base = app.add_subcommand("baseline", "Weighted-random baseline");
  common(base);
  data(base);
  base->add_option("--runs", f.runs, "Repetitions to average");

  auto* tree = app.add_subcommand("export-tree", "Fit a tree (or load a model) and export text + DOT");
  common(tree);
  data(tree);
  tree->add_option("--mask", f.mask, "mask.json (default: all features)");
  tree->add_option("--model", f.model, "Saved model JSON instead of fitting");
  tree->add_option("--learner", f.learner, "DecisionTree | RandomForest, or a JSON spec");
  tree->add_option("--tree-index", f.tree_index, "Forest member to export");

  auto* syn = app.add_subcommand("synth", "Generate a synthetic dataset");
  common(syn);
  syn->add_option("--profile", f.profile, "Generator profile JSON");
  syn->add_option("--preset", f.preset, "census | accel-split");
  syn->add_option("--band", f.band, "Census band: 0-6 | 6-12");
  syn->add_option("--separation", f.separation, "Class separation in sd units (census preset)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const legmove::RunConfig cfg = resolve(f);
    const std::string name = app.get_subcommands().front()->get_name();
    const auto result = legmove::run_command(name, cfg);
    if (result.exit_code != 0) {
      std::cerr << "legmove " << name << ": " << result.error << '\n';
      return result.exit_code;
    }
    for (const auto& o : result.outputs) std::cout << (std::filesystem::path(cfg.out_dir) / o).string() << '\n';
    std::cout << (std::filesystem::path(cfg.out_dir) / "manifest.json").string() << '\n';
    return 0;
  } catch (const legmove::Error& e) {
    std::cerr << "legmove: " << e.what() << '\n';
    return legmove::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "legmove: " << e.what() << '\n';
    return 1;
  }
}
