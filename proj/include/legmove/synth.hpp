#pragma once

// Synthetic visit records over the canonical feature schema. Features are
// independent Gaussians per class; percentages are clamped to [0, 100] and each
// leg's laterality triple rescaled to sum to 100; other non-negative kinds are
// clamped at 0.

#include <string>
#include <vector>

#include "json.hpp"
#include "legmove/core.hpp"

namespace legmove {

struct ClassProfile {
  std::vector<double> mean;  // schema order
  std::vector<double> sd;
  std::size_t count = 0;
};

struct GeneratorProfile {
  FeatureSchema schema = FeatureSchema::canonical();
  ClassProfile td;
  ClassProfile ar;
  AgeBand band = AgeBand::ZeroToSix;
  double awake_hours = 10.0;
  std::uint64_t seed = 0;
};

// Typical-looking per-feature means and spreads for the canonical schema.
inline std::pair<std::vector<double>, std::vector<double>> reference_feature_moments() {
  // rate, pct_uni, pct_sync, pct_async, mean_dur, sd_dur, mean_avg, sd_avg, mean_peak, sd_peak
  const std::vector<double> mean_leg = {150.0, 60.0, 15.0, 25.0, 1.6, 1.1, 2.2, 0.9, 5.5, 2.4};
  const std::vector<double> sd_leg = {30.0, 6.0, 3.0, 4.0, 0.25, 0.2, 0.3, 0.15, 0.8, 0.4};
  std::vector<double> mean, sd;
  for (int leg = 0; leg < 2; ++leg) {
    mean.insert(mean.end(), mean_leg.begin(), mean_leg.end());
    sd.insert(sd.end(), sd_leg.begin(), sd_leg.end());
  }
  return {mean, sd};
}

inline std::pair<double, double> band_age_range(AgeBand b) {
  switch (b) {
    case AgeBand::ZeroToSix: return {0.5, 6.0};
    case AgeBand::SixToTwelve: return {6.0, 12.0};
    case AgeBand::Unbanded: return {0.5, 16.0};
  }
  return {0.5, 6.0};
}

// Deterministic given the profile (including its seed). Records are emitted TD
// first, then AR; ages are uniform in the band.
inline Dataset generate(const GeneratorProfile& p) {
  const auto& schema = p.schema;
  const std::size_t dims = schema.size();
  for (const ClassProfile* c : {&p.td, &p.ar}) {
    if (c->mean.size() != dims || c->sd.size() != dims)
      throw Error(ErrorKind::Validation, "generator profile: mean/sd length must match the schema");
    for (double s : c->sd)
      if (!(s >= 0.0)) throw Error(ErrorKind::Validation, "generator profile: sd must be >= 0");
  }
  if (p.td.count < 1 || p.ar.count < 1) throw Error(ErrorKind::Validation, "generator profile: need >= 1 record per class");
  if (!(p.awake_hours > 0.0)) throw Error(ErrorKind::Validation, "generator profile: awake_hours must be positive");

  Rng rng(p.seed);
  const auto [age_lo, age_hi] = band_age_range(p.band);
  const auto triples = schema.laterality_triples();
  std::vector<SampleRecord> records;
  auto emit = [&](const ClassProfile& c, Label label) {
    for (std::size_t k = 0; k < c.count; ++k) {
      SampleRecord r;
      char id[32];
      std::snprintf(id, sizeof id, "%s-%03zu", label == Label::AR ? "AR" : "TD", k + 1);
      r.infant_id = id;
      r.visit_index = 1;
      r.label = label;
      r.awake_hours = p.awake_hours;
      r.age_months = rng.uniform(age_lo, age_hi);
      if (!age_in_band(r.age_months, p.band)) r.age_months = age_lo;
      r.features.resize(dims);
      for (std::size_t j = 0; j < dims; ++j) {
        double v = c.sd[j] > 0.0 ? rng.normal(c.mean[j], c.sd[j]) : c.mean[j];
        const FeatureKind kind = schema.kind(j);
        if (kind == FeatureKind::Percent) v = std::clamp(v, 0.0, 100.0);
        if (is_nonnegative_kind(kind)) v = std::max(v, 0.0);
        r.features[j] = v;
      }
      for (const auto& t : triples) {
        const double s = r.features[t[0]] + r.features[t[1]] + r.features[t[2]];
        for (auto j : t) r.features[j] = s > 0.0 ? r.features[j] * 100.0 / s : 100.0 / 3.0;
      }
      records.push_back(std::move(r));
    }
  };
  emit(p.td, Label::TD);
  emit(p.ar, Label::AR);
  return Dataset(schema, std::move(records), p.band);
}

// Features shifted apart by the census fixture: movement rate, unilateral
// percentage, mean and peak acceleration of both legs.
inline std::vector<std::string> informative_features() {
  std::vector<std::string> out;
  for (const char* leg : {"L", "R"})
    for (const char* base : {"movements_per_awake_hour", "pct_unilateral", "mean_avg_accel", "mean_peak_accel"})
      out.push_back(std::string(base) + "_" + leg);
  return out;
}

// Class counts per band: 0-6 months 16 TD / 15 AR, 6-12 months 23 TD / 38 AR.
inline std::pair<std::size_t, std::size_t> census_counts(AgeBand band) {
  if (band == AgeBand::ZeroToSix) return {16, 15};
  if (band == AgeBand::SixToTwelve) return {23, 38};
  throw Error(ErrorKind::Usage, "census counts exist only for the 0-6 and 6-12 bands");
}

// Fixture with the census class counts for `band`. The informative features
// differ between classes by `separation` standard deviations (TD higher),
// split evenly around the reference mean; all other features share one
// distribution.
inline GeneratorProfile census_profile(AgeBand band, double separation, std::uint64_t seed) {
  if (!(separation >= 0.0)) throw Error(ErrorKind::Usage, "separation must be >= 0");
  const auto [n_td, n_ar] = census_counts(band);
  GeneratorProfile p;
  p.band = band;
  p.seed = seed;
  auto [mean, sd] = reference_feature_moments();
  p.td = {mean, sd, n_td};
  p.ar = {mean, sd, n_ar};
  for (const auto& name : informative_features()) {
    const std::size_t j = p.schema.require_index(name);
    p.td.mean[j] = mean[j] + 0.5 * separation * sd[j];
    p.ar.mean[j] = mean[j] - 0.5 * separation * sd[j];
  }
  return p;
}

inline Dataset paper_census_fixture(AgeBand band, double separation, std::uint64_t seed) {
  return generate(census_profile(band, separation, seed));
}

// Only mean_avg_accel_R differs between classes (TD 3.0 vs AR 1.5, sd 0.2 for
// that feature); 16 TD / 15 AR in the 0-6 band.
inline GeneratorProfile acceleration_split_profile(std::uint64_t seed) {
  GeneratorProfile p;
  p.band = AgeBand::ZeroToSix;
  p.seed = seed;
  auto [mean, sd] = reference_feature_moments();
  p.td = {mean, sd, 16};
  p.ar = {mean, sd, 15};
  const std::size_t j = p.schema.require_index("mean_avg_accel_R");
  p.td.mean[j] = 3.0;
  p.ar.mean[j] = 1.5;
  p.td.sd[j] = p.ar.sd[j] = 0.2;
  return p;
}

inline nlohmann::json to_json(const GeneratorProfile& p) {
  std::vector<std::string> kinds;
  for (auto k : p.schema.kinds()) kinds.emplace_back(to_string(k));
  auto cls = [](const ClassProfile& c) { return nlohmann::json{{"mean", c.mean}, {"sd", c.sd}, {"count", c.count}}; };
  return {{"features", p.schema.names()}, {"kinds", kinds},     {"td", cls(p.td)},           {"ar", cls(p.ar)},
          {"band", std::string(to_string(p.band))}, {"awake_hours", p.awake_hours}, {"seed", p.seed}};
}

// Missing keys fall back to the canonical schema / reference moments.
inline GeneratorProfile profile_from_json(const nlohmann::json& j) {
  try {
    GeneratorProfile p;
    if (j.contains("features")) {
      auto names = j.at("features").get<std::vector<std::string>>();
      if (j.contains("kinds")) {
        std::vector<FeatureKind> kinds;
        for (const auto& k : j.at("kinds")) {
          auto kind = parse_feature_kind(k.get<std::string>());
          if (!kind) throw Error(ErrorKind::Validation, "generator profile: unknown kind " + k.dump());
          kinds.push_back(*kind);
        }
        p.schema = FeatureSchema(std::move(names), std::move(kinds));
      } else {
        p.schema = FeatureSchema::from_names(std::move(names));
      }
    }
    auto [mean, sd] = reference_feature_moments();
    const bool canonical = p.schema == FeatureSchema::canonical();
    auto cls = [&](const char* key) {
      ClassProfile c;
      const auto& o = j.at(key);
      c.mean = o.contains("mean") ? o.at("mean").get<std::vector<double>>() : (canonical ? mean : std::vector<double>{});
      c.sd = o.contains("sd") ? o.at("sd").get<std::vector<double>>() : (canonical ? sd : std::vector<double>{});
      c.count = o.at("count").get<std::size_t>();
      return c;
    };
    p.td = cls("td");
    p.ar = cls("ar");
    if (j.contains("band")) {
      auto b = parse_age_band(j.at("band").get<std::string>());
      if (!b) throw Error(ErrorKind::Validation, "generator profile: unknown band " + j.at("band").dump());
      p.band = *b;
    }
    p.awake_hours = j.value("awake_hours", 10.0);
    p.seed = j.value("seed", std::uint64_t{0});
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("generator profile: ") + e.what());
  }
}

}  // namespace legmove
