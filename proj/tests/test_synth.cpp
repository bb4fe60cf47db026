#include <gtest/gtest.h>

#include "support.hpp"

using namespace legmove;

namespace {

std::vector<double> column(const Dataset& d, std::size_t j, Label l) {
  std::vector<double> out;
  for (const auto& r : d.records())
    if (r.label == l) out.push_back(r.features[j]);
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST(Synth, ZeroSdReproducesMeans) {
  GeneratorProfile p = census_profile(AgeBand::ZeroToSix, 0.0, 3);
  std::fill(p.td.sd.begin(), p.td.sd.end(), 0.0);
  std::fill(p.ar.sd.begin(), p.ar.sd.end(), 0.0);
  const Dataset d = generate(p);
  for (const auto& r : d.records()) {
    const auto& c = r.label == Label::TD ? p.td : p.ar;
    for (std::size_t j = 0; j < d.schema().size(); ++j) EXPECT_NEAR(r.features[j], c.mean[j], 1e-9) << d.schema().name(j);
  }
}

TEST(Synth, CensusCounts) {
  const Dataset a = paper_census_fixture(AgeBand::ZeroToSix, 3.0, 1);
  EXPECT_EQ(a.size(), 31u);
  EXPECT_EQ(a.count(Label::TD), 16u);
  EXPECT_EQ(a.count(Label::AR), 15u);
  const Dataset b = paper_census_fixture(AgeBand::SixToTwelve, 3.0, 1);
  EXPECT_EQ(b.size(), 61u);
  EXPECT_EQ(b.count(Label::TD), 23u);
  EXPECT_EQ(b.count(Label::AR), 38u);
  EXPECT_THROW(census_counts(AgeBand::Unbanded), Error);
}

TEST(Synth, ZeroSeparationGivesOneDistribution) {
  const auto p = census_profile(AgeBand::SixToTwelve, 0.0, 2);
  EXPECT_EQ(p.td.mean, p.ar.mean);
  EXPECT_EQ(p.td.sd, p.ar.sd);
}

TEST(Synth, SeparationShiftsOnlyInformativeFeatures) {
  const auto p = census_profile(AgeBand::ZeroToSix, 2.0, 2);
  const auto info = informative_features();
  for (std::size_t j = 0; j < p.schema.size(); ++j) {
    const bool informative = std::find(info.begin(), info.end(), p.schema.name(j)) != info.end();
    if (informative)
      EXPECT_NEAR(p.td.mean[j] - p.ar.mean[j], 2.0 * p.td.sd[j], 1e-9) << p.schema.name(j);
    else
      EXPECT_EQ(p.td.mean[j], p.ar.mean[j]) << p.schema.name(j);
  }
}

TEST(Synth, LargeSampleMomentsFollowProfile) {
  GeneratorProfile p = census_profile(AgeBand::ZeroToSix, 3.0, 8);
  p.td.count = p.ar.count = 4000;
  const Dataset d = generate(p);
  const std::size_t j = d.schema().require_index("mean_avg_accel_L");
  EXPECT_NEAR(mean_of(column(d, j, Label::TD)), p.td.mean[j], 0.02);
  EXPECT_NEAR(mean_of(column(d, j, Label::AR)), p.ar.mean[j], 0.02);
}

TEST(Synth, Deterministic) {
  EXPECT_EQ(to_csv_string(paper_census_fixture(AgeBand::ZeroToSix, 3.0, 42)),
            to_csv_string(paper_census_fixture(AgeBand::ZeroToSix, 3.0, 42)));
  EXPECT_NE(to_csv_string(paper_census_fixture(AgeBand::ZeroToSix, 3.0, 42)),
            to_csv_string(paper_census_fixture(AgeBand::ZeroToSix, 3.0, 43)));
}

TEST(Synth, RecordsSatisfyInvariants) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GeneratorProfile p = census_profile(seed % 2 ? AgeBand::SixToTwelve : AgeBand::ZeroToSix, 3.0, seed);
    for (auto& s : p.td.sd) s *= 4;  // push values against the clamps
    const Dataset d = generate(p);
    for (const auto& r : d.records()) {
      EXPECT_NO_THROW(validate_record(r, d.schema()));
      EXPECT_TRUE(age_in_band(r.age_months, d.band()));
      for (const auto& t : d.schema().laterality_triples())
        EXPECT_NEAR(r.features[t[0]] + r.features[t[1]] + r.features[t[2]], 100.0, 1e-9);
      for (std::size_t j = 0; j < d.schema().size(); ++j)
        if (is_nonnegative_kind(d.schema().kind(j))) EXPECT_GE(r.features[j], 0.0);
    }
  }
}

TEST(Synth, CsvRoundTrip) {
  const Dataset d = paper_census_fixture(AgeBand::ZeroToSix, 3.0, 5);
  std::istringstream in(to_csv_string(d));
  const Dataset back = read_csv(in);
  ASSERT_EQ(back.size(), d.size());
  EXPECT_EQ(back.schema().names(), d.schema().names());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(back[i].infant_id, d[i].infant_id);
    EXPECT_EQ(back[i].label, d[i].label);
    for (std::size_t j = 0; j < d.schema().size(); ++j) EXPECT_DOUBLE_EQ(back[i].features[j], d[i].features[j]);
  }
}

TEST(Synth, AccelerationSplitProfile) {
  const auto p = acceleration_split_profile(0);
  const std::size_t j = p.schema.require_index("mean_avg_accel_R");
  EXPECT_EQ(p.td.mean[j], 3.0);
  EXPECT_EQ(p.ar.mean[j], 1.5);
  EXPECT_EQ(p.td.count, 16u);
  EXPECT_EQ(p.ar.count, 15u);
  for (std::size_t k = 0; k < p.schema.size(); ++k)
    if (k != j) EXPECT_EQ(p.td.mean[k], p.ar.mean[k]);
}

TEST(Synth, ProfileJsonRoundTrip) {
  const auto p = census_profile(AgeBand::SixToTwelve, 1.5, 77);
  const auto back = profile_from_json(to_json(p));
  EXPECT_EQ(to_json(back), to_json(p));
  EXPECT_EQ(to_csv_string(generate(back)), to_csv_string(generate(p)));
}

TEST(Synth, MinimalProfileUsesReferenceMoments) {
  const auto p = profile_from_json(nlohmann::json::parse(R"({"td": {"count": 3}, "ar": {"count": 4}, "seed": 1})"));
  EXPECT_EQ(p.td.mean, reference_feature_moments().first);
  EXPECT_EQ(generate(p).size(), 7u);
}

TEST(Synth, InvalidProfilesRejected) {
  GeneratorProfile p = census_profile(AgeBand::ZeroToSix, 1.0, 1);
  p.td.sd[0] = -1;
  EXPECT_THROW(generate(p), Error);
  p = census_profile(AgeBand::ZeroToSix, 1.0, 1);
  p.ar.count = 0;
  EXPECT_THROW(generate(p), Error);
  p = census_profile(AgeBand::ZeroToSix, 1.0, 1);
  p.td.mean.pop_back();
  EXPECT_THROW(generate(p), Error);
  EXPECT_THROW(census_profile(AgeBand::ZeroToSix, -1.0, 1), Error);
  EXPECT_THROW(profile_from_json(nlohmann::json::parse(R"({"td": {}})")), Error);
  EXPECT_THROW(profile_from_json(nlohmann::json::parse(R"({"td": {"count": 1}, "ar": {"count": 1}, "band": "9-9"})")),
               Error);
}
