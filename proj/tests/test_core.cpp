#include <gtest/gtest.h>

#include "support.hpp"

using namespace legmove;

TEST(Label, ParsesCaseInsensitively) {
  EXPECT_EQ(parse_label("ar"), Label::AR);
  EXPECT_EQ(parse_label("Td"), Label::TD);
  EXPECT_EQ(parse_label("AR"), Label::AR);
  EXPECT_FALSE(parse_label("maybe").has_value());
  EXPECT_EQ(kPositive, Label::AR);
}

TEST(Label, ZeroScoreGoesToAr) {
  EXPECT_EQ(label_from_score(0.0), Label::AR);
  EXPECT_EQ(label_from_score(-1e-300), Label::TD);
}

TEST(FeatureSchema, CanonicalHasTwentySlots) {
  const auto s = FeatureSchema::canonical();
  ASSERT_EQ(s.size(), 20u);
  EXPECT_EQ(s.name(0), "movements_per_awake_hour_L");
  EXPECT_EQ(s.name(10), "movements_per_awake_hour_R");
  EXPECT_EQ(s.name(19), "sd_peak_accel_R");
  EXPECT_EQ(s.kind(s.require_index("pct_unilateral_R")), FeatureKind::Percent);
  EXPECT_EQ(s.kind(s.require_index("mean_avg_accel_L")), FeatureKind::AccelG);
  EXPECT_EQ(s.laterality_triples().size(), 2u);
}

TEST(FeatureSchema, RejectsDuplicateNames) {
  try {
    FeatureSchema::from_names({"a", "b", "a"});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Validation);
    EXPECT_NE(std::string(e.what()).find("'a'"), std::string::npos);
  }
}

TEST(FeatureSchema, FingerprintDependsOnNamesAndKinds) {
  const auto a = FeatureSchema::from_names({"x", "y"});
  const auto b = FeatureSchema::from_names({"y", "x"});
  const FeatureSchema c({"x", "y"}, {FeatureKind::Real, FeatureKind::Percent});
  EXPECT_EQ(a.fingerprint(), FeatureSchema::from_names({"x", "y"}).fingerprint());
  EXPECT_NE(a.fingerprint(), b.fingerprint());
  EXPECT_NE(a.fingerprint(), c.fingerprint());
}

TEST(FeatureSchema, InfersKindsFromNames) {
  EXPECT_EQ(infer_feature_kind("pct_unilateral_L"), FeatureKind::Percent);
  EXPECT_EQ(infer_feature_kind("movement_count_R"), FeatureKind::Count);
  EXPECT_EQ(infer_feature_kind("movements_per_awake_hour_R"), FeatureKind::Rate);
  EXPECT_EQ(infer_feature_kind("sd_peak_accel_R"), FeatureKind::AccelG);
  EXPECT_EQ(infer_feature_kind("mean_duration_L"), FeatureKind::DurationS);
  EXPECT_EQ(infer_feature_kind("something_else"), FeatureKind::Real);
}

namespace {

SampleRecord canonical_record() {
  SampleRecord r;
  r.infant_id = "A";
  r.age_months = 3.0;
  r.features = {150, 60, 15, 25, 1.6, 1.1, 2.2, 0.9, 5.5, 2.4, 150, 60, 15, 25, 1.6, 1.1, 2.2, 0.9, 5.5, 2.4};
  return r;
}

void expect_invalid(const SampleRecord& r, const std::string& fragment) {
  try {
    validate_record(r, FeatureSchema::canonical());
    FAIL() << "expected a validation error mentioning " << fragment;
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Validation);
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(SampleRecord, ValidRecordPasses) { EXPECT_NO_THROW(validate_record(canonical_record(), FeatureSchema::canonical())); }

TEST(SampleRecord, InvariantViolationsNameTheColumn) {
  auto r = canonical_record();
  r.features[1] = 101;
  r.features[3] = -16;
  expect_invalid(r, "pct_unilateral_L");

  r = canonical_record();
  r.features[2] = 16;  // triple sums to 101
  expect_invalid(r, "laterality");

  r = canonical_record();
  r.features[16] = -0.1;
  expect_invalid(r, "mean_avg_accel_R");

  r = canonical_record();
  r.features.pop_back();
  expect_invalid(r, "schema has 20");

  r = canonical_record();
  r.visit_index = 0;
  expect_invalid(r, "visit_index");

  r = canonical_record();
  r.awake_hours = 0.0;
  expect_invalid(r, "awake_hours");
}

TEST(SampleRecord, LateralityToleranceIsHalfAPoint) {
  auto r = canonical_record();
  r.features[1] = 60.49;
  EXPECT_NO_THROW(validate_record(r, FeatureSchema::canonical()));
  r.features[1] = 60.51;
  EXPECT_THROW(validate_record(r, FeatureSchema::canonical()), Error);
}

TEST(AgeBand, SixMonthsBelongsToUpperBand) {
  EXPECT_TRUE(age_in_band(5.999, AgeBand::ZeroToSix));
  EXPECT_FALSE(age_in_band(6.0, AgeBand::ZeroToSix));
  EXPECT_TRUE(age_in_band(6.0, AgeBand::SixToTwelve));
  EXPECT_TRUE(age_in_band(12.0, AgeBand::SixToTwelve));
  EXPECT_FALSE(age_in_band(12.01, AgeBand::SixToTwelve));
}

TEST(Dataset, RejectsRecordsOutsideItsBand) {
  auto r = canonical_record();
  r.age_months = 7.0;
  EXPECT_THROW(Dataset(FeatureSchema::canonical(), {r}, AgeBand::ZeroToSix), Error);
  EXPECT_NO_THROW(Dataset(FeatureSchema::canonical(), {r}, AgeBand::SixToTwelve));
}

TEST(ClassWeights, Symmetric) {
  const auto w = balanced_class_weights(10, 10);
  EXPECT_DOUBLE_EQ(w.td_weight, 1.0);
  EXPECT_DOUBLE_EQ(w.ar_weight, 1.0);
}

TEST(ClassWeights, ZeroToSixCounts) {
  const auto w = balanced_class_weights(16, 15);
  EXPECT_DOUBLE_EQ(w.td_weight, 31.0 / 32.0);
  EXPECT_DOUBLE_EQ(w.ar_weight, 31.0 / 30.0);
  EXPECT_NEAR(w.td_weight, 0.9688, 5e-5);
  EXPECT_NEAR(w.ar_weight, 1.0333, 5e-5);
}

TEST(ClassWeights, SixToTwelveCounts) {
  const auto w = balanced_class_weights(23, 38);
  EXPECT_DOUBLE_EQ(w.td_weight, 61.0 / 46.0);
  EXPECT_DOUBLE_EQ(w.ar_weight, 61.0 / 76.0);
  EXPECT_NEAR(w.td_weight, 1.3261, 5e-5);
  EXPECT_NEAR(w.ar_weight, 0.8026, 5e-5);
}

TEST(ClassWeights, SingleClassIsDegenerate) {
  try {
    balanced_class_weights(5, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateDataset);
  }
}

TEST(ClassWeights, WeightedMassIsEqualAcrossClasses) {
  for (std::size_t td = 1; td < 40; td += 3)
    for (std::size_t ar = 1; ar < 40; ar += 5) {
      const auto w = balanced_class_weights(td, ar);
      const double mt = w.td_weight * static_cast<double>(td), ma = w.ar_weight * static_cast<double>(ar);
      EXPECT_NEAR(mt, ma, 1e-12 * mt);
    }
}

TEST(Rng, DeterministicAndInRange) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    if (u != c.uniform()) differs = true;
  }
  EXPECT_TRUE(differs);
  Rng r(7);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(r.index(13), 13u);
}

TEST(Rng, NormalMoments) {
  Rng r(1);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double v = r.normal(2.0, 3.0);
    s += v;
    s2 += v * v;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  EXPECT_NEAR(mean, 2.0, 0.05);
  EXPECT_NEAR(std::sqrt(var), 3.0, 0.05);
}

TEST(FormatDouble, RoundTrips) {
  Rng r(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = r.normal(0, 1e3) * std::pow(10.0, r.uniform(-8, 8));
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_FALSE(parse_double("1.5x").has_value());
  EXPECT_FALSE(parse_double("").has_value());
}
