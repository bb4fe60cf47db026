#include <gtest/gtest.h>

#include "support.hpp"

using namespace legmove;
using legmove::testing::slurp;

namespace {

Dataset parse(const std::string& text, const SchemaMode& mode = AutoSchema{}) {
  std::istringstream in(text);
  return read_csv(in, mode, "test.csv");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Validation);
    return e.what();
  }
  ADD_FAILURE() << "expected a validation error";
  return {};
}

const std::string kHeader = "infant_id,visit_index,age_months,label,mean_avg_accel_R,pct_unilateral_R\n";

}  // namespace

TEST(ReadCsv, WellFormedThreeRows) {
  const auto d = parse(kHeader + "a,1,2,TD,2.5,50\nb,1,3,AR,1.5,40\nc,2,4,TD,3,45\n");
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d.schema().names(), (std::vector<std::string>{"mean_avg_accel_R", "pct_unilateral_R"}));
  EXPECT_EQ(d[1].label, Label::AR);
  EXPECT_EQ(d[2].visit_index, 2);
  EXPECT_DOUBLE_EQ(d[0].features[0], 2.5);
  EXPECT_FALSE(d[0].aims_score.has_value());
}

TEST(ReadCsv, LowercaseLabel) {
  const auto d = parse(kHeader + "a,1,2,ar,2.5,50\n");
  EXPECT_EQ(d[0].label, Label::AR);
}

TEST(ReadCsv, CountColumnsNeedAwakeHours) {
  const auto msg = error_of("infant_id,visit_index,age_months,label,movement_count_R\na,1,2,TD,1200\n");
  EXPECT_NE(msg.find("awake_hours"), std::string::npos) << msg;
}

TEST(ReadCsv, ErrorsNameRowAndColumn) {
  auto msg = error_of(kHeader + "a,1,2,TD,2.5,50\nb,1,3,AR,oops,40\n");
  EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
  EXPECT_NE(msg.find("mean_avg_accel_R"), std::string::npos) << msg;

  msg = error_of(kHeader + "a,1,2,TD,2.5,150\n");
  EXPECT_NE(msg.find("pct_unilateral_R"), std::string::npos) << msg;

  msg = error_of(kHeader + "a,1,2,XX,2.5,50\n");
  EXPECT_NE(msg.find("label"), std::string::npos) << msg;

  msg = error_of(kHeader + "a,1,2,TD,2.5\n");
  EXPECT_NE(msg.find("cells"), std::string::npos) << msg;

  msg = error_of("infant_id,age_months,label,x\na,2,TD,1\n");
  EXPECT_NE(msg.find("visit_index"), std::string::npos) << msg;
}

TEST(ReadCsv, EmptyInputIsAnError) {
  const auto msg = error_of("");
  EXPECT_NE(msg.find("empty"), std::string::npos);
}

TEST(ReadCsv, ExplicitSchemaSelectsAndOrdersColumns) {
  const FeatureSchema s({"pct_unilateral_R"}, {FeatureKind::Percent});
  const auto d = parse(kHeader + "a,1,2,TD,2.5,50\n", ExplicitSchema{s});
  EXPECT_EQ(d.schema(), s);
  EXPECT_EQ(d[0].features, std::vector<double>{50});
  EXPECT_THROW(parse(kHeader + "a,1,2,TD,2.5,50\n", ExplicitSchema{FeatureSchema::from_names({"nope"})}), Error);
}

TEST(ReadCsv, QuotedFields) {
  const auto d = parse(kHeader + "\"x,\"\"y\"\"\",1,2,TD,2.5,50\n");
  EXPECT_EQ(d[0].infant_id, "x,\"y\"");
}

TEST(Golden, LoadNormalizeWrite) {
  const std::string dir = LEGMOVE_TEST_DATA;
  const auto raw = load_csv(dir + "/golden_small.csv");
  ASSERT_EQ(raw.size(), 5u);
  EXPECT_EQ(raw.schema().kind(0), FeatureKind::Count);
  const auto norm = normalize_by_awake_time(raw);
  EXPECT_EQ(norm.schema().name(0), "movements_per_awake_hour_L");
  EXPECT_EQ(norm.schema().kind(0), FeatureKind::Rate);
  EXPECT_DOUBLE_EQ(norm[0].features[0], 150.0);  // 1200 movements over 8 awake hours
  EXPECT_EQ(to_csv_string(norm), slurp(dir + "/golden_small_normalized.csv"));
}

TEST(Normalize, TwoSensorsSameRate) {
  const auto d = parse(
      "infant_id,visit_index,age_months,label,awake_hours,movement_count_R\n"
      "a,1,2,TD,8,1200\n"
      "b,1,2,TD,10,1500\n");
  const auto n = normalize_by_awake_time(d);
  EXPECT_EQ(n[0].features, n[1].features);
}

TEST(Normalize, AlreadyNormalizedIsUnchanged) {
  const auto n = normalize_by_awake_time(load_csv(std::string(LEGMOVE_TEST_DATA) + "/golden_small.csv"));
  EXPECT_EQ(normalize_by_awake_time(n), n);
}

TEST(Normalize, RateNames) {
  EXPECT_EQ(rate_name_for("movement_count_L"), "movements_per_awake_hour_L");
  EXPECT_EQ(rate_name_for("kicks"), "kicks_per_awake_hour");
}

TEST(SplitAgeBands, BoundaryConvention) {
  std::vector<std::vector<double>> x;
  std::vector<Label> y;
  for (int i = 0; i < 5; ++i) {
    x.push_back({double(i)});
    y.push_back(Label::TD);
  }
  auto base = legmove::testing::make_dataset(x, y);
  std::vector<SampleRecord> recs = base.records();
  const double ages[] = {2, 5.9, 6.0, 11.5, 14};
  for (int i = 0; i < 5; ++i) recs[static_cast<std::size_t>(i)].age_months = ages[i];
  const auto s = split_age_bands(Dataset(base.schema(), recs));
  ASSERT_EQ(s.zero_to_six.size(), 2u);
  ASSERT_EQ(s.six_to_twelve.size(), 2u);
  ASSERT_EQ(s.discarded.size(), 1u);
  EXPECT_EQ(s.zero_to_six[0].age_months, 2);
  EXPECT_EQ(s.zero_to_six[1].age_months, 5.9);
  EXPECT_EQ(s.six_to_twelve[0].age_months, 6.0);
  EXPECT_EQ(s.six_to_twelve[1].age_months, 11.5);
  EXPECT_EQ(s.discarded[0].age_months, 14);
  EXPECT_EQ(s.zero_to_six.band(), AgeBand::ZeroToSix);
}

TEST(SplitAgeBands, AllYoung) {
  const auto s = split_age_bands(paper_census_fixture(AgeBand::ZeroToSix, 1.0, 3));
  EXPECT_EQ(s.zero_to_six.size(), 31u);
  EXPECT_TRUE(s.six_to_twelve.empty());
  EXPECT_TRUE(s.discarded.empty());
}

TEST(SplitAgeBands, CensusCounts) {
  const auto young = paper_census_fixture(AgeBand::ZeroToSix, 1.0, 11);
  const auto old = paper_census_fixture(AgeBand::SixToTwelve, 1.0, 12);
  std::vector<SampleRecord> all = young.records();
  for (auto r : old.records()) {
    r.infant_id += "-b";
    all.push_back(r);
  }
  const auto s = split_age_bands(Dataset(young.schema(), all));
  EXPECT_EQ(s.zero_to_six.count(Label::TD), 16u);
  EXPECT_EQ(s.zero_to_six.count(Label::AR), 15u);
  EXPECT_EQ(s.six_to_twelve.count(Label::TD), 23u);
  EXPECT_EQ(s.six_to_twelve.count(Label::AR), 38u);
}

TEST(WriteCsv, RoundTripsLosslessly) {
  const auto d = paper_census_fixture(AgeBand::SixToTwelve, 2.0, 5);
  std::istringstream in(to_csv_string(d));
  const auto back = read_csv(in);
  EXPECT_EQ(back.schema(), d.schema());
  EXPECT_EQ(back.records(), d.records());
}
