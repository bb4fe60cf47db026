#include <gtest/gtest.h>

#include "support.hpp"

using namespace legmove;

TEST(LearnerSpec, RejectsUnknownAndInvalidParams) {
  auto kind_of = [](auto&& make) {
    try {
      make();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  EXPECT_EQ(kind_of([] { LearnerSpec(Family::SVM, {{"depth", 3.0}}); }), ErrorKind::Validation);
  EXPECT_EQ(kind_of([] { LearnerSpec(Family::SVM, {{"C", -1.0}}); }), ErrorKind::Validation);
  EXPECT_EQ(kind_of([] { LearnerSpec(Family::SVM, {{"kernel", std::string("poly")}}); }), ErrorKind::Validation);
  EXPECT_EQ(kind_of([] { LearnerSpec(Family::KNN, {{"k", 2.5}}); }), ErrorKind::Validation);
  EXPECT_EQ(kind_of([] { LearnerSpec(Family::DecisionTree, {{"pruning_confidence", 1.0}}); }), ErrorKind::Validation);
  EXPECT_NO_THROW(LearnerSpec(Family::DecisionTree, {{"max_depth", std::string("none")}}));
  EXPECT_NO_THROW(LearnerSpec(Family::SVM, {{"gamma", std::string("inv_d")}, {"kernel", std::string("rbf")}}));
}

TEST(LearnerSpec, JsonRoundTrip) {
  const LearnerSpec s(Family::SVM, {{"C", 10.0}, {"kernel", std::string("linear")}}, 17);
  EXPECT_EQ(spec_from_json(to_json(s)), s);
  EXPECT_EQ(s.key(), R"({"family":"SVM","params":{"C":10.0,"kernel":"linear"},"seed":17})");
}

TEST(Family, ParsesAliases) {
  EXPECT_EQ(parse_family("LogReg"), Family::LogisticRegression);
  EXPECT_EQ(parse_family("RF"), Family::RandomForest);
  EXPECT_EQ(parse_family("SVM"), Family::SVM);
  EXPECT_FALSE(parse_family("Perceptron"));
}

TEST(Model, PredictChecksSchemaFingerprint) {
  const Dataset d = paper_census_fixture(AgeBand::ZeroToSix, 2.0, 1);
  const Model m = fit(d, infant_0_6_mask(), LearnerSpec(Family::LogisticRegression));
  EXPECT_NO_THROW(m.predict(d, 0));
  const auto other = FeatureSchema::from_names({"x"});
  EXPECT_THROW(m.predict(other, std::vector<double>{1.0}), Error);
}

TEST(Model, JsonRoundTripPreservesPredictions) {
  const Dataset d = paper_census_fixture(AgeBand::ZeroToSix, 1.0, 2);
  const auto mask = FeatureMask::all(d.schema());
  for (auto f : kAllFamilies) {
    LearnerSpec s(f, {}, 5);
    if (f == Family::RandomForest) s = s.with("n_trees", 10.0);
    const Model m = fit(d, mask, s);
    const nlohmann::json j = to_json(m);
    const Model back = model_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(to_json(back).dump(), j.dump()) << to_string(f);
    const Dataset probe = paper_census_fixture(AgeBand::ZeroToSix, 0.5, 77);
    for (std::size_t i = 0; i < probe.size(); ++i) EXPECT_EQ(back.predict(probe, i), m.predict(probe, i)) << to_string(f);
  }
}

TEST(Model, RejectsUnknownFormatVersion) {
  const Dataset d = paper_census_fixture(AgeBand::ZeroToSix, 1.0, 2);
  nlohmann::json j = to_json(fit(d, infant_0_6_mask(), LearnerSpec(Family::KNN)));
  j["version"] = 99;
  EXPECT_THROW(model_from_json(j), Error);
}

TEST(Model, SingleClassTrainingIsDegenerate) {
  const auto d = legmove::testing::make_dataset({{1}, {2}}, {Label::TD, Label::TD});
  try {
    fit(d, FeatureMask::all(d.schema()), LearnerSpec(Family::KNN, {{"k", 1.0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateDataset);
  }
}

TEST(Model, ImportanceSupport) {
  EXPECT_TRUE(supports_importances(LearnerSpec(Family::DecisionTree)));
  EXPECT_TRUE(supports_importances(LearnerSpec(Family::SVM, {{"kernel", std::string("linear")}})));
  EXPECT_FALSE(supports_importances(LearnerSpec(Family::SVM)));
  EXPECT_FALSE(supports_importances(LearnerSpec(Family::KNN)));
  EXPECT_FALSE(supports_importances(LearnerSpec(Family::AdaBoost)));
}
