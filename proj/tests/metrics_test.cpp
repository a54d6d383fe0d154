#include <gtest/gtest.h>

#include "masses/metrics.hpp"

namespace masses {
namespace {

AnswerPattern fig2_pattern() {
  return AnswerPattern::from_counts(
      {{"diced", 4}, {"cubed", 2}, {"squares", 2}, {"with knife", 1}, {"into cubes", 1}});
}

GroupedPattern labelled(const AnswerPattern& p, const std::vector<std::string>& together) {
  FixtureBackend b;
  for (const auto& a : together) b.set_label(a, "g");
  return group_pattern(p, b, 0.9);
}

TEST(MaTest, RelativeToMode) {
  const auto p = fig2_pattern();
  EXPECT_EQ(compute_ma(p, "diced"), 1.0);
  EXPECT_EQ(compute_ma(p, "cubed"), 0.5);
  EXPECT_EQ(compute_ma(p, "with knife"), 0.25);
  EXPECT_EQ(compute_ma(p, "sliced"), 0.0);
  EXPECT_EQ(compute_ma(p, ""), 0.0);
}

TEST(MaTest, PublishedRow) {
  const auto p = AnswerPattern::from_counts({{"hotdog", 5}, {"hot dog", 2}, {"hot dogs", 2}, {"sausage", 1}});
  EXPECT_DOUBLE_EQ(compute_ma(p, "hot dog"), 0.4);
}

TEST(MaTest, EveryModalAnswerScoresOne) {
  const auto p = AnswerPattern::from_counts({{"a", 3}, {"b", 3}, {"c", 1}});
  EXPECT_EQ(compute_ma(p, "a"), 1.0);
  EXPECT_EQ(compute_ma(p, "b"), 1.0);
}

TEST(STest, ClosedForm) {
  EXPECT_DOUBLE_EQ(compute_s(fig2_pattern()), 3.0 / 9.0);
  EXPECT_DOUBLE_EQ(compute_s(AnswerPattern::from_counts({{"a", 5}, {"b", 5}})), 4.0 / 9.0);
  EXPECT_DOUBLE_EQ(compute_s(AnswerPattern::from_counts({{"a", 6}, {"b", 4}})), 5.0 / 9.0);
  EXPECT_EQ(compute_s(AnswerPattern::from_counts({{"yes", 10}})), 1.0);
  std::vector<AnswerCount> distinct;
  for (int i = 0; i < 10; ++i) distinct.push_back({"a" + std::to_string(i), 1});
  EXPECT_EQ(compute_s(AnswerPattern::from_counts(distinct)), 0.0);
}

TEST(STest, DegenerateSingleAnnotation) {
  EXPECT_THROW(compute_s(AnswerPattern::from_counts({{"a", 1}})), DegeneratePatternError);
}

TEST(MaSTest, Product) {
  EXPECT_DOUBLE_EQ(compute_mas(0.4, 4.0 / 9.0), 0.4 * 4.0 / 9.0);
  EXPECT_EQ(compute_mas(1.0, 1.0), 1.0);
  EXPECT_EQ(compute_mas(0.0, 0.7), 0.0);
}

TEST(MassesTest, MergingLiftsReliabilityAndMajority) {
  const auto p = AnswerPattern::from_counts({{"hotdog", 5}, {"hot dog", 2}, {"hot dogs", 2}, {"sausage", 1}});
  const auto g = labelled(p, {"hotdog", "hot dog", "hot dogs"});
  const auto m = compute_masses(p, g, "hot dog");
  EXPECT_DOUBLE_EQ(m.ses, 8.0 / 9.0);
  EXPECT_EQ(m.ma_updated, 1.0);
  EXPECT_DOUBLE_EQ(m.masses, 8.0 / 9.0);
  EXPECT_EQ(compute_masses(p, g, "sausage").ma_updated, 1.0 / 9.0);
}

TEST(MassesTest, NoMergeEqualsUngroupedScores) {
  const auto p = fig2_pattern();
  const auto g = labelled(p, {});
  const auto m = compute_masses(p, g, "cubed");
  EXPECT_EQ(m.ses, compute_s(p));
  EXPECT_EQ(m.ma_updated, compute_ma(p, "cubed"));
}

TEST(MassesTest, SplitMajorityPredictionOutsideMerge) {
  const auto p = AnswerPattern::from_counts({{"red", 4}, {"crimson", 2}, {"blue", 4}});
  const auto g = labelled(p, {"red", "crimson"});
  const auto m = compute_masses(p, g, "blue");
  EXPECT_DOUBLE_EQ(m.ses, 5.0 / 9.0);
  EXPECT_DOUBLE_EQ(m.ma_updated, 4.0 / 6.0);
  EXPECT_DOUBLE_EQ(m.masses, 4.0 / 6.0 * 5.0 / 9.0);
}

TEST(MassesTest, AllMergedIsConsensus) {
  const auto p = fig2_pattern();
  const auto g = labelled(p, {"diced", "cubed", "squares", "with knife", "into cubes"});
  const auto m = compute_masses(p, g, "squares");
  EXPECT_EQ(m.ses, 1.0);
  EXPECT_EQ(m.ma_updated, 1.0);
}

TEST(MassesTest, TotalsMustAgree) {
  const auto p = fig2_pattern();
  const auto other = AnswerPattern::from_counts({{"x", 3}});
  EXPECT_THROW(compute_masses(p, labelled(other, {}), "x"), InvariantError);
}

}  // namespace
}  // namespace masses
