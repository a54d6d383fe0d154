#include <cmath>

#include <gtest/gtest.h>

#include "masses/grouping.hpp"
#include "masses/metrics.hpp"

namespace masses {
namespace {

EmbeddingTable small_table() {
  EmbeddingTable t(2);
  const float hot[] = {1.0f, 0.0f};
  const float dog[] = {0.0f, 1.0f};
  const float cat[] = {0.0f, 3.0f};
  t.insert("hot", hot);
  t.insert("dog", dog);
  t.insert("cat", cat);
  return t;
}

TEST(VectorizeAnswerTest, MeanOfKnownTokens) {
  const auto t = small_table();
  EXPECT_EQ(vectorize_answer("hot dog", t), (Vector{0.5, 0.5}));
  EXPECT_EQ(vectorize_answer("hot zebra", t), (Vector{1.0, 0.0}));
  EXPECT_EQ(vectorize_answer("zebra", t), std::nullopt);
  EXPECT_EQ(vectorize_answer("", t), std::nullopt);
}

TEST(EmbeddingBackendTest, DelegatesToTable) {
  EmbeddingBackend b(std::make_shared<const EmbeddingTable>(small_table()));
  EXPECT_EQ(b.vectorize("dog cat"), (Vector{0.0, 2.0}));
  EXPECT_EQ(b.cluster_label("dog"), std::nullopt);
}

TEST(ClampedCosineTest, EdgeCases) {
  EXPECT_EQ(clamped_cosine({1, 0}, {1, 0}), 1.0);
  EXPECT_EQ(clamped_cosine({0.1, 0.7, 0.3}, {0.1, 0.7, 0.3}), 1.0);
  EXPECT_EQ(clamped_cosine({1, 0}, {0, 1}), 0.0);
  EXPECT_EQ(clamped_cosine({1, 0}, {-1, 0.1}), 0.0);
  EXPECT_EQ(clamped_cosine({0, 0}, {0, 0}), 0.0);
  EXPECT_EQ(clamped_cosine({0, 0}, {1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(clamped_cosine({1, 0}, {1, 1}), 1.0 / std::sqrt(2.0));
  EXPECT_THROW(clamped_cosine({1}, {1, 0}), InvariantError);
}

TEST(CentroidTest, UnweightedOverVectorizedAnswers) {
  FixtureBackend b;
  b.set_vector("a", {2, 0});
  b.set_vector("b", {0, 4});
  const auto p = AnswerPattern::from_counts({{"a", 9}, {"b", 1}, {"oov", 3}});
  EXPECT_EQ(pattern_centroid(p, b), (Vector{1, 2}));
  const auto q = AnswerPattern::from_counts({{"oov", 3}});
  EXPECT_EQ(pattern_centroid(q, b), std::nullopt);
}

// Four near-synonyms close to e1 and one unrelated answer on e2: the centroid
// is (4, 1)/5, so the synonyms sit at 4/sqrt(17) and the outlier at 1/sqrt(17).
TEST(GroupPatternTest, SynonymsMergeOutlierStays) {
  FixtureBackend b;
  for (const char* a : {"christmas tree", "tree", "christmas tree with lights", "pine tree"}) b.set_vector(a, {1, 0});
  b.set_vector("santas", {0, 1});
  const auto p = AnswerPattern::from_counts(
      {{"christmas tree", 4}, {"tree", 2}, {"christmas tree with lights", 1}, {"pine tree", 1}, {"santas", 2}});
  const auto sims = answer_similarities(p, b);
  for (std::size_t i = 0; i < p.unique_count(); ++i) {
    const double expected = p.entries()[i].answer == "santas" ? 1.0 / std::sqrt(17.0) : 4.0 / std::sqrt(17.0);
    EXPECT_NEAR(*sims[i], expected, 1e-12) << p.entries()[i].answer;
  }
  const auto g = group_pattern(p, b, 0.9);
  ASSERT_NE(g.merged(), nullptr);
  EXPECT_EQ(g.merged()->frequency, 8);
  EXPECT_EQ(g.merged()->members.size(), 4u);
  EXPECT_EQ(g.frequency_of("santas"), 2);
  EXPECT_DOUBLE_EQ(compute_s(g), 7.0 / 9.0);
  EXPECT_EQ(g.coverage(), 1.0);
}

TEST(GroupPatternTest, ZeroThresholdMergesEveryVectorizedAnswer) {
  FixtureBackend b;
  b.set_vector("a", {1, 0});
  b.set_vector("b", {-1, 0});
  b.set_vector("c", {0, 1});
  const auto p = AnswerPattern::from_counts({{"a", 2}, {"b", 2}, {"c", 1}, {"oov", 1}});
  const auto g = group_pattern(p, b, 0.0);
  ASSERT_NE(g.merged(), nullptr);
  EXPECT_EQ(g.merged()->frequency, 5);
  EXPECT_EQ(g.frequency_of("oov"), 1);
  EXPECT_DOUBLE_EQ(g.coverage(), 0.75);
}

TEST(GroupPatternTest, AllOutOfVocabularyKeepsPattern) {
  FixtureBackend b;
  const auto p = AnswerPattern::from_counts({{"a", 5}, {"b", 3}, {"c", 2}});
  const auto g = group_pattern(p, b, 0.0);
  EXPECT_EQ(g.merged(), nullptr);
  ASSERT_EQ(g.clusters().size(), 3u);
  EXPECT_EQ(g.clusters()[0], (Cluster{{"a"}, 5}));
  EXPECT_EQ(compute_s(g), compute_s(p));
  EXPECT_EQ(g.coverage(), 0.0);
}

TEST(GroupPatternTest, LowerThresholdMergesSuperset) {
  FixtureBackend b;
  b.set_vector("diced", {1.0, 0.1, 0.0});
  b.set_vector("cubed", {0.9, 0.3, 0.0});
  b.set_vector("squares", {0.6, 0.6, 0.2});
  b.set_vector("with knife", {0.1, 0.2, 1.0});
  b.set_vector("into cubes", {0.8, 0.5, 0.1});
  const auto p = AnswerPattern::from_counts(
      {{"diced", 4}, {"cubed", 2}, {"squares", 2}, {"with knife", 1}, {"into cubes", 1}});
  const auto high = group_pattern(p, b, 0.9);
  const auto low = group_pattern(p, b, 0.7);
  ASSERT_NE(high.merged(), nullptr);
  ASSERT_NE(low.merged(), nullptr);
  for (const auto& m : high.merged()->members) EXPECT_EQ(low.locate(m), low.merged()) << m;
  EXPECT_GT(low.merged()->members.size(), high.merged()->members.size());
  EXPECT_GE(compute_s(low), compute_s(high));
  EXPECT_GE(compute_s(high), compute_s(p));
}

TEST(GroupPatternTest, ThresholdBoundaryIsInclusive) {
  FixtureBackend b;
  b.set_vector("a", {1, 0});
  b.set_vector("b", {0.3, 1});
  const auto p = AnswerPattern::from_counts({{"a", 2}, {"b", 1}});
  const auto sims = answer_similarities(p, b);
  const double t = std::min(*sims[0], *sims[1]);
  EXPECT_NE(group_pattern(p, b, t).merged(), nullptr);
  EXPECT_EQ(group_pattern(p, b, std::nextafter(t, 2.0)).merged(), nullptr);
}

TEST(GroupPatternTest, SingleAnswerPatternIsSelfSimilar) {
  FixtureBackend b;
  b.set_vector("yes", {0.2, 0.4, 0.9});
  const auto p = AnswerPattern::from_counts({{"yes", 10}});
  EXPECT_EQ(*answer_similarities(p, b)[0], 1.0);
  const auto g = group_pattern(p, b, 1.0);
  ASSERT_EQ(g.clusters().size(), 1u);
  EXPECT_EQ(g.frequency_of("yes"), 10);
  EXPECT_EQ(compute_s(g), 1.0);
}

TEST(GroupPatternTest, ZeroVectorNeverMerges) {
  FixtureBackend b;
  b.set_vector("a", {1, 0});
  b.set_vector("b", {1, 0});
  b.set_vector("z", {0, 0});
  const auto p = AnswerPattern::from_counts({{"a", 2}, {"b", 1}, {"z", 4}});
  const auto g = group_pattern(p, b, 0.5);
  ASSERT_NE(g.merged(), nullptr);
  EXPECT_EQ(g.merged()->frequency, 3);
  EXPECT_EQ(g.frequency_of("z"), 4);
}

TEST(GroupPatternTest, ThresholdOutsideUnitIntervalRejected) {
  FixtureBackend b;
  const auto p = AnswerPattern::from_counts({{"a", 2}});
  EXPECT_THROW(group_pattern(p, b, 1.5), InputError);
  EXPECT_THROW(group_pattern(p, b, -0.1), InputError);
  EXPECT_THROW(group_pattern(p, b, std::nan("")), InputError);
}

TEST(LabelModeTest, HeaviestSharedLabelWins) {
  FixtureBackend b;
  b.set_label("a", "x");
  b.set_label("b", "x");
  b.set_label("c", "y");
  b.set_label("d", "y");
  b.set_label("e", "z");
  const auto p = AnswerPattern::from_counts({{"a", 1}, {"b", 1}, {"c", 3}, {"d", 1}, {"e", 4}});
  const auto g = group_pattern(p, b, 0.9);
  ASSERT_NE(g.merged(), nullptr);
  EXPECT_EQ(g.merged()->frequency, 4);
  EXPECT_EQ(g.locate("d"), g.merged());
  EXPECT_EQ(g.frequency_of("e"), 4);
}

TEST(LabelModeTest, TieGoesToSmallestLabel) {
  FixtureBackend b;
  b.set_label("a", "q");
  b.set_label("b", "q");
  b.set_label("c", "p");
  b.set_label("d", "p");
  const auto p = AnswerPattern::from_counts({{"a", 2}, {"b", 2}, {"c", 3}, {"d", 1}, {"u", 2}});
  const auto g = group_pattern(p, b, 0.9);
  ASSERT_NE(g.merged(), nullptr);
  EXPECT_EQ(g.locate("c"), g.merged());
  EXPECT_EQ(g.frequency_of("a"), 2);
  EXPECT_DOUBLE_EQ(g.coverage(), 0.8);
}

TEST(LocatePredictionTest, FindsClusterOrNothing) {
  FixtureBackend b;
  for (const char* a : {"hotdog", "hot dog", "hot dogs"}) b.set_label(a, "hd");
  const auto p = AnswerPattern::from_counts({{"hotdog", 5}, {"hot dog", 2}, {"hot dogs", 2}, {"sausage", 1}});
  const auto g = group_pattern(p, b, 0.9);
  ASSERT_NE(locate_prediction(g, "hot dog"), nullptr);
  EXPECT_EQ(locate_prediction(g, "hot dog")->frequency, 9);
  EXPECT_EQ(locate_prediction(g, "sausage")->frequency, 1);
  EXPECT_EQ(locate_prediction(g, "unanswerable"), nullptr);
  EXPECT_EQ(locate_prediction(g, ""), nullptr);
}

TEST(GroupedPatternTest, RejectsInconsistentTotals) {
  EXPECT_THROW(GroupedPattern({{{"a"}, 2}}, 3, 0.5, 1.0), InvariantError);
}

TEST(FixtureBackendTest, FromJson) {
  const auto b = FixtureBackend::from_json(nlohmann::json::parse(R"({"a": [1, 2], "b": "lbl"})"));
  EXPECT_EQ(b.vectorize("a"), (Vector{1, 2}));
  EXPECT_EQ(b.cluster_label("b"), "lbl");
  EXPECT_EQ(b.vectorize("b"), std::nullopt);
  EXPECT_THROW(FixtureBackend::from_json(nlohmann::json::parse(R"({"a": [1, 2], "b": [1]})")), InputError);
  EXPECT_THROW(FixtureBackend::from_json(nlohmann::json::parse(R"({"a": 3})")), InputError);
  EXPECT_THROW(FixtureBackend::from_json(nlohmann::json::parse(R"([1])")), InputError);
}

}  // namespace
}  // namespace masses
