#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "masses/answer_model.hpp"
#include "support/generators.hpp"

namespace masses {
namespace {

TEST(NormalizeAnswerTest, LowercasesAndDropsArticlesAndPeriods) {
  EXPECT_EQ(normalize_answer("The red Apple.", NormalizationConfig{}), "red apple");
}

TEST(NormalizeAnswerTest, FixedPoint) {
  EXPECT_EQ(normalize_answer("yes", NormalizationConfig{}), "yes");
}

TEST(NormalizeAnswerTest, WordNumbersBecomeDigits) {
  EXPECT_EQ(normalize_answer("Two", NormalizationConfig{}), "2");
  EXPECT_EQ(normalize_answer("ten dogs", NormalizationConfig{}), "10 dogs");
}

TEST(NormalizeAnswerTest, PunctuationRules) {
  const NormalizationConfig c;
  EXPECT_EQ(normalize_answer("3.5", c), "3.5");
  EXPECT_EQ(normalize_answer("1,000", c), "1000");
  EXPECT_EQ(normalize_answer("red, white", c), "red white");
  EXPECT_EQ(normalize_answer("t-shirt", c), "t shirt");
  EXPECT_EQ(normalize_answer("dog's bowl", c), "dogs bowl");
  EXPECT_EQ(normalize_answer("yes!", c), "yes");
  EXPECT_EQ(normalize_answer("e.g.", c), "eg");
}

TEST(NormalizeAnswerTest, Contractions) {
  NormalizationConfig c;
  EXPECT_EQ(normalize_answer("Don't know", c), "do not know");
  EXPECT_EQ(normalize_answer("dont know", c), "do not know");
  c.expand_contractions = false;
  EXPECT_EQ(normalize_answer("don't know", c), "don't know");
}

TEST(NormalizeAnswerTest, WhitespaceCollapses) {
  EXPECT_EQ(normalize_answer("  hot \t dog  ", NormalizationConfig{}), "hot dog");
}

TEST(NormalizeAnswerTest, NoStemming) {
  EXPECT_NE(normalize_answer("hot dogs", NormalizationConfig{}), normalize_answer("hot dog", NormalizationConfig{}));
}

TEST(NormalizeAnswerTest, AllFlagsOffIsIdentity) {
  const auto none = NormalizationConfig::none();
  for (const char* s : {"The red Apple.", "  Two,  THREE ", "don't", "a", "", "1,000.50!", "caf\xc3\xa9"}) {
    EXPECT_EQ(normalize_answer(s, none), s);
  }
}

TEST(NormalizeAnswerTest, NonAsciiBytesPassThrough) {
  EXPECT_EQ(normalize_answer("Caf\xc3\xa9", NormalizationConfig{}), "caf\xc3\xa9");
}

std::string random_answer(testing::Rng& rng) {
  static const std::vector<std::string> pieces{
      "The", "a", "an", "two", "Ten", "don't", "dont", "it's", "dog's", "1,000", "3.5", "e.g.", "x",
      "Hot", "dog", "-", ",", ".", "'", "!", "?", "  ", "\t", "7", "none", "O'Neil", "rock'n'roll",
      "isn't.", "(red)", "1.", ".5", "caf\xc3\xa9"};
  std::string s;
  const int parts = testing::uniform_int(rng, 0, 8);
  for (int i = 0; i < parts; ++i) {
    s += pieces[testing::uniform_int(rng, 0, static_cast<int>(pieces.size()) - 1)];
    if (rng() % 2) s += ' ';
  }
  return s;
}

TEST(NormalizeAnswerTest, IdempotentOnGeneratedCorpus) {
  testing::Rng rng(17);
  std::vector<NormalizationConfig> configs(4);
  configs[1].expand_contractions = false;
  configs[2].punctuation_rules = false;
  configs[3].lowercase = false;
  for (int i = 0; i < 3000; ++i) {
    const auto raw = random_answer(rng);
    for (const auto& c : configs) {
      const auto once = normalize_answer(raw, c);
      ASSERT_EQ(normalize_answer(once, c), once) << "raw: '" << raw << "'";
    }
  }
}

RawAnnotation annotation(std::vector<std::string> answers) {
  return RawAnnotation{std::string("q"), std::nullopt, std::move(answers), std::nullopt};
}

TEST(BuildPatternTest, TabulatesCrowdAnswers) {
  const auto p = build_pattern(annotation({"diced", "diced", "diced", "diced", "cubed", "cubed", "squares",
                                           "squares", "with knife", "into cubes"}),
                               NormalizationConfig{});
  const std::vector<AnswerCount> expected{
      {"diced", 4}, {"cubed", 2}, {"squares", 2}, {"into cubes", 1}, {"with knife", 1}};
  EXPECT_EQ(p.entries(), expected);
  EXPECT_EQ(p.total(), 10);
  EXPECT_EQ(p.max_frequency(), 4);
}

TEST(BuildPatternTest, Consensus) {
  const auto p = build_pattern(annotation(std::vector<std::string>(10, "yes")), NormalizationConfig{});
  ASSERT_EQ(p.unique_count(), 1u);
  EXPECT_EQ(p.entries()[0], (AnswerCount{"yes", 10}));
  EXPECT_EQ(p.max_frequency(), 10);
}

TEST(BuildPatternTest, CaseVariantsMerge) {
  const auto p = build_pattern(annotation({"Yes", "yes", "YES"}), NormalizationConfig{});
  ASSERT_EQ(p.unique_count(), 1u);
  EXPECT_EQ(p.entries()[0], (AnswerCount{"yes", 3}));
}

TEST(BuildPatternTest, EmptyAnswersRejected) {
  EXPECT_THROW(build_pattern(annotation({}), NormalizationConfig{}), InputError);
}

TEST(BuildPatternTest, EmptyAnswerNeverMatches) {
  const auto p = build_pattern(annotation({"the", "the", "dog"}), NormalizationConfig{});
  EXPECT_EQ(p.frequency_of(""), 0);
  EXPECT_EQ(p.total(), 3);
}

TEST(BuildPatternTest, PermutationInvariantAndConservesCount) {
  testing::Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    std::vector<std::string> answers;
    const int n = testing::uniform_int(rng, 1, 15);
    for (int k = 0; k < n; ++k) answers.push_back(random_answer(rng));
    const auto p = build_pattern(annotation(answers), NormalizationConfig{});
    int sum = 0;
    for (const auto& e : p.entries()) sum += e.frequency;
    ASSERT_EQ(sum, n);
    ASSERT_EQ(p.total(), n);
    std::shuffle(answers.begin(), answers.end(), rng);
    ASSERT_EQ(build_pattern(annotation(answers), NormalizationConfig{}), p);
  }
}

TEST(AnswerPatternTest, FromCountsValidates) {
  EXPECT_THROW(AnswerPattern::from_counts({}), InvariantError);
  EXPECT_THROW(AnswerPattern::from_counts({{"a", 0}}), InvariantError);
  EXPECT_THROW(AnswerPattern::from_counts({{"a", 1}, {"a", 2}}), InvariantError);
}

TEST(AnswerPatternTest, SortedByFrequencyThenAnswer) {
  const auto p = AnswerPattern::from_counts({{"b", 2}, {"c", 5}, {"a", 2}});
  const std::vector<AnswerCount> expected{{"c", 5}, {"a", 2}, {"b", 2}};
  EXPECT_EQ(p.entries(), expected);
}

}  // namespace
}  // namespace masses
