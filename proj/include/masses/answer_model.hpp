#ifndef MASSES_ANSWER_MODEL_HPP
#define MASSES_ANSWER_MODEL_HPP

#include <algorithm>
#include <cctype>
#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "masses/error.hpp"

namespace masses {

/// Question identifier as it appeared in the input: integer ids stay
/// integers, string ids stay strings. Integers order before strings.
using QuestionId = std::variant<std::int64_t, std::string>;

inline std::string to_string(const QuestionId& id) {
  if (const auto* i = std::get_if<std::int64_t>(&id)) return std::to_string(*i);
  return std::get<std::string>(id);
}

struct RawAnnotation {
  QuestionId question_id;
  std::optional<std::string> question;
  std::vector<std::string> answers;  // one per annotator, input order
  std::optional<std::string> answer_type;

  std::size_t annotator_count() const { return answers.size(); }
  bool operator==(const RawAnnotation&) const = default;
};

struct Prediction {
  QuestionId question_id;
  std::string answer;  // raw; normalized at scoring time
  bool operator==(const Prediction&) const = default;
};

/// Preprocessing applied to crowd answers and predictions before any
/// matching. Each stage can be switched off; with every flag off the
/// function is the identity.
struct NormalizationConfig {
  bool lowercase = true;
  bool punctuation_rules = true;
  bool word_numbers_to_digits = true;
  bool strip_articles = true;
  bool expand_contractions = true;
  bool collapse_whitespace = true;

  std::map<std::string, std::string, std::less<>> word_numbers = default_word_numbers();
  std::map<std::string, std::string, std::less<>> contractions = default_contractions();

  static NormalizationConfig none() {
    NormalizationConfig c;
    c.lowercase = c.punctuation_rules = c.word_numbers_to_digits = false;
    c.strip_articles = c.expand_contractions = c.collapse_whitespace = false;
    return c;
  }

  static std::map<std::string, std::string, std::less<>> default_word_numbers() {
    return {{"zero", "0"}, {"one", "1"}, {"two", "2"},   {"three", "3"},
            {"four", "4"}, {"five", "5"}, {"six", "6"},  {"seven", "7"},
            {"eight", "8"}, {"nine", "9"}, {"ten", "10"}};
  }

  // Expanded forms never contain a key, an article or a number word, so the
  // pipeline stays idempotent.
  static std::map<std::string, std::string, std::less<>> default_contractions() {
    return {
        {"ain't", "is not"},       {"aint", "is not"},
        {"aren't", "are not"},     {"arent", "are not"},
        {"can't", "cannot"},       {"cant", "cannot"},
        {"couldn't", "could not"}, {"couldnt", "could not"},
        {"didn't", "did not"},     {"didnt", "did not"},
        {"doesn't", "does not"},   {"doesnt", "does not"},
        {"don't", "do not"},       {"dont", "do not"},
        {"hadn't", "had not"},     {"hadnt", "had not"},
        {"hasn't", "has not"},     {"hasnt", "has not"},
        {"haven't", "have not"},   {"havent", "have not"},
        {"he'd", "he would"},      {"he'll", "he will"},
        {"he's", "he is"},         {"how's", "how is"},
        {"i'd", "i would"},        {"i'll", "i will"},
        {"i'm", "i am"},           {"im", "i am"},
        {"i've", "i have"},        {"ive", "i have"},
        {"isn't", "is not"},       {"isnt", "is not"},
        {"it'd", "it would"},      {"it'll", "it will"},
        {"it's", "it is"},         {"let's", "let us"},
        {"mustn't", "must not"},   {"mustnt", "must not"},
        {"she'd", "she would"},    {"she'll", "she will"},
        {"she's", "she is"},       {"shouldn't", "should not"},
        {"shouldnt", "should not"}, {"that's", "that is"},
        {"thats", "that is"},      {"there's", "there is"},
        {"theres", "there is"},    {"they'd", "they would"},
        {"they'll", "they will"},  {"they're", "they are"},
        {"theyre", "they are"},    {"they've", "they have"},
        {"theyve", "they have"},   {"wasn't", "was not"},
        {"wasnt", "was not"},      {"we'd", "we would"},
        {"we'll", "we will"},      {"we're", "we are"},
        {"we've", "we have"},      {"weren't", "were not"},
        {"werent", "were not"},    {"what's", "what is"},
        {"whats", "what is"},      {"where's", "where is"},
        {"who's", "who is"},       {"won't", "will not"},
        {"wouldn't", "would not"}, {"wouldnt", "would not"},
        {"you'd", "you would"},    {"you'll", "you will"},
        {"you're", "you are"},     {"youre", "you are"},
        {"you've", "you have"},    {"youve", "you have"},
    };
  }
};

namespace detail {

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
inline bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

/// Applies `fn` to every maximal non-space run of `s`. `fn` returns the
/// replacement text; an empty replacement drops the token. Separators are
/// left untouched.
template <class Fn>
std::string map_tokens(std::string_view s, Fn&& fn) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (is_space(s[i])) {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    out += fn(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// Apostrophes survive only inside a known contraction, judged after the other
// punctuation has been handled.
inline std::string apply_apostrophes(std::string_view s, const NormalizationConfig& config) {
  auto word_around = [&](std::size_t k) {
    std::size_t b = k, e = k + 1;
    while (b > 0 && (is_alpha(s[b - 1]) || s[b - 1] == '\'')) --b;
    while (e < s.size() && (is_alpha(s[e]) || s[e] == '\'')) ++e;
    return s.substr(b, e - b);
  };
  std::string out;
  out.reserve(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] != '\'') {
      out.push_back(s[k]);
      continue;
    }
    const bool inner = k > 0 && is_alpha(s[k - 1]) && k + 1 < s.size() && is_alpha(s[k + 1]);
    if (inner && config.contractions.contains(word_around(k))) out.push_back('\'');
  }
  return out;
}

inline std::string apply_punctuation(std::string_view s, const NormalizationConfig& config) {
  auto digit_at = [&](std::size_t k) { return k < s.size() && is_digit(s[k]); };
  std::string out;
  out.reserve(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const char c = s[k];
    if (!is_punct(c) || c == '\'') {
      out.push_back(c);
      continue;
    }
    const bool between_digits = k > 0 && digit_at(k - 1) && digit_at(k + 1);
    if (c == '.') {
      if (between_digits) out.push_back(c);
    } else if (c == ',') {
      if (!between_digits) out.push_back(' ');
    } else {
      out.push_back(' ');
    }
  }
  return apply_apostrophes(out, config);
}

inline std::string collapse(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (is_space(c)) {
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
    } else {
      out.push_back(c);
    }
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

}  // namespace detail

/// Canonical form of an answer string. Stages run in a fixed order:
/// lowercase, punctuation, number words, articles, contractions, whitespace.
inline std::string normalize_answer(std::string_view raw, const NormalizationConfig& config) {
  std::string s(raw);
  if (config.lowercase) {
    for (char& c : s) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
  }
  if (config.punctuation_rules) s = detail::apply_punctuation(s, config);
  if (config.word_numbers_to_digits) {
    s = detail::map_tokens(s, [&](std::string_view tok) {
      auto it = config.word_numbers.find(tok);
      return it == config.word_numbers.end() ? std::string(tok) : it->second;
    });
  }
  if (config.strip_articles) {
    s = detail::map_tokens(s, [](std::string_view tok) {
      return (tok == "a" || tok == "an" || tok == "the") ? std::string() : std::string(tok);
    });
  }
  if (config.expand_contractions) {
    s = detail::map_tokens(s, [&](std::string_view tok) {
      auto it = config.contractions.find(tok);
      return it == config.contractions.end() ? std::string(tok) : it->second;
    });
  }
  if (config.collapse_whitespace) s = detail::collapse(s);
  return s;
}

struct AnswerCount {
  std::string answer;
  int frequency = 0;
  bool operator==(const AnswerCount&) const = default;
};

/// Unique answers of one question with their annotator counts, ordered by
/// descending frequency then ascending answer.
class AnswerPattern {
 public:
  AnswerPattern() = default;

  /// Builds a pattern from explicit counts. Answers must be distinct and
  /// frequencies positive.
  static AnswerPattern from_counts(std::vector<AnswerCount> counts) {
    if (counts.empty()) throw InvariantError("answer pattern needs at least one answer");
    AnswerPattern p;
    for (const auto& c : counts) {
      if (c.frequency <= 0) {
        throw InvariantError("non-positive frequency for answer '" + c.answer + "'");
      }
      p.total_ += c.frequency;
    }
    std::sort(counts.begin(), counts.end(), [](const AnswerCount& a, const AnswerCount& b) {
      return a.frequency != b.frequency ? a.frequency > b.frequency : a.answer < b.answer;
    });
    for (std::size_t i = 1; i < counts.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (counts[i].answer == counts[j].answer) {
          throw InvariantError("duplicate answer '" + counts[i].answer + "' in pattern");
        }
      }
    }
    p.entries_ = std::move(counts);
    return p;
  }

  const std::vector<AnswerCount>& entries() const { return entries_; }
  int total() const { return total_; }
  int max_frequency() const { return entries_.empty() ? 0 : entries_.front().frequency; }
  std::size_t unique_count() const { return entries_.size(); }

  /// Annotators that gave exactly `answer`; 0 when absent. An empty answer
  /// carries no content and never matches.
  int frequency_of(std::string_view answer) const {
    if (answer.empty()) return 0;
    for (const auto& e : entries_) {
      if (e.answer == answer) return e.frequency;
    }
    return 0;
  }

  bool operator==(const AnswerPattern&) const = default;

 private:
  std::vector<AnswerCount> entries_;
  int total_ = 0;
};

/// Anything Ma and S can be computed over: a plain pattern or a grouped one.
template <class P>
concept FrequencyPattern = requires(const P& p, std::string_view answer) {
  { p.total() } -> std::convertible_to<int>;
  { p.max_frequency() } -> std::convertible_to<int>;
  { p.frequency_of(answer) } -> std::convertible_to<int>;
};

inline AnswerPattern build_pattern(const RawAnnotation& annotation,
                                   const NormalizationConfig& config) {
  if (annotation.answers.empty()) {
    throw InputError("question " + to_string(annotation.question_id) + " has no answers");
  }
  std::map<std::string, int, std::less<>> counts;
  for (const auto& raw : annotation.answers) ++counts[normalize_answer(raw, config)];
  std::vector<AnswerCount> entries;
  entries.reserve(counts.size());
  for (auto& [answer, freq] : counts) entries.push_back({answer, freq});
  return AnswerPattern::from_counts(std::move(entries));
}

}  // namespace masses

#endif  // MASSES_ANSWER_MODEL_HPP
