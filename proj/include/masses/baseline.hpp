#ifndef MASSES_BASELINE_HPP
#define MASSES_BASELINE_HPP

#include <algorithm>
#include <string>
#include <string_view>

#include "masses/answer_model.hpp"

namespace masses {

/// Single-pass VQA3+ accuracy: min(f / 3, 1).
inline double vqa3plus_raw(const AnswerPattern& pattern, std::string_view predicted) {
  const int f = pattern.frequency_of(predicted);
  return static_cast<double>(std::min(f, 3)) / 3.0;
}

/// VQA3+ averaged over the n leave-one-annotator-out subsets.
///
/// Dropping one of the f matching annotators leaves f - 1 matches; dropping
/// any of the other n - f leaves f. Summed over subsets the credit is
/// f * min(f - 1, 3) + (n - f) * min(f, 3) thirds, so the mean is that
/// integer over 3n. Keeping the whole computation integral until the final
/// division makes the result correctly rounded.
inline double vqa3plus_averaged(const AnswerPattern& pattern, std::string_view predicted) {
  const int n = pattern.total();
  if (n < 2) {
    throw DegeneratePatternError("leave-one-out VQA3+ needs at least 2 annotations, got " +
                                 std::to_string(n));
  }
  const long f = pattern.frequency_of(predicted);
  const long thirds = f * std::min(f - 1, 3L) + (n - f) * std::min(f, 3L);
  return static_cast<double>(thirds) / static_cast<double>(3L * n);
}

}  // namespace masses

#endif  // MASSES_BASELINE_HPP
