#ifndef MASSES_METRICS_HPP
#define MASSES_METRICS_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "masses/answer_model.hpp"
#include "masses/grouping.hpp"

namespace masses {

/// Majority: frequency of the predicted answer (or of the cluster holding
/// it) relative to the most frequent one. Every modal answer scores 1.
template <FrequencyPattern P>
double compute_ma(const P& pattern, std::string_view predicted) {
  if (pattern.total() < 1 || pattern.max_frequency() < 1) {
    throw DegeneratePatternError("Ma needs a non-empty pattern");
  }
  return static_cast<double>(pattern.frequency_of(predicted)) /
         static_cast<double>(pattern.max_frequency());
}

/// Subjectivity of a pattern of n >= 2 annotations.
///
/// Under the 0/1 ground metric the cheapest transport of the answer
/// distribution onto a consensus relabels the n - f_max annotations that
/// disagree with a modal answer. The worst case over patterns of size n is
/// n - 1 (all answers distinct). Normalizing and flipping to a reliability
/// score gives S = 1 - (n - f_max) / (n - 1) = (f_max - 1) / (n - 1):
/// 1 at consensus, 0 when every annotator answers differently.
template <FrequencyPattern P>
double compute_s(const P& pattern) {
  const int n = pattern.total();
  if (n < 2) {
    throw DegeneratePatternError("S needs at least 2 annotations, got " + std::to_string(n));
  }
  return static_cast<double>(pattern.max_frequency() - 1) / static_cast<double>(n - 1);
}

inline double compute_mas(double ma, double s) { return ma * s; }

struct MassesScore {
  double ses = 0.0;
  double ma_updated = 0.0;
  double masses = 0.0;
  bool operator==(const MassesScore&) const = default;
};

/// S and Ma recomputed on the grouped pattern, and their product.
inline MassesScore compute_masses(const AnswerPattern& pattern, const GroupedPattern& grouped,
                                  std::string_view predicted) {
  if (grouped.total() != pattern.total()) {
    throw InvariantError("grouped pattern total differs from its source pattern");
  }
  MassesScore out;
  out.ses = compute_s(grouped);
  out.ma_updated = compute_ma(grouped, predicted);
  out.masses = out.ma_updated * out.ses;
  return out;
}

/// Per-threshold part of a sample record; prediction-dependent fields are
/// empty in data-only analyses.
struct ThresholdScore {
  GroupedPattern grouped;
  double ses = 0.0;
  std::optional<double> ma_updated;
  std::optional<double> masses;
};

/// Everything scored for one question. Prediction-dependent fields are empty
/// in data-only analyses; S-family fields are empty for degenerate (n = 1)
/// samples unless those are explicitly included.
struct SampleScore {
  QuestionId question_id;
  int annotators = 0;
  std::size_t unique_answers = 0;
  std::optional<std::string> prediction;
  std::optional<double> vqa3plus;
  std::optional<double> ma;
  std::optional<double> s;
  std::optional<double> mas;
  std::map<double, ThresholdScore> thresholds;
  std::optional<double> wups_acm;
  std::optional<double> wups_mcm;
  bool degenerate = false;
};

}  // namespace masses

#endif  // MASSES_METRICS_HPP
