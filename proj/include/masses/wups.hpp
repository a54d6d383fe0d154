#ifndef MASSES_WUPS_HPP
#define MASSES_WUPS_HPP

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "masses/answer_model.hpp"
#include "masses/taxonomy.hpp"

namespace masses {

enum class WupsMode { kAcm, kMcm };

/// How token similarities below the threshold are treated: scaled by 0.1
/// (the usual WUPS form) or zeroed.
enum class WupsCut { kDownWeight, kHard };

/// Wu-Palmer similarity, best over the senses of both words. Capped at 1: with
/// shortest-path depths a DAG shortcut can leave an ancestor deeper than its
/// descendant.
inline double wu_palmer(std::string_view a, std::string_view b, const Taxonomy& taxonomy) {
  if (a == b) return 1.0;
  const auto na = taxonomy.nodes_for(a);
  const auto nb = taxonomy.nodes_for(b);
  double best = 0.0;
  for (auto x : na) {
    for (auto y : nb) {
      const double score = 2.0 * taxonomy.lcs_depth(x, y) /
                           static_cast<double>(taxonomy.depth(x) + taxonomy.depth(y));
      best = std::max(best, score);
    }
  }
  return std::min(best, 1.0);
}

namespace detail {

inline double thresholded(double s, double threshold, WupsCut cut) {
  if (s >= threshold) return s;
  return cut == WupsCut::kHard ? 0.0 : 0.1 * s;
}

// Product over tokens of `from` of the best thresholded match in `to`.
inline double directed_wups(const std::vector<std::string_view>& from,
                            const std::vector<std::string_view>& to, const Taxonomy& taxonomy,
                            double threshold, WupsCut cut) {
  double product = 1.0;
  for (auto a : from) {
    double best = 0.0;
    for (auto b : to) best = std::max(best, thresholded(wu_palmer(a, b, taxonomy), threshold, cut));
    product *= best;
  }
  return product;
}

}  // namespace detail

/// Set-based WUPS between two answers: the smaller of the two directed
/// products of best token matches. Equal strings score 1.
inline double wups_phrase(std::string_view predicted, std::string_view truth,
                          const Taxonomy& taxonomy, double threshold,
                          WupsCut cut = WupsCut::kDownWeight) {
  if (predicted == truth) return 1.0;
  const auto p = detail::split_fields(predicted);
  const auto g = detail::split_fields(truth);
  if (p.empty() || g.empty()) return 0.0;
  return std::min(detail::directed_wups(p, g, taxonomy, threshold, cut),
                  detail::directed_wups(g, p, taxonomy, threshold, cut));
}

/// Prediction against every one of the n annotations: mean (ACM) or best
/// (MCM) phrase score.
inline double wups_consensus(const AnswerPattern& pattern, std::string_view predicted,
                             const Taxonomy& taxonomy, double threshold, WupsMode mode,
                             WupsCut cut = WupsCut::kDownWeight) {
  if (pattern.total() < 1) throw DegeneratePatternError("WUPS needs a non-empty pattern");
  double sum = 0.0, best = 0.0;
  for (const auto& e : pattern.entries()) {
    const double s = wups_phrase(predicted, e.answer, taxonomy, threshold, cut);
    sum += e.frequency * s;
    best = std::max(best, s);
  }
  return mode == WupsMode::kMcm ? best : std::min(best, sum / pattern.total());
}

}  // namespace masses

#endif  // MASSES_WUPS_HPP
