#ifndef MASSES_GROUPING_HPP
#define MASSES_GROUPING_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "masses/answer_model.hpp"
#include "masses/embedding_table.hpp"

namespace masses {

using Vector = std::vector<double>;

/// Maps an answer to a vector (or a miss). Implementations must be
/// deterministic and safe for concurrent readers.
class SimilarityBackend {
 public:
  virtual ~SimilarityBackend() = default;
  virtual std::optional<Vector> vectorize(std::string_view answer) const = 0;

  /// Fixture backends may pin a cluster label instead of a vector. When any
  /// answer of a pattern has a label, grouping uses labels for that pattern.
  virtual std::optional<std::string> cluster_label(std::string_view) const { return std::nullopt; }
};

/// Mean of the embeddings of the whitespace tokens of `answer` that exist in
/// `table`. Unknown tokens are skipped; a miss when none is known.
inline std::optional<Vector> vectorize_answer(std::string_view answer, const EmbeddingTable& table) {
  Vector sum(table.dimension(), 0.0);
  std::size_t found = 0;
  for (auto token : detail::split_fields(answer)) {
    if (auto row = table.find(token)) {
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += (*row)[k];
      ++found;
    }
  }
  if (found == 0) return std::nullopt;
  for (double& v : sum) v /= static_cast<double>(found);
  return sum;
}

class EmbeddingBackend final : public SimilarityBackend {
 public:
  explicit EmbeddingBackend(std::shared_ptr<const EmbeddingTable> table) : table_(std::move(table)) {}

  std::optional<Vector> vectorize(std::string_view answer) const override {
    return vectorize_answer(answer, *table_);
  }

  const EmbeddingTable& table() const { return *table_; }

 private:
  std::shared_ptr<const EmbeddingTable> table_;
};

/// Test backend with explicit answer -> vector or answer -> cluster label
/// assignments.
class FixtureBackend final : public SimilarityBackend {
 public:
  using Entry = std::variant<Vector, std::string>;

  void set_vector(std::string answer, Vector v) {
    if (v.empty()) throw InvariantError("empty fixture vector for '" + answer + "'");
    if (dimension_ && *dimension_ != v.size()) {
      throw InvariantError("fixture vector for '" + answer + "' has " + std::to_string(v.size()) +
                           " components, expected " + std::to_string(*dimension_));
    }
    for (double x : v) {
      if (!std::isfinite(x)) throw InvariantError("non-finite fixture component for '" + answer + "'");
    }
    dimension_ = v.size();
    entries_[std::move(answer)] = std::move(v);
  }

  void set_label(std::string answer, std::string label) {
    entries_[std::move(answer)] = std::move(label);
  }

  std::optional<Vector> vectorize(std::string_view answer) const override {
    auto it = entries_.find(answer);
    if (it == entries_.end()) return std::nullopt;
    if (const auto* v = std::get_if<Vector>(&it->second)) return *v;
    return std::nullopt;
  }

  std::optional<std::string> cluster_label(std::string_view answer) const override {
    auto it = entries_.find(answer);
    if (it == entries_.end()) return std::nullopt;
    if (const auto* l = std::get_if<std::string>(&it->second)) return *l;
    return std::nullopt;
  }

  std::size_t size() const { return entries_.size(); }

  /// JSON object: answer -> array of numbers, or answer -> label string.
  static FixtureBackend from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InputError("fixture backend must be a JSON object");
    FixtureBackend backend;
    for (const auto& [answer, value] : j.items()) {
      if (value.is_string()) {
        backend.set_label(answer, value.get<std::string>());
      } else if (value.is_array()) {
        Vector v;
        for (const auto& x : value) {
          if (!x.is_number()) throw InputError("fixture vector for '" + answer + "' has a non-number");
          v.push_back(x.get<double>());
        }
        try {
          backend.set_vector(answer, std::move(v));
        } catch (const InvariantError& e) {
          throw InputError(e.what());
        }
      } else {
        throw InputError("fixture entry for '" + answer + "' must be a label or a vector");
      }
    }
    return backend;
  }

  static FixtureBackend load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open fixture backend: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(path + ": byte " + std::to_string(e.byte) + ": " + e.what());
    }
    return from_json(j);
  }

 private:
  std::map<std::string, Entry, std::less<>> entries_;
  std::optional<std::size_t> dimension_;
};

/// Cosine similarity clamped to [0, 1]. Zero vectors score 0; identical
/// vectors score exactly 1.
inline double clamped_cosine(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw InvariantError("cosine of vectors with different dimensions");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  if (a == b) return 1.0;
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, 0.0, 1.0);
}

/// Unweighted mean over the vectors of the vectorizable unique answers.
inline std::optional<Vector> pattern_centroid(const AnswerPattern& pattern,
                                              const SimilarityBackend& backend) {
  std::optional<Vector> sum;
  std::size_t found = 0;
  for (const auto& e : pattern.entries()) {
    auto v = backend.vectorize(e.answer);
    if (!v) continue;
    if (!sum) {
      sum = Vector(v->size(), 0.0);
    } else if (sum->size() != v->size()) {
      throw InvariantError("answer vectors of one pattern differ in dimension");
    }
    for (std::size_t k = 0; k < v->size(); ++k) (*sum)[k] += (*v)[k];
    ++found;
  }
  if (sum) {
    for (double& x : *sum) x /= static_cast<double>(found);
  }
  return sum;
}

/// Clamped cosine of each unique answer (in pattern order) to the pattern
/// centroid; nullopt for answers without a vector.
inline std::vector<std::optional<double>> answer_similarities(const AnswerPattern& pattern,
                                                              const SimilarityBackend& backend) {
  std::vector<std::optional<double>> sims(pattern.unique_count());
  const auto centroid = pattern_centroid(pattern, backend);
  if (!centroid) return sims;
  for (std::size_t i = 0; i < pattern.unique_count(); ++i) {
    if (auto v = backend.vectorize(pattern.entries()[i].answer)) sims[i] = clamped_cosine(*v, *centroid);
  }
  return sims;
}

struct Cluster {
  std::vector<std::string> members;  // in source pattern order
  int frequency = 0;
  bool operator==(const Cluster&) const = default;
};

/// An answer pattern after semantic regrouping: one merged cluster at most,
/// everything else singletons.
class GroupedPattern {
 public:
  GroupedPattern(std::vector<Cluster> clusters, int total, double threshold, double coverage)
      : clusters_(std::move(clusters)), total_(total), threshold_(threshold), coverage_(coverage) {
    std::sort(clusters_.begin(), clusters_.end(), [](const Cluster& a, const Cluster& b) {
      return a.frequency != b.frequency ? a.frequency > b.frequency : a.members < b.members;
    });
    int sum = 0;
    for (const auto& c : clusters_) sum += c.frequency;
    if (sum != total_) throw InvariantError("cluster frequencies do not sum to the pattern total");
  }

  const std::vector<Cluster>& clusters() const { return clusters_; }
  int total() const { return total_; }
  int max_frequency() const { return clusters_.empty() ? 0 : clusters_.front().frequency; }
  double threshold() const { return threshold_; }
  double coverage() const { return coverage_; }

  /// The cluster holding `answer` as an exact member. Empty answers never match.
  const Cluster* locate(std::string_view answer) const {
    if (answer.empty()) return nullptr;
    for (const auto& c : clusters_) {
      if (std::find(c.members.begin(), c.members.end(), answer) != c.members.end()) return &c;
    }
    return nullptr;
  }

  int frequency_of(std::string_view answer) const {
    const Cluster* c = locate(answer);
    return c ? c->frequency : 0;
  }

  /// The multi-member cluster, if grouping merged anything.
  const Cluster* merged() const {
    for (const auto& c : clusters_) {
      if (c.members.size() > 1) return &c;
    }
    return nullptr;
  }

 private:
  std::vector<Cluster> clusters_;
  int total_;
  double threshold_;
  double coverage_;
};

inline const Cluster* locate_prediction(const GroupedPattern& grouped, std::string_view predicted) {
  return grouped.locate(predicted);
}

namespace detail {

inline GroupedPattern assemble(const AnswerPattern& pattern, const std::vector<bool>& in_merged,
                               double threshold, double coverage) {
  std::vector<Cluster> clusters;
  Cluster merged;
  for (std::size_t i = 0; i < pattern.unique_count(); ++i) {
    const auto& e = pattern.entries()[i];
    if (in_merged[i]) {
      merged.members.push_back(e.answer);
      merged.frequency += e.frequency;
    } else {
      clusters.push_back({{e.answer}, e.frequency});
    }
  }
  if (!merged.members.empty()) clusters.push_back(std::move(merged));
  return GroupedPattern(std::move(clusters), pattern.total(), threshold, coverage);
}

// Label mode: the label shared by two or more answers with the largest summed
// frequency becomes the merged cluster (ties: smallest label).
inline GroupedPattern group_by_labels(const AnswerPattern& pattern, const SimilarityBackend& backend,
                                      double threshold) {
  const auto& entries = pattern.entries();
  std::vector<std::optional<std::string>> labels(entries.size());
  std::map<std::string, std::pair<int, int>> groups;  // label -> (members, frequency)
  std::size_t labelled = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    labels[i] = backend.cluster_label(entries[i].answer);
    if (!labels[i]) continue;
    ++labelled;
    auto& g = groups[*labels[i]];
    g.first += 1;
    g.second += entries[i].frequency;
  }
  std::optional<std::string> chosen;
  int best = -1;
  for (const auto& [label, g] : groups) {
    if (g.first >= 2 && g.second > best) {
      best = g.second;
      chosen = label;
    }
  }
  std::vector<bool> in_merged(entries.size(), false);
  for (std::size_t i = 0; i < entries.size(); ++i) in_merged[i] = chosen && labels[i] == chosen;
  return assemble(pattern, in_merged, threshold,
                  static_cast<double>(labelled) / static_cast<double>(entries.size()));
}

}  // namespace detail

/// Merges every unique answer whose clamped cosine to the pattern centroid is
/// at least `threshold` into one cluster; the rest stay singletons. Answers
/// without a vector never join the merged cluster.
inline GroupedPattern group_pattern(const AnswerPattern& pattern, const SimilarityBackend& backend,
                                    double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw InputError("grouping threshold must lie in [0, 1], got " + std::to_string(threshold));
  }
  for (const auto& e : pattern.entries()) {
    if (backend.cluster_label(e.answer)) return detail::group_by_labels(pattern, backend, threshold);
  }
  const auto sims = answer_similarities(pattern, backend);
  std::vector<bool> in_merged(sims.size(), false);
  std::size_t vectorized = 0;
  for (std::size_t i = 0; i < sims.size(); ++i) {
    if (!sims[i]) continue;
    ++vectorized;
    in_merged[i] = *sims[i] >= threshold;
  }
  const double coverage =
      sims.empty() ? 0.0 : static_cast<double>(vectorized) / static_cast<double>(sims.size());
  return detail::assemble(pattern, in_merged, threshold, coverage);
}

}  // namespace masses

#endif  // MASSES_GROUPING_HPP
