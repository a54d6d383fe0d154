#ifndef MASSES_REPORT_HPP
#define MASSES_REPORT_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "masses/answer_model.hpp"
#include "masses/baseline.hpp"
#include "masses/grouping.hpp"
#include "masses/ingestion.hpp"
#include "masses/metrics.hpp"
#include "masses/wups.hpp"

namespace masses {

using OrderedJson = nlohmann::ordered_json;

/// Shortest decimal text that round-trips, e.g. 0.7 -> "0.7".
inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

struct WupsOptions {
  double threshold = 0.9;
  bool acm = true;
  bool mcm = true;
  WupsCut cut = WupsCut::kDownWeight;
};

struct ScoringOptions {
  std::vector<double> thresholds{0.7, 0.9};
  NormalizationConfig normalization;
  WupsOptions wups;
  unsigned workers = 1;
  int histogram_bins = 10;
  /// Largest tolerated fraction of unresolved ids (per side) before aborting.
  double id_tolerance = 0.0;
  /// Score n = 1 samples in the S family, taking S = SeS = 1 (a single
  /// answer is a consensus).
  bool include_degenerate = false;

  /// Sorts and deduplicates thresholds; rejects out-of-range settings.
  void validate() {
    for (double t : thresholds) {
      if (!(t >= 0.0 && t <= 1.0)) throw InputError("SeS threshold out of [0, 1]: " + format_number(t));
    }
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    if (!(wups.threshold >= 0.0 && wups.threshold <= 1.0)) {
      throw InputError("WUPS threshold out of [0, 1]: " + format_number(wups.threshold));
    }
    if (workers == 0) throw InputError("worker count must be at least 1");
    if (histogram_bins < 1) throw InputError("histogram bin count must be at least 1");
    if (!(id_tolerance >= 0.0 && id_tolerance <= 1.0)) throw InputError("id tolerance out of [0, 1]");
  }
};

/// Shared, read-only resources for scoring. Either side may be absent: no
/// backend means no SeS/MaSSeS, no taxonomy means no WUPS.
struct ScoringResources {
  std::shared_ptr<const SimilarityBackend> backend;
  std::shared_ptr<const Taxonomy> taxonomy;
};

/// Scores one question. `prediction` is the raw predicted answer, or empty
/// for data-only analysis.
inline SampleScore score_sample(const RawAnnotation& annotation,
                                const std::optional<std::string>& prediction,
                                const ScoringResources& resources, const ScoringOptions& options) {
  const AnswerPattern pattern = build_pattern(annotation, options.normalization);
  SampleScore out;
  out.question_id = annotation.question_id;
  out.annotators = pattern.total();
  out.unique_answers = pattern.unique_count();
  out.degenerate = pattern.total() < 2;
  const bool s_family = !out.degenerate || options.include_degenerate;

  std::optional<std::string> predicted;
  if (prediction) {
    predicted = normalize_answer(*prediction, options.normalization);
    out.prediction = *predicted;
    out.vqa3plus = out.degenerate ? vqa3plus_raw(pattern, *predicted)
                                  : vqa3plus_averaged(pattern, *predicted);
    out.ma = compute_ma(pattern, *predicted);
    if (resources.taxonomy) {
      const auto& w = options.wups;
      if (w.acm) {
        out.wups_acm = wups_consensus(pattern, *predicted, *resources.taxonomy, w.threshold,
                                      WupsMode::kAcm, w.cut);
      }
      if (w.mcm) {
        out.wups_mcm = wups_consensus(pattern, *predicted, *resources.taxonomy, w.threshold,
                                      WupsMode::kMcm, w.cut);
      }
    }
  }
  if (!s_family) return out;

  out.s = out.degenerate ? 1.0 : compute_s(pattern);
  if (out.ma) out.mas = compute_mas(*out.ma, *out.s);
  if (!resources.backend) return out;
  for (double t : options.thresholds) {
    GroupedPattern grouped = group_pattern(pattern, *resources.backend, t);
    ThresholdScore ts{grouped, out.degenerate ? 1.0 : compute_s(grouped), std::nullopt, std::nullopt};
    if (predicted) {
      ts.ma_updated = compute_ma(grouped, *predicted);
      ts.masses = *ts.ma_updated * ts.ses;
    }
    out.thresholds.emplace(t, std::move(ts));
  }
  return out;
}

struct IdResolution {
  std::vector<std::optional<std::string>> predictions;  // aligned with annotations
  std::vector<QuestionId> unmatched_predictions;
  std::vector<QuestionId> missing_predictions;
};

/// Pairs predictions with annotations and enforces the tolerance on both
/// unmatched predictions and annotations without a prediction.
inline IdResolution resolve_ids(const std::vector<RawAnnotation>& annotations,
                                const std::vector<Prediction>& predictions, double tolerance) {
  IdResolution r;
  r.predictions.resize(annotations.size());
  std::map<QuestionId, std::size_t> index;
  for (std::size_t i = 0; i < annotations.size(); ++i) index.emplace(annotations[i].question_id, i);
  for (const auto& p : predictions) {
    auto it = index.find(p.question_id);
    if (it == index.end()) {
      r.unmatched_predictions.push_back(p.question_id);
    } else {
      r.predictions[it->second] = p.answer;
    }
  }
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    if (!r.predictions[i]) r.missing_predictions.push_back(annotations[i].question_id);
  }
  std::sort(r.unmatched_predictions.begin(), r.unmatched_predictions.end());
  std::sort(r.missing_predictions.begin(), r.missing_predictions.end());

  auto fraction = [](std::size_t k, std::size_t of) {
    return of == 0 ? (k == 0 ? 0.0 : 1.0) : static_cast<double>(k) / static_cast<double>(of);
  };
  const bool too_many_unmatched = fraction(r.unmatched_predictions.size(), predictions.size()) > tolerance;
  const bool too_many_missing = fraction(r.missing_predictions.size(), annotations.size()) > tolerance;
  if (too_many_unmatched || too_many_missing) {
    std::string msg = "unresolved question ids exceed tolerance " + format_number(tolerance);
    auto list = [&](const char* label, const std::vector<QuestionId>& ids) {
      if (ids.empty()) return;
      msg += std::string("\n  ") + label + " (" + std::to_string(ids.size()) + "):";
      for (const auto& id : ids) msg += " " + to_string(id);
    };
    list("predictions without annotation", r.unmatched_predictions);
    list("annotations without prediction", r.missing_predictions);
    throw IdResolutionError(msg);
  }
  return r;
}

/// Scores every annotation on `options.workers` threads. The result is in
/// question_id order and does not depend on the worker count.
inline std::vector<SampleScore> score_dataset(std::vector<RawAnnotation> annotations,
                                              const std::vector<std::optional<std::string>>& predictions,
                                              const ScoringResources& resources,
                                              const ScoringOptions& options) {
  if (!predictions.empty() && predictions.size() != annotations.size()) {
    throw InvariantError("prediction list is not aligned with annotations");
  }
  std::vector<std::size_t> order(annotations.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return annotations[a].question_id < annotations[b].question_id;
  });

  std::vector<std::optional<SampleScore>> slots(order.size());
  std::vector<std::exception_ptr> errors(order.size());
  auto work = [&](std::size_t worker) {
    for (std::size_t k = worker; k < order.size(); k += options.workers) {
      const std::size_t i = order[k];
      try {
        const std::optional<std::string> none;
        slots[k] = score_sample(annotations[i], predictions.empty() ? none : predictions[i],
                                resources, options);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (options.workers <= 1 || order.size() < 2) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    const auto n = std::min<std::size_t>(options.workers, order.size());
    pool.reserve(n);
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<SampleScore> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Named scalar metrics of a sample: vqa3plus, wups_acm, wups_mcm, ma, s,
/// mas, and ses_<t>, ma_updated_<t>, masses_<t> per threshold.
inline std::vector<std::pair<std::string, double>> flatten(const SampleScore& s) {
  std::vector<std::pair<std::string, double>> out;
  auto put = [&](const std::string& name, const std::optional<double>& v) {
    if (v) out.emplace_back(name, *v);
  };
  put("vqa3plus", s.vqa3plus);
  put("wups_acm", s.wups_acm);
  put("wups_mcm", s.wups_mcm);
  put("ma", s.ma);
  put("s", s.s);
  put("mas", s.mas);
  for (const auto& [t, ts] : s.thresholds) put("ses_" + format_number(t), ts.ses);
  for (const auto& [t, ts] : s.thresholds) put("ma_updated_" + format_number(t), ts.ma_updated);
  for (const auto& [t, ts] : s.thresholds) put("masses_" + format_number(t), ts.masses);
  return out;
}

/// Bin of v in [0, 1] split into `bins` equal intervals; 1 falls in the last.
inline std::size_t bin_index(double v, int bins) {
  const auto k = static_cast<long>(std::floor(v * bins));
  return static_cast<std::size_t>(std::clamp(k, 0L, static_cast<long>(bins) - 1));
}

struct MetricSummary {
  std::string name;
  double mean = 0.0;
  std::size_t samples = 0;
  std::vector<std::size_t> histogram;
};

struct SesBin {
  std::size_t samples = 0;
  std::optional<double> mean_vqa3plus;
};

struct CoverageStats {
  std::size_t samples = 0;
  double mean = 0.0;
  double min = 1.0;
  std::size_t full = 0;  // every unique answer vectorized
  std::size_t none = 0;  // no unique answer vectorized
};

struct DatasetReport {
  std::string mode;
  std::size_t annotations = 0;
  std::size_t samples_scored = 0;
  std::size_t degenerate_samples = 0;
  bool degenerate_included = false;
  std::size_t predictions_missing = 0;
  std::size_t unmatched_predictions = 0;
  std::vector<double> thresholds;
  int histogram_bins = 10;
  std::vector<MetricSummary> metrics;  // canonical metric order
  std::map<std::size_t, std::size_t> unique_answers;
  std::map<double, std::vector<SesBin>> vqa3plus_by_ses;
  std::optional<CoverageStats> coverage;

  const MetricSummary* metric(std::string_view name) const {
    for (const auto& m : metrics) {
      if (m.name == name) return &m;
    }
    return nullptr;
  }
};

/// Deterministic sequential reduction over samples in the given order.
inline DatasetReport aggregate(const std::vector<SampleScore>& samples, const ScoringOptions& options,
                               std::string mode) {
  DatasetReport r;
  r.mode = std::move(mode);
  r.samples_scored = samples.size();
  r.degenerate_included = options.include_degenerate;
  r.thresholds = options.thresholds;
  r.histogram_bins = options.histogram_bins;

  std::vector<std::string> names;
  std::map<std::string, std::pair<double, std::size_t>> sums;
  std::map<std::string, std::vector<std::size_t>> histograms;
  for (const auto& s : samples) {
    if (s.degenerate) ++r.degenerate_samples;
    ++r.unique_answers[s.unique_answers];
    for (const auto& [name, v] : flatten(s)) {
      auto [it, fresh] = sums.try_emplace(name, 0.0, 0);
      if (fresh) {
        names.push_back(name);
        histograms[name].assign(options.histogram_bins, 0);
      }
      it->second.first += v;
      it->second.second += 1;
      ++histograms[name][bin_index(v, options.histogram_bins)];
    }
  }
  // Baselines, Ma, S, MaS, then SeS, updated Ma and MaSSeS by threshold.
  auto rank = [](const std::string& n) {
    static const std::vector<std::string> fixed{"vqa3plus", "wups_acm", "wups_mcm", "ma", "s", "mas"};
    for (std::size_t i = 0; i < fixed.size(); ++i) {
      if (fixed[i] == n) return std::pair<int, double>(static_cast<int>(i), 0.0);
    }
    const auto cut = n.rfind('_');
    const std::string base = n.substr(0, cut);
    const double t = std::stod(n.substr(cut + 1));
    const int group = base == "ses" ? 6 : base == "ma_updated" ? 7 : 8;
    return std::pair<int, double>(group, t);
  };
  std::stable_sort(names.begin(), names.end(),
                   [&](const std::string& a, const std::string& b) { return rank(a) < rank(b); });
  for (const auto& name : names) {
    const auto& [sum, count] = sums[name];
    r.metrics.push_back({name, sum / static_cast<double>(count), count, histograms[name]});
  }

  for (double t : options.thresholds) {
    std::vector<double> acc(options.histogram_bins, 0.0);
    std::vector<std::size_t> cnt(options.histogram_bins, 0);
    bool any = false;
    for (const auto& s : samples) {
      auto it = s.thresholds.find(t);
      if (it == s.thresholds.end() || !s.vqa3plus) continue;
      any = true;
      const auto b = bin_index(it->second.ses, options.histogram_bins);
      acc[b] += *s.vqa3plus;
      ++cnt[b];
    }
    if (!any) continue;
    auto& bins = r.vqa3plus_by_ses[t];
    for (int b = 0; b < options.histogram_bins; ++b) {
      SesBin sb{cnt[b], std::nullopt};
      if (cnt[b] > 0) sb.mean_vqa3plus = acc[b] / static_cast<double>(cnt[b]);
      bins.push_back(sb);
    }
  }

  if (!options.thresholds.empty()) {
    CoverageStats c;
    double sum = 0.0;
    for (const auto& s : samples) {
      auto it = s.thresholds.find(options.thresholds.front());
      if (it == s.thresholds.end()) continue;
      const double cov = it->second.grouped.coverage();
      ++c.samples;
      sum += cov;
      c.min = std::min(c.min, cov);
      if (cov == 1.0) ++c.full;
      if (cov == 0.0) ++c.none;
    }
    if (c.samples > 0) {
      c.mean = sum / static_cast<double>(c.samples);
      r.coverage = c;
    }
  }
  return r;
}

namespace detail {

inline OrderedJson optional_number(const std::optional<double>& v) {
  return v ? OrderedJson(*v) : OrderedJson(nullptr);
}

}  // namespace detail

/// One JSONL record. Absent metrics are omitted.
inline OrderedJson sample_to_json(const SampleScore& s) {
  OrderedJson j;
  j["question_id"] = detail::question_id_json(s.question_id);
  j["annotators"] = s.annotators;
  j["unique_answers"] = s.unique_answers;
  j["degenerate"] = s.degenerate;
  if (s.prediction) j["prediction"] = *s.prediction;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  put("vqa3plus", s.vqa3plus);
  put("ma", s.ma);
  put("s", s.s);
  put("mas", s.mas);
  if (!s.thresholds.empty()) {
    OrderedJson per = OrderedJson::object();
    for (const auto& [t, ts] : s.thresholds) {
      OrderedJson e;
      e["ses"] = ts.ses;
      if (ts.ma_updated) e["ma_updated"] = *ts.ma_updated;
      if (ts.masses) e["masses"] = *ts.masses;
      e["coverage"] = ts.grouped.coverage();
      OrderedJson clusters = OrderedJson::array();
      for (const auto& c : ts.grouped.clusters()) {
        clusters.push_back(OrderedJson{{"members", c.members}, {"frequency", c.frequency}});
      }
      e["clusters"] = std::move(clusters);
      per[format_number(t)] = std::move(e);
    }
    j["thresholds"] = std::move(per);
  }
  put("wups_acm", s.wups_acm);
  put("wups_mcm", s.wups_mcm);
  return j;
}

/// Scalar metrics of a JSONL record, named as in flatten().
inline std::map<std::string, double> record_metrics(const nlohmann::json& record) {
  std::map<std::string, double> out;
  for (const char* key : {"vqa3plus", "ma", "s", "mas", "wups_acm", "wups_mcm"}) {
    if (record.contains(key) && record[key].is_number()) out[key] = record[key].get<double>();
  }
  if (record.contains("thresholds") && record["thresholds"].is_object()) {
    for (const auto& [t, e] : record["thresholds"].items()) {
      for (const char* key : {"ses", "ma_updated", "masses"}) {
        if (e.contains(key) && e[key].is_number()) out[std::string(key) + "_" + t] = e[key].get<double>();
      }
    }
  }
  return out;
}

inline OrderedJson report_to_json(const DatasetReport& r) {
  OrderedJson j;
  j["mode"] = r.mode;
  j["counts"] = OrderedJson{{"annotations", r.annotations},
                            {"samples_scored", r.samples_scored},
                            {"degenerate_samples", r.degenerate_samples},
                            {"degenerate_included", r.degenerate_included},
                            {"predictions_missing", r.predictions_missing},
                            {"unmatched_predictions", r.unmatched_predictions}};
  OrderedJson thresholds = OrderedJson::array();
  for (double t : r.thresholds) thresholds.push_back(t);
  j["ses_thresholds"] = std::move(thresholds);
  OrderedJson means = OrderedJson::object();
  OrderedJson counts = OrderedJson::object();
  for (const auto& m : r.metrics) {
    means[m.name] = m.mean;
    counts[m.name] = m.samples;
  }
  j["means"] = std::move(means);
  j["metric_samples"] = std::move(counts);

  OrderedJson hist = OrderedJson::object();
  hist["bins"] = r.histogram_bins;
  OrderedJson unique = OrderedJson::object();
  for (const auto& [k, c] : r.unique_answers) unique[std::to_string(k)] = c;
  hist["unique_answers"] = std::move(unique);
  OrderedJson metric_hist = OrderedJson::object();
  for (const auto& m : r.metrics) metric_hist[m.name] = m.histogram;
  hist["metrics"] = std::move(metric_hist);
  j["histograms"] = std::move(hist);

  OrderedJson by_ses = OrderedJson::object();
  for (const auto& [t, bins] : r.vqa3plus_by_ses) {
    OrderedJson arr = OrderedJson::array();
    for (std::size_t b = 0; b < bins.size(); ++b) {
      arr.push_back(OrderedJson{{"lower", static_cast<double>(b) / r.histogram_bins},
                                {"upper", static_cast<double>(b + 1) / r.histogram_bins},
                                {"samples", bins[b].samples},
                                {"mean_vqa3plus", detail::optional_number(bins[b].mean_vqa3plus)}});
    }
    by_ses[format_number(t)] = std::move(arr);
  }
  j["vqa3plus_by_ses"] = std::move(by_ses);
  if (r.coverage) {
    j["embedding_coverage"] = OrderedJson{{"samples", r.coverage->samples},
                                          {"mean", r.coverage->mean},
                                          {"min", r.coverage->min},
                                          {"full", r.coverage->full},
                                          {"none", r.coverage->none}};
  }
  return j;
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("write failed: " + path.string());
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string bin_edge(int b, int bins) {
  return format_number(static_cast<double>(b) / bins);
}

}  // namespace detail

/// Writes samples.jsonl, summary.json and one CSV per histogram into `dir`.
inline void write_outputs(const std::filesystem::path& dir, const std::vector<SampleScore>& samples,
                          const DatasetReport& report) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir.string() + ": " + ec.message());

  std::string jsonl;
  for (const auto& s : samples) jsonl += sample_to_json(s).dump() + '\n';
  detail::write_text(dir / "samples.jsonl", jsonl);
  detail::write_text(dir / "summary.json", report_to_json(report).dump(2) + '\n');

  std::string unique = "unique_answers,samples\n";
  for (const auto& [k, c] : report.unique_answers) unique += std::to_string(k) + "," + std::to_string(c) + "\n";
  detail::write_text(dir / "unique_answers.csv", unique);

  for (const auto& m : report.metrics) {
    std::string csv = "lower,upper,samples\n";
    for (int b = 0; b < report.histogram_bins; ++b) {
      csv += detail::bin_edge(b, report.histogram_bins) + "," + detail::bin_edge(b + 1, report.histogram_bins) +
             "," + std::to_string(m.histogram[b]) + "\n";
    }
    detail::write_text(dir / ("hist_" + m.name + ".csv"), csv);
  }
  for (const auto& [t, bins] : report.vqa3plus_by_ses) {
    std::string csv = "lower,upper,samples,mean_vqa3plus\n";
    for (int b = 0; b < report.histogram_bins; ++b) {
      csv += detail::bin_edge(b, report.histogram_bins) + "," + detail::bin_edge(b + 1, report.histogram_bins) +
             "," + std::to_string(bins[b].samples) + "," +
             (bins[b].mean_vqa3plus ? format_number(*bins[b].mean_vqa3plus) : "") + "\n";
    }
    detail::write_text(dir / ("vqa3plus_by_ses_" + format_number(t) + ".csv"), csv);
  }
}

/// Human-readable table of dataset means.
inline std::string format_summary(const DatasetReport& r, int decimals) {
  std::ostringstream out;
  out << r.mode << ": " << r.samples_scored << " samples scored";
  if (r.degenerate_samples > 0) {
    out << ", " << r.degenerate_samples << " degenerate"
        << (r.degenerate_included ? " (included)" : " (excluded from S family)");
  }
  if (r.predictions_missing > 0) out << ", " << r.predictions_missing << " without prediction";
  out << "\n";
  std::size_t width = 6;
  for (const auto& m : r.metrics) width = std::max(width, m.name.size());
  out << std::fixed << std::setprecision(decimals);
  for (const auto& m : r.metrics) {
    out << "  " << std::left << std::setw(static_cast<int>(width)) << m.name << "  " << m.mean
        << "  (n=" << m.samples << ")\n";
  }
  return out.str();
}

/// Everything the command-line entry points need.
struct RunConfig {
  std::string annotations;
  AnnotationFormat format = AnnotationFormat::kVqaJson;
  std::optional<std::string> predictions;
  std::optional<std::string> embeddings;
  std::optional<std::string> fixture_backend;
  std::optional<std::string> taxonomy;
  std::string out_dir;
  ScoringOptions options;
};

inline ScoringResources load_resources(const RunConfig& config, bool with_taxonomy) {
  if (config.embeddings && config.fixture_backend) {
    throw InputError("--embeddings and --fixture-backend are mutually exclusive");
  }
  ScoringResources res;
  if (config.embeddings) {
    res.backend = std::make_shared<EmbeddingBackend>(
        std::make_shared<const EmbeddingTable>(load_embeddings(*config.embeddings)));
  } else if (config.fixture_backend) {
    res.backend = std::make_shared<FixtureBackend>(FixtureBackend::load(*config.fixture_backend));
  } else if (!config.options.thresholds.empty()) {
    log::warn("no embeddings or fixture backend given; SeS and MaSSeS are skipped");
  }
  if (with_taxonomy && config.taxonomy) {
    res.taxonomy = std::make_shared<const Taxonomy>(load_taxonomy(*config.taxonomy));
  }
  return res;
}

struct RunResult {
  std::vector<SampleScore> samples;
  DatasetReport report;
};

/// Scores predictions against annotations and writes the run outputs.
inline RunResult evaluate(RunConfig config) {
  config.options.validate();
  if (!config.predictions) throw InputError("evaluate needs a predictions file");
  auto annotations = load_annotations(config.annotations, config.format);
  const auto predictions = load_predictions(*config.predictions);
  const auto resolved = resolve_ids(annotations, predictions, config.options.id_tolerance);
  const auto resources = load_resources(config, true);

  std::vector<RawAnnotation> matched;
  std::vector<std::optional<std::string>> answers;
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    if (!resolved.predictions[i]) continue;
    matched.push_back(std::move(annotations[i]));
    answers.push_back(resolved.predictions[i]);
  }
  RunResult result;
  result.samples = score_dataset(std::move(matched), answers, resources, config.options);
  result.report = aggregate(result.samples, config.options, "evaluate");
  result.report.annotations = annotations.size();
  result.report.predictions_missing = resolved.missing_predictions.size();
  result.report.unmatched_predictions = resolved.unmatched_predictions.size();
  if (!config.out_dir.empty()) write_outputs(config.out_dir, result.samples, result.report);
  return result;
}

/// Data-side analysis of an annotation set; predictions are never read.
inline RunResult analyze(RunConfig config) {
  config.options.validate();
  auto annotations = load_annotations(config.annotations, config.format);
  const auto resources = load_resources(config, false);
  const std::size_t count = annotations.size();
  RunResult result;
  result.samples = score_dataset(std::move(annotations), {}, resources, config.options);
  result.report = aggregate(result.samples, config.options, "analyze");
  result.report.annotations = count;
  if (!config.out_dir.empty()) write_outputs(config.out_dir, result.samples, result.report);
  return result;
}

// ---------------------------------------------------------------------------
// Comparison of two score columns.

struct ScoreRecord {
  QuestionId question_id;
  std::map<std::string, double> metrics;
};

inline std::vector<ScoreRecord> parse_score_records(std::istream& in, const std::string& source) {
  std::vector<ScoreRecord> out;
  std::set<QuestionId> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string at = source + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw InputError(at + ": malformed JSON");
    }
    if (!j.is_object() || !j.contains("question_id")) throw InputError(at + ": record without question_id");
    ScoreRecord r{detail::parse_question_id(j["question_id"], at), record_metrics(j)};
    if (!seen.insert(r.question_id).second) {
      throw InputError(at + ": duplicate question_id " + to_string(r.question_id));
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<ScoreRecord> load_score_records(const std::string& path) {
  auto in = detail::open_or_throw(path);
  return parse_score_records(in, path);
}

struct ScoreDelta {
  QuestionId question_id;
  double left = 0.0;
  double right = 0.0;
  double delta = 0.0;  // left - right
};

struct Comparison {
  std::string left_metric;
  std::string right_metric;
  std::vector<ScoreDelta> deltas;  // by |delta| descending, then question_id
  std::size_t skipped = 0;         // samples lacking either metric
  double mean_delta = 0.0;
  double mean_abs_delta = 0.0;
  int bins = 10;
  std::vector<std::size_t> left_histogram;
  std::vector<std::size_t> right_histogram;
  std::map<std::string, std::vector<SesBin>> vqa3plus_by_ses;  // keyed by threshold text
};

/// Compares `left_metric` of `left` with `right_metric` of `right`, sample by
/// sample. Both sides must hold the same question ids. Pass the same records
/// twice to compare two metrics of one run.
inline Comparison compare(const std::vector<ScoreRecord>& left, const std::vector<ScoreRecord>& right,
                          const std::string& left_metric, const std::string& right_metric, int bins = 10) {
  if (bins < 1) throw InputError("histogram bin count must be at least 1");
  std::map<QuestionId, const ScoreRecord*> l, r;
  for (const auto& x : left) l[x.question_id] = &x;
  for (const auto& x : right) r[x.question_id] = &x;
  std::vector<QuestionId> only_left, only_right;
  for (const auto& [id, _] : l) {
    if (!r.contains(id)) only_left.push_back(id);
  }
  for (const auto& [id, _] : r) {
    if (!l.contains(id)) only_right.push_back(id);
  }
  if (!only_left.empty() || !only_right.empty()) {
    std::string msg = "compared runs hold different question ids";
    for (const auto& id : only_left) msg += "\n  only in left: " + to_string(id);
    for (const auto& id : only_right) msg += "\n  only in right: " + to_string(id);
    throw IdResolutionError(msg);
  }

  Comparison c;
  c.left_metric = left_metric;
  c.right_metric = right_metric;
  c.bins = bins;
  c.left_histogram.assign(bins, 0);
  c.right_histogram.assign(bins, 0);
  double sum = 0.0, sum_abs = 0.0;
  for (const auto& [id, lr] : l) {
    const auto* rr = r[id];
    auto lv = lr->metrics.find(left_metric);
    auto rv = rr->metrics.find(right_metric);
    if (lv == lr->metrics.end() || rv == rr->metrics.end()) {
      ++c.skipped;
      continue;
    }
    const double d = lv->second - rv->second;
    c.deltas.push_back({id, lv->second, rv->second, d});
    sum += d;
    sum_abs += std::abs(d);
    ++c.left_histogram[bin_index(lv->second, bins)];
    ++c.right_histogram[bin_index(rv->second, bins)];
  }
  if (!c.deltas.empty()) {
    c.mean_delta = sum / static_cast<double>(c.deltas.size());
    c.mean_abs_delta = sum_abs / static_cast<double>(c.deltas.size());
  }
  std::stable_sort(c.deltas.begin(), c.deltas.end(), [](const ScoreDelta& a, const ScoreDelta& b) {
    return std::abs(a.delta) > std::abs(b.delta);
  });

  // Mean VQA3+ per SeS bin, from the left run.
  std::map<std::string, std::pair<std::vector<double>, std::vector<std::size_t>>> acc;
  for (const auto& [id, rec] : l) {
    auto v = rec->metrics.find("vqa3plus");
    if (v == rec->metrics.end()) continue;
    for (const auto& [name, value] : rec->metrics) {
      if (name.rfind("ses_", 0) != 0) continue;
      auto& [sums, counts] = acc[name.substr(4)];
      if (sums.empty()) {
        sums.assign(bins, 0.0);
        counts.assign(bins, 0);
      }
      const auto b = bin_index(value, bins);
      sums[b] += v->second;
      ++counts[b];
    }
  }
  for (const auto& [t, sc] : acc) {
    auto& out = c.vqa3plus_by_ses[t];
    for (int b = 0; b < bins; ++b) {
      SesBin sb{sc.second[b], std::nullopt};
      if (sb.samples > 0) sb.mean_vqa3plus = sc.first[b] / static_cast<double>(sb.samples);
      out.push_back(sb);
    }
  }
  return c;
}

inline OrderedJson comparison_to_json(const Comparison& c) {
  OrderedJson j;
  j["left_metric"] = c.left_metric;
  j["right_metric"] = c.right_metric;
  j["samples"] = c.deltas.size();
  j["skipped"] = c.skipped;
  j["mean_delta"] = c.mean_delta;
  j["mean_abs_delta"] = c.mean_abs_delta;
  OrderedJson hist = OrderedJson::array();
  for (int b = 0; b < c.bins; ++b) {
    hist.push_back(OrderedJson{{"lower", static_cast<double>(b) / c.bins},
                               {"upper", static_cast<double>(b + 1) / c.bins},
                               {"left", c.left_histogram[b]},
                               {"right", c.right_histogram[b]}});
  }
  j["histogram"] = std::move(hist);
  OrderedJson by_ses = OrderedJson::object();
  for (const auto& [t, bins] : c.vqa3plus_by_ses) {
    OrderedJson arr = OrderedJson::array();
    for (std::size_t b = 0; b < bins.size(); ++b) {
      arr.push_back(OrderedJson{{"lower", static_cast<double>(b) / c.bins},
                                {"upper", static_cast<double>(b + 1) / c.bins},
                                {"samples", bins[b].samples},
                                {"mean_vqa3plus", detail::optional_number(bins[b].mean_vqa3plus)}});
    }
    by_ses[t] = std::move(arr);
  }
  j["vqa3plus_by_ses"] = std::move(by_ses);
  OrderedJson deltas = OrderedJson::array();
  for (const auto& d : c.deltas) {
    deltas.push_back(OrderedJson{{"question_id", detail::question_id_json(d.question_id)},
                                 {"left", d.left},
                                 {"right", d.right},
                                 {"delta", d.delta}});
  }
  j["deltas"] = std::move(deltas);
  return j;
}

inline void write_comparison(const std::filesystem::path& dir, const Comparison& c) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir.string() + ": " + ec.message());
  detail::write_text(dir / "compare.json", comparison_to_json(c).dump(2) + '\n');
  std::string csv = "question_id,left,right,delta\n";
  for (const auto& d : c.deltas) {
    csv += detail::csv_field(to_string(d.question_id)) + "," + format_number(d.left) + "," + format_number(d.right) + "," +
           format_number(d.delta) + "\n";
  }
  detail::write_text(dir / "deltas.csv", csv);
}

}  // namespace masses

#endif  // MASSES_REPORT_HPP
