// Command-line front end: evaluate, analyze, compare.
//
// Sample usage:
//   masses evaluate --annotations val.json --format vqa-json
//       --predictions preds.json --embeddings vectors.vec --out runs/val
//   masses analyze --annotations val.jsonl --format simple-jsonl
//       --fixture-backend groups.json --out runs/data
//   masses compare --run runs/val/samples.jsonl --metrics vqa3plus,masses_0.9
//       --out runs/cmp

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "masses/masses.hpp"

namespace {

struct NormalizationFlags {
  bool none = false;
  std::string config_path;
  bool no_lowercase = false;
  bool no_punctuation = false;
  bool no_word_numbers = false;
  bool no_articles = false;
  bool no_contractions = false;
  bool no_collapse = false;

  void add_to(CLI::App* app) {
    app->add_flag("--no-normalize", none, "Disable every normalization stage");
    app->add_option("--normalization-config", config_path,
                    "JSON file with normalization flags and replacement tables")
        ->check(CLI::ExistingFile);
    app->add_flag("--no-lowercase", no_lowercase);
    app->add_flag("--no-punctuation", no_punctuation);
    app->add_flag("--no-word-numbers", no_word_numbers);
    app->add_flag("--no-articles", no_articles);
    app->add_flag("--no-contractions", no_contractions);
    app->add_flag("--no-collapse-whitespace", no_collapse);
  }

  masses::NormalizationConfig build() const {
    if (none) return masses::NormalizationConfig::none();
    auto c = config_path.empty() ? masses::NormalizationConfig{}
                                 : masses::load_normalization_config(config_path);
    if (no_lowercase) c.lowercase = false;
    if (no_punctuation) c.punctuation_rules = false;
    if (no_word_numbers) c.word_numbers_to_digits = false;
    if (no_articles) c.strip_articles = false;
    if (no_contractions) c.expand_contractions = false;
    if (no_collapse) c.collapse_whitespace = false;
    return c;
  }
};

struct DatasetArgs {
  std::string annotations;
  std::string format = "vqa-json";
  std::string embeddings;
  std::string fixture_backend;
  std::vector<double> thresholds{0.7, 0.9};
  std::string out;
  unsigned workers = 1;
  int bins = 10;
  int round = -1;
  bool include_degenerate = false;
  NormalizationFlags normalization;

  void add_to(CLI::App* app) {
    app->add_option("--annotations", annotations, "Annotation file")->required()->check(CLI::ExistingFile);
    app->add_option("--format", format, "vqa-json or simple-jsonl")
        ->check(CLI::IsMember({"vqa-json", "simple-jsonl"}));
    auto* emb = app->add_option("--embeddings", embeddings, "Word-vector text file")->check(CLI::ExistingFile);
    app->add_option("--fixture-backend", fixture_backend, "JSON answer->vector or answer->label map")
        ->check(CLI::ExistingFile)
        ->excludes(emb);
    app->add_option("--ses-thresholds", thresholds, "Comma-separated SeS thresholds")->delimiter(',');
    app->add_option("--out", out, "Output directory")->required();
    app->add_option("--workers", workers, "Scoring threads")->check(CLI::PositiveNumber);
    app->add_option("--bins", bins, "Histogram bin count")->check(CLI::PositiveNumber);
    app->add_option("--round", round, "Decimals in the printed summary")->check(CLI::Range(0, 17));
    app->add_flag("--include-degenerate", include_degenerate,
                  "Score single-annotation samples in S/SeS means (S = 1)");
    normalization.add_to(app);
  }

  masses::RunConfig build() const {
    masses::RunConfig c;
    c.annotations = annotations;
    c.format = masses::parse_annotation_format(format);
    if (!embeddings.empty()) c.embeddings = embeddings;
    if (!fixture_backend.empty()) c.fixture_backend = fixture_backend;
    c.out_dir = out;
    c.options.thresholds = thresholds;
    c.options.workers = workers;
    c.options.histogram_bins = bins;
    c.options.include_degenerate = include_degenerate;
    c.options.normalization = normalization.build();
    return c;
  }
};

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(s.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VQA evaluation with Ma, S, SeS, MaSSeS, VQA3+ and WUPS"};
  app.require_subcommand(1);

  DatasetArgs eval_args;
  std::string predictions, taxonomy, wups_modes = "acm,mcm";
  double wups_threshold = 0.9, id_tolerance = 0.0;
  bool hard_cut = false;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against annotations");
  eval_args.add_to(evaluate);
  evaluate->add_option("--predictions", predictions, "JSON array of {question_id, answer}")
      ->required()
      ->check(CLI::ExistingFile);
  auto* tax = evaluate->add_option("--taxonomy", taxonomy, "Taxonomy edge list for WUPS")->check(CLI::ExistingFile);
  evaluate->add_option("--wups-threshold", wups_threshold, "WUPS threshold")->check(CLI::Range(0.0, 1.0))->needs(tax);
  evaluate->add_option("--wups-mode", wups_modes, "acm, mcm or acm,mcm")->needs(tax);
  evaluate->add_flag("--wups-hard-cut", hard_cut, "Zero token similarities below the threshold")->needs(tax);
  evaluate->add_option("--id-tolerance", id_tolerance, "Tolerated fraction of unresolved ids")
      ->check(CLI::Range(0.0, 1.0));

  DatasetArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Data-side reliability analysis of annotations");
  analyze_args.add_to(analyze);

  std::string left, right, run, metrics, cmp_out;
  int cmp_bins = 10;
  auto* compare = app.add_subcommand("compare", "Per-sample comparison of two score columns");
  auto* left_opt = compare->add_option("--left", left, "Left samples.jsonl")->check(CLI::ExistingFile);
  auto* right_opt = compare->add_option("--right", right, "Right samples.jsonl")->check(CLI::ExistingFile);
  auto* run_opt = compare->add_option("--run", run, "Single samples.jsonl")->check(CLI::ExistingFile);
  left_opt->needs(right_opt)->excludes(run_opt);
  right_opt->needs(left_opt);
  compare->add_option("--metrics", metrics,
                      "Metric pair 'a,b' (or one metric for both runs); default masses_0.9");
  compare->add_option("--out", cmp_out, "Output directory")->required();
  compare->add_option("--bins", cmp_bins, "Histogram bin count")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(masses::ExitCode::kInput);
  }

  try {
    if (evaluate->parsed()) {
      auto config = eval_args.build();
      config.predictions = predictions;
      if (!taxonomy.empty()) config.taxonomy = taxonomy;
      config.options.id_tolerance = id_tolerance;
      config.options.wups.threshold = wups_threshold;
      config.options.wups.cut = hard_cut ? masses::WupsCut::kHard : masses::WupsCut::kDownWeight;
      config.options.wups.acm = config.options.wups.mcm = false;
      for (const auto& m : split_commas(wups_modes)) {
        if (m == "acm") {
          config.options.wups.acm = true;
        } else if (m == "mcm") {
          config.options.wups.mcm = true;
        } else {
          throw masses::InputError("unknown WUPS mode '" + m + "'");
        }
      }
      const auto result = masses::evaluate(config);
      std::cout << masses::format_summary(result.report, eval_args.round < 0 ? 3 : eval_args.round);
    } else if (analyze->parsed()) {
      const auto result = masses::analyze(analyze_args.build());
      std::cout << masses::format_summary(result.report, analyze_args.round < 0 ? 3 : analyze_args.round);
    } else if (compare->parsed()) {
      auto names = metrics.empty() ? std::vector<std::string>{"masses_0.9"} : split_commas(metrics);
      if (names.size() > 2) throw masses::InputError("--metrics takes one or two names");
      if (names.size() == 1) names.push_back(names.front());
      masses::Comparison c;
      if (!run.empty()) {
        if (metrics.empty() || names[0] == names[1]) {
          throw masses::InputError("--run needs two different metrics, e.g. --metrics vqa3plus,masses_0.9");
        }
        const auto records = masses::load_score_records(run);
        c = masses::compare(records, records, names[0], names[1], cmp_bins);
      } else if (!left.empty()) {
        c = masses::compare(masses::load_score_records(left), masses::load_score_records(right), names[0],
                            names[1], cmp_bins);
      } else {
        throw masses::InputError("compare needs --left/--right or --run");
      }
      masses::write_comparison(cmp_out, c);
      std::cout << "compared " << c.deltas.size() << " samples (" << c.skipped
                << " skipped): mean delta " << c.mean_delta << ", mean |delta| " << c.mean_abs_delta
                << "\n";
    }
  } catch (const masses::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return static_cast<int>(masses::ExitCode::kInvariant);
  }
  return 0;
}
