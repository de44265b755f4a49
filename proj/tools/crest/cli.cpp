#include "cli.hpp"

#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "crest/error.hpp"

namespace crest::cli {

namespace {

// Flags that were given on the command line; each one overrides the config.
struct Overrides {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> parallelism;
  std::optional<std::string> cache_dir;
  std::optional<std::string> out;

  std::optional<std::string> corpus, candidates, scores, categories, record, embedder;
  std::optional<std::string> emit_corpus, emit_categories, csv_dir;
  std::optional<double> rate, score_floor, theta_min, theta_max;
  std::optional<std::size_t> n, m, trials, draws, selection_trials, corpus_queries, corpus_docs, corpus_golds;
  std::optional<std::vector<double>> rates;
  bool no_normalize = false;
};

template <class T>
void take(const std::optional<T>& flag, T& target) {
  if (flag) target = *flag;
}

RunConfig resolve(const Overrides& o) {
  RunConfig c;
  if (o.config) c = load_config(*o.config);
  take(o.seed, c.seed);
  take(o.parallelism, c.parallelism);
  take(o.cache_dir, c.cache_dir);
  take(o.out, c.out);
  take(o.corpus, c.corpus);
  take(o.candidates, c.candidates);
  take(o.scores, c.scores);
  take(o.categories, c.categories);
  take(o.record, c.record);
  take(o.embedder, c.embedder);
  take(o.emit_corpus, c.emit_corpus);
  take(o.emit_categories, c.emit_categories);
  take(o.csv_dir, c.csv_dir);
  take(o.rate, c.rate);
  take(o.score_floor, c.score_floor);
  take(o.theta_min, c.theta_min);
  take(o.theta_max, c.theta_max);
  take(o.n, c.n);
  take(o.m, c.m);
  take(o.trials, c.trials);
  take(o.draws, c.draws);
  take(o.selection_trials, c.selection_trials);
  take(o.corpus_queries, c.corpus_queries);
  take(o.corpus_docs, c.corpus_docs);
  take(o.corpus_golds, c.corpus_golds);
  take(o.rates, c.rates);
  if (o.no_normalize) c.normalize = false;
  if (c.parallelism < 1) throw ConfigError("parallelism must be >= 1");
  return c;
}

void add_global(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config, "JSON run config; flags override its keys");
  app.add_option("--seed", o.seed, "Seed for every random draw");
  app.add_option("--parallelism", o.parallelism, "Maximum concurrent workers (>= 1)");
  app.add_option("--cache-dir", o.cache_dir, "Embedding cache directory");
  app.add_option("--out", o.out, "Output path (directory for prompts)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"crest: credibility estimation for retrieved documents", "crest"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  Overrides o;

  auto* score = app.add_subcommand("score", "Embed a corpus and write credibility scores (JSONL)");
  add_global(*score, o);
  score->add_option("--corpus", o.corpus, "Corpus JSONL");
  score->add_flag("--no-normalize", o.no_normalize, "Skip L2 normalization of embeddings");

  auto* prompts = app.add_subcommand("prompts", "Write one credibility-annotated prompt file per embedder");
  add_global(*prompts, o);
  prompts->add_option("--corpus", o.corpus, "Corpus JSONL");
  prompts->add_option("--scores", o.scores, "Scores JSONL from `score`");

  auto* mask = app.add_subcommand("mask", "Write attention scale masks (JSONL)");
  add_global(*mask, o);
  mask->add_option("--corpus", o.corpus, "Corpus JSONL");
  mask->add_option("--scores", o.scores, "Scores JSONL from `score`");
  mask->add_option("--score-floor", o.score_floor, "Lower bound applied to scores before scaling");

  auto* select = app.add_subcommand("select", "Pick the most popular candidate answer per query");
  add_global(*select, o);
  select->add_option("--candidates", o.candidates, "Candidates JSONL");
  select->add_option("--embedder", o.embedder, "Provider to embed candidates with (default: first)");
  select->add_flag("--no-normalize", o.no_normalize, "Skip L2 normalization of embeddings");

  auto* corrupt = app.add_subcommand("corrupt", "Swap gold answer keywords for same-category words");
  add_global(*corrupt, o);
  corrupt->add_option("--corpus", o.corpus, "Corpus JSONL");
  corrupt->add_option("--rate", o.rate, "Fraction of eligible documents to corrupt per query")
      ->check(CLI::Range(0.0, 1.0));
  corrupt->add_option("--categories", o.categories, "Category map JSON {keyword: [alternatives]}");
  corrupt->add_option("--record", o.record, "Corruption record output (default: <out>.record.json)");

  auto* simulate = app.add_subcommand("simulate", "Validate the estimator against the synthetic oracle");
  add_global(*simulate, o);
  simulate->add_option("--n", o.n, "Documents per synthetic world");
  simulate->add_option("--m", o.m, "Embedding dimension");
  simulate->add_option("--trials", o.trials, "Number of independent worlds (seeds)");
  simulate->add_option("--theta-min", o.theta_min, "Lower end of the log-uniform theta range");
  simulate->add_option("--theta-max", o.theta_max, "Upper end of the log-uniform theta range");
  simulate->add_option("--draws", o.draws, "Draws for the additivity check (0 to skip)");
  simulate->add_option("--selection-trials", o.selection_trials, "Answer-selection trials (0 to skip)");
  simulate->add_option("--emit-corpus", o.emit_corpus, "Also write a synthetic corpus JSONL here");
  simulate->add_option("--emit-categories", o.emit_categories, "Also write the demo category map here");
  simulate->add_option("--corpus-queries", o.corpus_queries, "Queries in the emitted corpus");
  simulate->add_option("--corpus-docs", o.corpus_docs, "Documents per query in the emitted corpus");
  simulate->add_option("--corpus-golds", o.corpus_golds, "Gold documents per query in the emitted corpus");

  auto* report = app.add_subcommand("report", "Evaluate scores against gold labels; optional noise sweep");
  add_global(*report, o);
  report->add_option("--corpus", o.corpus, "Labeled corpus JSONL");
  report->add_option("--scores", o.scores, "Scores JSONL from `score`");
  report->add_option("--rates", o.rates, "Noise rates for the corruption sweep")->delimiter(',');
  report->add_option("--categories", o.categories, "Category map JSON for the sweep");
  report->add_option("--csv-dir", o.csv_dir, "Directory for per-curve CSV files");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    const RunConfig config = resolve(o);
    if (score->parsed()) return cmd_score(config, out);
    if (prompts->parsed()) return cmd_prompts(config, out);
    if (mask->parsed()) return cmd_mask(config, out);
    if (select->parsed()) return cmd_select(config, out);
    if (corrupt->parsed()) return cmd_corrupt(config, out);
    if (simulate->parsed()) return cmd_simulate(config, out);
    if (report->parsed()) return cmd_report(config, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ProviderError& e) {
    err << "provider error: " << e.what() << "\n";
    return kProviderError;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const FormatError& e) {
    err << "input error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace crest::cli
