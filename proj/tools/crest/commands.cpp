#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>
#include <ostream>
#include <unordered_map>

#include "cli.hpp"
#include "crest/cache.hpp"
#include "crest/corpus.hpp"
#include "crest/embed.hpp"
#include "crest/error.hpp"
#include "crest/harness/metrics.hpp"
#include "crest/harness/noise.hpp"
#include "crest/harness/oracle.hpp"
#include "crest/harness/sweep.hpp"
#include "crest/harness/synthetic.hpp"
#include "crest/harness/trials.hpp"
#include "crest/harness/world.hpp"
#include "crest/integrate.hpp"
#include "crest/wscore.hpp"

namespace crest::cli {

namespace fs = std::filesystem;

namespace {

const std::string& require(const std::string& value, std::string_view name) {
  if (value.empty()) throw ConfigError(std::string(name) + " path not set");
  return value;
}

std::string output_path(const RunConfig& c, const std::string& fallback, std::string_view name) {
  if (!c.out.empty()) return c.out;
  if (!fallback.empty()) return fallback;
  throw ConfigError(std::string(name) + " output path not set (use --out)");
}

void check_distinct(const std::string& output, std::initializer_list<std::string> inputs) {
  for (const auto& in : inputs) {
    if (in.empty()) continue;
    std::error_code ec;
    if (in == output || (fs::exists(in, ec) && fs::exists(output, ec) && fs::equivalent(in, output, ec))) {
      throw ConfigError("output path " + output + " conflicts with input " + in);
    }
  }
}

wscore::TripletOptions triplet_options(const RunConfig& c) {
  wscore::TripletOptions t;
  t.epsilon.relative = c.epsilon_relative;
  t.epsilon.absolute_floor = c.epsilon_absolute;
  t.seed = c.seed;
  return t;
}

struct EmbedContext {
  std::unique_ptr<embed::EmbeddingCache> cache;
  embed::EmbedOptions options;
};

EmbedContext embed_context(const RunConfig& c) {
  EmbedContext ctx;
  if (!c.cache_dir.empty()) ctx.cache = std::make_unique<embed::EmbeddingCache>(c.cache_dir);
  ctx.options.normalize = c.normalize;
  ctx.options.parallelism = c.parallelism;
  ctx.options.cache = ctx.cache.get();
  return ctx;
}

void require_providers(const RunConfig& c) {
  if (c.providers.empty()) throw ConfigError("at least one provider is required");
}

template <class T>
std::unordered_map<std::string, const T*> index_by_query(const std::vector<T>& rows) {
  std::unordered_map<std::string, const T*> out;
  for (const auto& r : rows) out.emplace(r.query_id, &r);
  return out;
}

void write_json_file(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

}  // namespace

int cmd_score(const RunConfig& c, std::ostream& out) {
  require_providers(c);
  const std::string& corpus_path = require(c.corpus, "corpus");
  const std::string out_path = output_path(c, c.scores, "scores");
  check_distinct(out_path, {corpus_path});
  const auto corpus = corpus::load_corpus(corpus_path);
  auto ctx = embed_context(c);

  std::vector<std::string> texts;
  for (const auto& rec : corpus) {
    for (const auto& d : rec.documents) texts.push_back(d.text);
  }
  std::vector<std::vector<embed::EmbeddingSet>> sets(corpus.size());
  std::size_t calls = 0;
  for (const auto& spec : c.providers) {
    auto provider = embed::make_provider(spec);
    auto vectors = texts.empty() ? std::vector<std::vector<double>>{}
                                 : embed::embed_texts(*provider, spec, texts, ctx.options);
    calls += provider->calls();
    std::size_t k = 0;
    for (std::size_t q = 0; q < corpus.size(); ++q) {
      embed::EmbeddingSet set(spec.embedder_id);
      for (const auto& d : corpus[q].documents) set.add(d.doc_id, std::move(vectors[k++]));
      sets[q].push_back(std::move(set));
    }
  }
  const auto tables = harness::score_corpus(corpus, sets, triplet_options(c), c.parallelism);
  save_table(out_path, tables, make_header("score", c));

  std::size_t clamped = 0;
  std::size_t cells = 0;
  for (const auto& t : tables) {
    for (const auto& e : t.per_embedder) {
      clamped += static_cast<std::size_t>(std::count(e.clamped.begin(), e.clamped.end(), true));
      cells += e.clamped.size();
    }
  }
  const double clamp_rate = cells ? static_cast<double>(clamped) / static_cast<double>(cells) : 0.0;
  out << "score: queries=" << corpus.size() << " documents=" << texts.size() << " embedders=" << c.providers.size()
      << " clamp_rate=" << json(clamp_rate).dump() << " provider_calls=" << calls << " out=" << out_path << "\n";
  return kOk;
}

int cmd_prompts(const RunConfig& c, std::ostream& out) {
  const std::string& corpus_path = require(c.corpus, "corpus");
  const std::string& scores_path = require(c.scores, "scores");
  const fs::path dir = output_path(c, c.prompts, "prompts");
  const auto corpus = corpus::load_corpus(corpus_path);
  const auto tables = load_table<wscore::CredibilityTable>(scores_path);
  const auto records = index_by_query(corpus);

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::map<std::string, std::vector<integrate::AnnotatedPrompt>> by_embedder;
  std::vector<std::string> embedder_order;
  for (const auto& t : tables) {
    auto it = records.find(t.query_id);
    if (it == records.end()) throw FormatError("scores reference unknown query " + t.query_id);
    for (auto& p : integrate::prompt_variants(*it->second, t)) {
      if (!by_embedder.count(p.embedder_id)) embedder_order.push_back(p.embedder_id);
      by_embedder[p.embedder_id].push_back(std::move(p));
    }
  }
  const auto header = make_header("prompts", c);
  for (const auto& id : embedder_order) {
    const fs::path file = dir / ("prompts." + id + ".jsonl");
    save_table(file, by_embedder[id], header);
    out << "prompts: embedder=" << id << " prompts=" << by_embedder[id].size() << " out=" << file.string() << "\n";
  }
  return kOk;
}

int cmd_mask(const RunConfig& c, std::ostream& out) {
  const std::string& corpus_path = require(c.corpus, "corpus");
  const std::string& scores_path = require(c.scores, "scores");
  const std::string out_path = output_path(c, c.masks, "masks");
  check_distinct(out_path, {corpus_path, scores_path});
  const auto corpus = corpus::load_corpus(corpus_path);
  const auto tables = load_table<wscore::CredibilityTable>(scores_path);
  const auto records = index_by_query(corpus);
  std::vector<integrate::MaskSpec> masks;
  double worst = 0.0;
  for (const auto& t : tables) {
    auto it = records.find(t.query_id);
    if (it == records.end()) throw FormatError("scores reference unknown query " + t.query_id);
    masks.push_back(integrate::build_mask(*it->second, t, c.score_floor));
    worst = std::max(worst, std::abs(masks.back().conservation_residual));
  }
  save_table(out_path, masks, make_header("mask", c));
  out << "mask: queries=" << masks.size() << " max_residual=" << json(worst).dump() << " out=" << out_path << "\n";
  return kOk;
}

int cmd_select(const RunConfig& c, std::ostream& out) {
  require_providers(c);
  const std::string& cand_path = require(c.candidates, "candidates");
  const std::string out_path = output_path(c, c.selection, "selection");
  check_distinct(out_path, {cand_path});
  const embed::ProviderSpec* spec = &c.providers.front();
  if (!c.embedder.empty()) {
    auto it = std::find_if(c.providers.begin(), c.providers.end(),
                           [&](const embed::ProviderSpec& p) { return p.embedder_id == c.embedder; });
    if (it == c.providers.end()) throw ConfigError("no provider named " + c.embedder);
    spec = &*it;
  }
  const auto sets = corpus::load_candidates(cand_path);
  auto ctx = embed_context(c);
  auto provider = embed::make_provider(*spec);
  std::vector<std::string> texts;
  for (const auto& s : sets) {
    for (const auto& cand : s.candidates) texts.push_back(cand.text);
  }
  auto vectors = texts.empty() ? std::vector<std::vector<double>>{}
                               : embed::embed_texts(*provider, *spec, texts, ctx.options);
  std::vector<integrate::SelectionResult> results;
  std::size_t k = 0;
  for (const auto& s : sets) {
    embed::EmbeddingSet e(spec->embedder_id);
    for (const auto& cand : s.candidates) e.add(cand.candidate_id, std::move(vectors[k++]));
    results.push_back(integrate::select_output(s, e, triplet_options(c)));
  }
  save_table(out_path, results, make_header("select", c));
  out << "select: queries=" << results.size() << " embedder=" << spec->embedder_id << " out=" << out_path << "\n";
  return kOk;
}

int cmd_corrupt(const RunConfig& c, std::ostream& out) {
  const std::string& corpus_path = require(c.corpus, "corpus");
  const std::string& cat_path = require(c.categories, "categories");
  if (!(c.rate >= 0.0 && c.rate <= 1.0)) throw ConfigError("rate must be in [0, 1]");
  if (c.out.empty()) throw ConfigError("corrupt output path not set (use --out)");
  const std::string record_path = c.record.empty() ? c.out + ".record.json" : c.record;
  check_distinct(c.out, {corpus_path, cat_path});
  check_distinct(record_path, {corpus_path, cat_path, c.out});

  const std::string contents = read_file(corpus_path);
  const auto corpus = corpus::parse_corpus(contents, corpus_path);
  const auto categories = harness::load_category_map(cat_path);
  const auto result = harness::corrupt(corpus, c.rate, categories, c.seed);

  // Untouched records keep their original bytes, so rate 0 reproduces the
  // input exactly.
  std::string output;
  std::size_t pos = 0;
  std::size_t record_index = 0;
  bool first_value = true;
  while (pos <= contents.size()) {
    std::size_t end = contents.find('\n', pos);
    const bool last = end == std::string::npos;
    if (last) end = contents.size();
    const std::string_view line(contents.data() + pos, end - pos);
    std::string_view replaced = line;
    std::string fresh;
    if (!split_whitespace(line).empty()) {
      const bool header = first_value && is_header_line(json::parse(line));
      first_value = false;
      if (!header) {
        if (result.modified[record_index]) {
          fresh = dump_line(corpus::to_json(result.corpus[record_index]));
          replaced = fresh;
        }
        ++record_index;
      }
    }
    output.append(replaced);
    if (last) break;
    output.push_back('\n');
    pos = end + 1;
  }
  write_file_atomic(c.out, output);

  json rec = json::object();
  rec["header"] = make_header("corrupt", c);
  json body;
  harness::to_json(body, result.record);
  for (auto& [k, v] : body.items()) rec[k] = v;
  write_json_file(record_path, rec);
  out << "corrupt: rate=" << json(c.rate).dump() << " swaps=" << result.record.swaps.size()
      << " skipped=" << result.record.skipped.size() << " out=" << c.out << " record=" << record_path << "\n";
  return kOk;
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
  const std::string out_path = output_path(c, c.report, "report");
  if (c.n < 3) throw ConfigError("simulate: n must be >= 3");
  if (c.m < 1) throw ConfigError("simulate: m must be >= 1");
  if (!(c.theta_min > 0.0) || c.theta_max < c.theta_min) throw ConfigError("simulate: need 0 < theta_min <= theta_max");

  json report;
  report["header"] = make_header("simulate", c);
  const auto oracle = harness::oracle_consistency(c.n, c.m, c.trials, c.theta_min, c.theta_max, c.seed);
  report["spearman_vs_oracle"] = oracle.mean;
  report["oracle"] = harness::to_json(oracle);
  if (c.draws >= 2) {
    Rng rng(derive_seed(c.seed, "additivity"));
    const auto theta = harness::log_uniform_theta(c.n, c.theta_min, c.theta_max, rng);
    report["additivity"] = harness::to_json(harness::additivity_check(theta, c.m, c.draws, c.seed));
  }
  if (c.selection_trials > 0) {
    const auto hist = harness::selection_trials(c.selection_trials, harness::ClusterSpec{}, c.seed);
    report["rank_histogram"] = harness::to_json(hist);
  }
  if (!c.emit_corpus.empty()) {
    harness::SyntheticCorpusSpec spec;
    spec.queries = c.corpus_queries;
    spec.docs_per_query = c.corpus_docs;
    spec.golds_per_query = c.corpus_golds;
    corpus::save_corpus(c.emit_corpus, harness::make_synthetic_corpus(spec, c.seed));
  }
  if (!c.emit_categories.empty()) write_json_file(c.emit_categories, harness::to_json(harness::demo_categories()));
  write_json_file(out_path, report);
  out << "simulate: n=" << c.n << " m=" << c.m << " trials=" << c.trials
      << " spearman_vs_oracle=" << json(oracle.mean).dump() << " out=" << out_path << "\n";
  return kOk;
}

int cmd_report(const RunConfig& c, std::ostream& out) {
  const std::string& corpus_path = require(c.corpus, "corpus");
  const std::string& scores_path = require(c.scores, "scores");
  const std::string out_path = output_path(c, c.report, "report");
  check_distinct(out_path, {corpus_path, scores_path});
  const auto corpus = corpus::load_corpus(corpus_path);
  auto tables = load_table<wscore::CredibilityTable>(scores_path);
  std::sort(tables.begin(), tables.end(),
            [](const auto& a, const auto& b) { return a.query_id < b.query_id; });
  const auto eval = harness::evaluate(tables, corpus);

  json report;
  report["header"] = make_header("report", c);
  const json body = harness::to_json(eval);
  for (const auto& [k, v] : body.items()) report[k] = v;

  if (!c.rates.empty()) {
    require_providers(c);
    const auto categories = harness::load_category_map(require(c.categories, "categories"));
    auto rates = c.rates;
    std::sort(rates.begin(), rates.end());
    auto ctx = embed_context(c);
    const auto sweep = harness::noise_sweep(corpus, rates, categories, c.providers, c.seed, ctx.options,
                                            triplet_options(c));
    report["noise_scope"] = "per-query";
    report["noise"] = harness::to_json(sweep);
    if (!c.csv_dir.empty()) {
      std::error_code ec;
      fs::create_directories(c.csv_dir, ec);
      if (ec) throw IoError("cannot create " + c.csv_dir + ": " + ec.message());
      write_file_atomic(fs::path(c.csv_dir) / "noise_curves.csv", harness::sweep_csv(sweep));
    }
  }
  if (!c.csv_dir.empty()) {
    std::error_code ec;
    fs::create_directories(c.csv_dir, ec);
    if (ec) throw IoError("cannot create " + c.csv_dir + ": " + ec.message());
    std::string csv = "class,score,cumulative\n";
    for (const auto& p : eval.cdf_gold) csv += "gold," + json(p.score).dump() + "," + json(p.cumulative).dump() + "\n";
    for (const auto& p : eval.cdf_distractor) {
      csv += "distractor," + json(p.score).dump() + "," + json(p.cumulative).dump() + "\n";
    }
    write_file_atomic(fs::path(c.csv_dir) / "score_cdf.csv", csv);
  }
  write_json_file(out_path, report);
  out << "report: queries=" << tables.size() << " auc="
      << (eval.auc_gold_vs_distractor ? json(*eval.auc_gold_vs_distractor).dump() : std::string("null"))
      << " out=" << out_path << "\n";
  return kOk;
}

}  // namespace crest::cli
