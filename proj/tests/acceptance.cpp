// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "crest/harness/metrics.hpp"
#include "crest/harness/oracle.hpp"
#include "crest/harness/sweep.hpp"
#include "crest/harness/synthetic.hpp"
#include "crest/harness/trials.hpp"
#include "crest/integrate.hpp"
#include "crest/rng.hpp"
#include "crest/util.hpp"
#include "crest/wscore.hpp"

using namespace crest;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::vector<embed::ProviderSpec> builtin_providers(std::size_t count) {
  std::vector<embed::ProviderSpec> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i].embedder_id = "builtin" + std::to_string(i);
    out[i].endpoint = std::string(embed::kBuiltinEndpoint);
    out[i].seed = i;
  }
  return out;
}

Outcome triplet_exactness() {
  const std::vector<std::vector<std::vector<double>>> configs{
      {{0, 0}, {2, 0}, {0, 2}},
      {{0, 0}, {0, 0}, {10, 0}},
      {{0, 0}, {1, 0}, {-1, 0}},
  };
  double worst = 0.0;
  for (const auto& v : configs) {
    const auto d = wscore::pairwise_sq_distances(v);
    const auto e = wscore::triplet_estimate(d);
    for (std::size_t i = 0; i < 3; ++i) {
      const std::size_t j = (i + 1) % 3;
      const std::size_t k = (i + 2) % 3;
      const double closed = 0.5 * (d(i, j) + d(i, k) - d(j, k));
      const double expect = std::max(closed, e.epsilon);
      worst = std::max(worst, std::abs(e.e_hat[i] - expect));
      if (e.clamped[i] != (closed < e.epsilon)) worst = INFINITY;
    }
  }
  return {worst <= 1e-9, "max_abs_err=" + fmt(worst) + " tol=1e-9"};
}

Outcome additivity() {
  const auto a = harness::additivity_check({0.5, 5.0, 50.0}, 16, 10000, 2024);
  double worst = 0.0;
  for (const auto& p : a.pairs) worst = std::max(worst, std::abs(p.z));
  return {worst <= 5.0, "pairs=" + std::to_string(a.pairs.size()) + " draws=10000 max_|z|=" + fmt(worst) + " tol=5"};
}

Outcome oracle_rank() {
  const auto o = harness::oracle_consistency(10, 32, 100, 0.5, 50.0, 7);
  return {o.mean >= 0.8, "mean_spearman=" + fmt(o.mean) + " min=" + fmt(o.min) + " threshold=0.8 seeds=100"};
}

Outcome scale_invariance() {
  // Unnormalized Gaussian embeddings so the rescaling reaches the scorer.
  Rng rng(99);
  double worst = 0.0;
  bool chosen_stable = true;
  const std::size_t queries = 20;
  for (std::size_t q = 0; q < queries; ++q) {
    const std::size_t n = 3 + rng.index(12);
    corpus::QueryRecord rec;
    rec.query_id = "q" + std::to_string(q);
    corpus::CandidateSet cands;
    cands.query_id = rec.query_id;
    for (std::size_t i = 0; i < n; ++i) {
      rec.documents.push_back(corpus::make_document("d" + std::to_string(i), "x"));
      cands.candidates.push_back({"d" + std::to_string(i), "x"});
    }
    std::vector<embed::EmbeddingSet> sets;
    for (std::size_t e = 0; e < 3; ++e) {
      embed::EmbeddingSet set("g" + std::to_string(e));
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v(16);
        for (auto& x : v) x = rng.normal();
        set.add("d" + std::to_string(i), std::move(v));
      }
      sets.push_back(std::move(set));
    }
    const auto base = wscore::score_query(rec, sets);
    const auto base_choice = integrate::select_output(cands, sets[0]).chosen_index;
    for (double c : {1e-3, 1.0, 1e3}) {
      std::vector<embed::EmbeddingSet> scaled;
      for (const auto& s : sets) scaled.push_back(s.scaled(c));
      const auto t = wscore::score_query(rec, scaled);
      for (std::size_t i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(t.aggregated[i] - base.aggregated[i]));
        for (std::size_t e = 0; e < sets.size(); ++e) {
          worst = std::max(worst, std::abs(t.per_embedder[e].standardized[i] - base.per_embedder[e].standardized[i]));
        }
      }
      if (integrate::select_output(cands, scaled[0]).chosen_index != base_choice) chosen_stable = false;
    }
  }
  return {worst <= 1e-9 && chosen_stable, "queries=20 c={1e-3,1,1e3} max_abs_diff=" + fmt(worst) +
                                              " tol=1e-9 chosen_stable=" + (chosen_stable ? "yes" : "no")};
}

Outcome mask_conservation() {
  Rng rng(5);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng.index(50);
    std::vector<double> s(n);
    std::vector<std::size_t> tok(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform();
      s[i] = u < 0.1 ? 0.0 : (u < 0.2 ? 1.0 : rng.uniform());
      tok[i] = 1 + rng.index(2000);
    }
    const auto m = integrate::attention_scales(s, tok);
    double total = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      total += static_cast<double>(tok[i]);
      weighted += m.entries[i].scale * static_cast<double>(tok[i]);
    }
    worst = std::max(worst, std::abs(weighted - total) / total);
  }
  return {worst <= 1e-9, "configs=1000 max_rel_residual=" + fmt(worst) + " tol=1e-9"};
}

Outcome score_separation() {
  harness::SyntheticCorpusSpec spec;
  spec.queries = 200;
  spec.docs_per_query = 5;
  spec.golds_per_query = 1;
  const auto corpus = harness::make_synthetic_corpus(spec, 11);
  const auto providers = builtin_providers(3);
  const auto tables = harness::score_corpus(corpus, harness::embed_corpus(corpus, providers), {}, 4);
  const auto eval = harness::evaluate(tables, corpus);
  const double a = eval.auc_gold_vs_distractor.value_or(0.0);
  return {a >= 0.7, "queries=200 docs=5 embedders=3 auc=" + fmt(a) + " threshold=0.7"};
}

Outcome noise_degradation() {
  // With a single gold per query floor(rate * 1) is always zero, so the
  // sweep runs on a variant with five golds and five distractors per query.
  harness::SyntheticCorpusSpec spec;
  spec.queries = 200;
  spec.docs_per_query = 10;
  spec.golds_per_query = 5;
  const auto corpus = harness::make_synthetic_corpus(spec, 13);
  const std::vector<double> rates{0.2, 0.4, 0.6, 0.8};
  embed::EmbedOptions opt;
  const auto sweep = harness::noise_sweep(corpus, rates, harness::demo_categories(), builtin_providers(3), 17, opt);
  bool ok = true;
  std::string seps;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    if (!sweep[i].separation) {
      ok = false;
      seps += " null";
      continue;
    }
    seps += " " + fmt(*sweep[i].separation);
    if (i > 0 && sweep[i - 1].separation && *sweep[i].separation > *sweep[i - 1].separation + 0.02) ok = false;
  }
  const auto& d = sweep.front().distances;
  const bool dist_ok = d.gold && d.all && *d.gold <= *d.all;
  return {ok && dist_ok, "separation@{0.2,0.4,0.6,0.8}=" + seps.substr(1) + " (step tol 0.02) gold_gold@0.2=" +
                             (d.gold ? fmt(*d.gold) : "null") + " all@0.2=" + (d.all ? fmt(*d.all) : "null")};
}

Outcome selection() {
  const auto h = harness::selection_trials(1000, harness::ClusterSpec{}, 21);
  const double r1 = h.frequency(1);
  const double r12 = h.cumulative(2);
  return {r1 >= 0.95 && r12 >= 0.99,
          "trials=1000 rank1=" + fmt(r1) + " (>=0.95) rank1-2=" + fmt(r12) + " (>=0.99)"};
}

Outcome determinism() {
  const fs::path dir = fs::path(CREST_TEST_TMP) / "acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  harness::SyntheticCorpusSpec spec;
  spec.queries = 50;
  corpus::save_corpus(dir / "corpus.jsonl", harness::make_synthetic_corpus(spec, 3));
  json config;
  config["providers"] = json::array();
  for (const auto& p : builtin_providers(3)) config["providers"].push_back(cli::to_json(p));
  config["corpus"] = (dir / "corpus.jsonl").string();
  config["scores"] = (dir / "scores.jsonl").string();
  config["seed"] = 5;
  write_file_atomic(dir / "config.json", config.dump());
  std::ostringstream out;
  std::ostringstream err;
  const std::vector<std::string> args{"score", "--config", (dir / "config.json").string()};
  if (cli::run(args, out, err) != 0) return {false, "first run failed: " + err.str()};
  const std::string first = read_file(dir / "scores.jsonl");
  if (cli::run(args, out, err) != 0) return {false, "second run failed: " + err.str()};
  const std::string second = read_file(dir / "scores.jsonl");
  return {first == second && !first.empty(), "bytes=" + std::to_string(first.size()) +
                                                 (first == second ? " identical" : " differ")};
}

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;  // 0 when unbounded
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "triplet exactness", 1.0, triplet_exactness},
      {2, "distance additivity", 10.0, additivity},
      {3, "oracle rank consistency", 30.0, oracle_rank},
      {4, "scale invariance", 0.0, scale_invariance},
      {5, "mask conservation", 0.0, mask_conservation},
      {6, "gold vs distractor AUC", 60.0, score_separation},
      {7, "noise degradation", 0.0, noise_degradation},
      {8, "popularity selection", 0.0, selection},
      {9, "score determinism", 0.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = o.pass;
    std::string timing = fmt(secs) + "s";
    if (c.time_limit_s > 0.0) {
      timing += " (limit " + fmt(c.time_limit_s) + "s)";
      if (secs >= c.time_limit_s) pass = false;
    }
    if (!pass) ++failures;
    std::printf("%s %d %s: %s [%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), timing.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
