#include <algorithm>
#include <cmath>
#include <numeric>

#include "crest/error.hpp"
#include "crest/integrate.hpp"
#include "crest/rng.hpp"
#include "doctest.h"

using namespace crest;
using namespace crest::integrate;
using L = Level;

namespace {

corpus::QueryRecord record(std::size_t n) {
  corpus::QueryRecord r;
  r.query_id = "q";
  r.query = "what is it?";
  for (std::size_t i = 0; i < n; ++i) {
    r.documents.push_back(corpus::make_document("d" + std::to_string(i), "text of doc " + std::to_string(i)));
  }
  return r;
}

corpus::CandidateSet candidates(const std::vector<std::string>& texts) {
  corpus::CandidateSet s;
  s.query_id = "q";
  for (std::size_t i = 0; i < texts.size(); ++i) s.candidates.push_back({"c" + std::to_string(i), texts[i]});
  return s;
}

embed::EmbeddingSet embed_candidates(const corpus::CandidateSet& s, std::uint64_t seed = 0) {
  embed::EmbeddingSet e("b");
  for (const auto& c : s.candidates) e.add(c.candidate_id, embed::builtin_test_embed(c.text, 64, seed));
  return e;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("bucket levels") {
  CHECK(bucket_levels(std::vector<double>{0.9, 0.5, 0.1}) == std::vector<L>{L::high, L::medium, L::low});
  CHECK(bucket_levels(std::vector<double>{0.5}) == std::vector<L>{L::high});
  CHECK(bucket_levels(std::vector<double>{0.5, 0.5, 0.5}) == std::vector<L>{L::high, L::medium, L::low});
  CHECK(bucket_levels(std::vector<double>{0.2, 0.8}) == std::vector<L>{L::low, L::high});
  CHECK(bucket_levels(std::vector<double>{}).empty());
  // n = 4: two high, two low, no medium.
  CHECK(bucket_levels(std::vector<double>{0.1, 0.4, 0.9, 0.6}) == std::vector<L>{L::low, L::low, L::high, L::high});
  CHECK(bucket_levels(std::vector<double>{0.1, 0.4, 0.9, 0.6, 0.5}) ==
        std::vector<L>{L::low, L::low, L::high, L::high, L::medium});
}

TEST_CASE("bucket sizes follow the tercile rule") {
  Rng rng(1);
  for (std::size_t n = 1; n <= 30; ++n) {
    std::vector<double> s(n);
    for (auto& x : s) x = std::floor(rng.uniform() * 4.0) / 4.0;
    const auto levels = bucket_levels(s);
    const std::size_t third = (n + 2) / 3;
    const std::size_t high = std::count(levels.begin(), levels.end(), L::high);
    const std::size_t low = std::count(levels.begin(), levels.end(), L::low);
    CHECK(high == third);
    CHECK(low == std::min(third, n - third));
    // Higher score never lands in a lower bucket.
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (s[i] > s[j]) CHECK(static_cast<int>(levels[i]) >= static_cast<int>(levels[j]));
      }
    }
  }
}

TEST_CASE("level names") {
  for (auto l : {L::low, L::medium, L::high}) CHECK(level_from_string(to_string(l)) == l);
  CHECK_THROWS(level_from_string("extreme"));
}

TEST_CASE("prompt template is exact") {
  auto r = record(2);
  r.documents[0].text = "Paris is the capital.";
  r.documents[1].text = "Lyon is big.";
  r.query = "capital of France?";
  const auto p = annotate_prompt(r, {L::high, L::low}, "e1");
  CHECK(p.text ==
        "Answer the question using the documents below. Each document is tagged with an estimated credibility "
        "level.\n"
        "[doc d0 | credibility: high]\nParis is the capital.\n"
        "[doc d1 | credibility: low]\nLyon is big.\n"
        "Question: capital of France?\nAnswer:");
  CHECK(p.embedder_id == "e1");
  CHECK(p.text.find("credibility: high]\nParis") != std::string::npos);
  CHECK(annotate_prompt(r, {L::high, L::low}, "e1") == p);
  CHECK_THROWS(annotate_prompt(r, {L::high}));
}

TEST_CASE("every document tagged once, in order") {
  const auto r = record(3);
  const auto p = annotate_prompt(r, {L::medium, L::high, L::low});
  CHECK(count(p.text, "credibility: ") == 3);
  const auto a = p.text.find("[doc d0 | credibility: medium]");
  const auto b = p.text.find("[doc d1 | credibility: high]");
  const auto c = p.text.find("[doc d2 | credibility: low]");
  CHECK(a < b);
  CHECK(b < c);
  CHECK(c != std::string::npos);
}

TEST_CASE("prompt variants use each embedder's own scores") {
  const auto r = record(3);
  wscore::CredibilityTable t;
  t.query_id = "q";
  t.doc_ids = {"d0", "d1", "d2"};
  t.per_embedder = {{"a", {1, 2, 3}, {0.0, 0.5, 1.0}, {false, false, false}, 1e-9},
                    {"b", {3, 2, 1}, {1.0, 0.5, 0.0}, {false, false, false}, 1e-9}};
  t.aggregated = {0.5, 0.5, 0.5};
  const auto v = prompt_variants(r, t);
  REQUIRE(v.size() == 2);
  CHECK(v[0].levels == std::vector<L>{L::low, L::medium, L::high});
  CHECK(v[1].levels == std::vector<L>{L::high, L::medium, L::low});
  t.doc_ids = {"d0", "d2", "d1"};
  CHECK_THROWS(prompt_variants(r, t));
}

TEST_CASE("attention scale examples") {
  SUBCASE("uniform") {
    const auto m = attention_scales(std::vector<double>{0.5, 0.5}, std::vector<std::size_t>{10, 10});
    CHECK(m.C == doctest::Approx(2.0));
    CHECK(m.entries[0].scale == doctest::Approx(1.0));
    CHECK(m.entries[1].scale == doctest::Approx(1.0));
  }
  SUBCASE("floored zero") {
    const auto m = attention_scales(std::vector<double>{1.0, 0.0}, std::vector<std::size_t>{5, 5});
    CHECK(m.C == doctest::Approx(10.0 / 5.05).epsilon(1e-12));
    CHECK(m.entries[0].scale == doctest::Approx(10.0 / 5.05).epsilon(1e-12));
    CHECK(m.entries[1].scale == doctest::Approx(0.1 / 5.05).epsilon(1e-12));
    CHECK(5 * m.entries[0].scale + 5 * m.entries[1].scale == doctest::Approx(10.0).epsilon(1e-12));
  }
  SUBCASE("single document") {
    for (double s : {0.0, 0.3, 1.0}) {
      const auto m = attention_scales(std::vector<double>{s}, std::vector<std::size_t>{7});
      CHECK(m.entries[0].scale == 1.0);
    }
  }
}

TEST_CASE("mask conservation and monotonicity on random inputs") {
  Rng rng(11);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + rng.index(20);
    std::vector<double> s(n);
    std::vector<std::size_t> tok(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
      tok[i] = 1 + rng.index(400);
    }
    const auto m = attention_scales(s, tok);
    double total = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      total += static_cast<double>(tok[i]);
      weighted += m.entries[i].scale * static_cast<double>(tok[i]);
      CHECK(m.entries[i].scale > 0.0);
    }
    CHECK(std::abs(weighted - total) / total <= 1e-9);
    CHECK(std::abs(m.conservation_residual) <= 1e-9);
    const auto flat = attention_scales(s, std::vector<std::size_t>(n, 3));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (s[i] > s[j] && s[i] > kDefaultScoreFloor) CHECK(flat.entries[i].scale > flat.entries[j].scale);
      }
    }
  }
}

TEST_CASE("attention scale input checks") {
  CHECK_THROWS(attention_scales(std::vector<double>{0.5}, std::vector<std::size_t>{0}));
  CHECK_THROWS(attention_scales(std::vector<double>{0.5, 0.5}, std::vector<std::size_t>{1}));
  CHECK_THROWS(attention_scales(std::vector<double>{}, std::vector<std::size_t>{}));
}

TEST_CASE("build_mask reads token counts from the record") {
  const auto r = record(2);
  wscore::CredibilityTable t;
  t.query_id = "q";
  t.doc_ids = {"d0", "d1"};
  t.aggregated = {0.5, 0.5};
  const auto m = build_mask(r, t);
  CHECK(m.query_id == "q");
  CHECK(m.entries[0].doc_id == "d0");
  CHECK(m.entries[0].token_count == 4);
  CHECK(m.entries[0].scale == doctest::Approx(1.0));
  const json j = m;
  CHECK(j.get<MaskSpec>() == m);
}

TEST_CASE("descending ranks") {
  CHECK(descending_ranks(std::vector<double>{0.1, 0.9, 0.5}) == std::vector<std::size_t>{3, 1, 2});
  CHECK(descending_ranks(std::vector<double>{2, 2, 1}) == std::vector<std::size_t>{1, 2, 3});
}

TEST_CASE("selection examples") {
  SUBCASE("single candidate") {
    const auto s = candidates({"only one"});
    const auto r = select_output(s, embed_candidates(s));
    CHECK(r.chosen_index == 0);
    CHECK(r.chosen_candidate_id == "c0");
    CHECK(r.ranks == std::vector<std::size_t>{1});
  }
  SUBCASE("two candidates pick the first") {
    const auto s = candidates({"a b", "c d"});
    CHECK(select_output(s, embed_candidates(s)).chosen_index == 0);
  }
  SUBCASE("identical majority") {
    const auto s = candidates({"zebra crossing now", "paris is capital", "paris is capital", "paris is capital"});
    const auto r = select_output(s, embed_candidates(s));
    CHECK(r.chosen_index == 1);
    CHECK(r.ranks[0] == 4);
  }
  SUBCASE("mirror symmetry ties to the lower index") {
    corpus::CandidateSet s = candidates({"a", "b", "c", "d"});
    embed::EmbeddingSet e("m");
    e.add("c0", {0, 0});
    e.add("c1", {1, 0.5});
    e.add("c2", {1, -0.5});
    e.add("c3", {3, 0});
    const auto r = select_output(s, e);
    CHECK(r.popularity[1] == r.popularity[2]);
    CHECK(r.ranks[1] < r.ranks[2]);
  }
  SUBCASE("missing embedding") {
    const auto s = candidates({"a", "b", "c"});
    embed::EmbeddingSet e("m");
    e.add("c0", {0, 0});
    CHECK_THROWS_AS(select_output(s, e), FormatError);
  }
}

TEST_CASE("popularity is the document credibility computation") {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    std::vector<std::string> texts;
    for (int i = 0; i < 6; ++i) texts.push_back("w" + std::to_string(rng.index(4)) + " w" + std::to_string(rng.index(6)));
    const auto s = candidates(texts);
    const auto e = embed_candidates(s, t);
    const auto r = select_output(s, e);
    const auto scores = wscore::score_embedder(e, e.ids());
    CHECK(r.popularity == scores.raw);
    CHECK(r.ranks == descending_ranks(scores.standardized));
    for (double c : {1e-3, 1e3}) CHECK(select_output(s, e.scaled(c)).chosen_index == r.chosen_index);
  }
}

TEST_CASE("selection json") {
  const auto s = candidates({"x y", "x y", "q r"});
  const auto r = select_output(s, embed_candidates(s));
  const json j = r;
  CHECK(j["chosen"] == "c0");
  CHECK(j.get<SelectionResult>() == r);
}
