#include <algorithm>
#include <cmath>
#include <numeric>

#include "crest/error.hpp"
#include "crest/rng.hpp"
#include "crest/wscore.hpp"
#include "doctest.h"

using namespace crest;
using namespace crest::wscore;

namespace {

// Direct evaluation over every unordered pair {j, k}, O(n^3).
std::vector<double> brute_force_e_hat(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        if (j == i || k == i) continue;
        sum += 0.5 * (d(i, j) + d(i, k) - d(j, k));
        ++pairs;
      }
    }
    out[i] = sum / static_cast<double>(pairs);
  }
  return out;
}

std::vector<std::vector<double>> random_vectors(std::size_t n, std::size_t m, std::uint64_t seed, double sd = 1.0) {
  Rng rng(seed);
  std::vector<std::vector<double>> v(n, std::vector<double>(m));
  for (auto& row : v) {
    for (auto& x : row) x = sd * rng.normal();
  }
  return v;
}

embed::EmbeddingSet make_set(const std::string& id, const std::vector<std::vector<double>>& v) {
  embed::EmbeddingSet set(id);
  for (std::size_t i = 0; i < v.size(); ++i) set.add("x" + std::to_string(i), v[i]);
  return set;
}

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("x" + std::to_string(i));
  return out;
}

}  // namespace

TEST_CASE("pairwise distances") {
  CHECK(pairwise_sq_distances({{0, 0}, {2, 0}})(0, 1) == 4.0);
  CHECK(pairwise_sq_distances({{1, 0}, {0, 1}})(1, 0) == 2.0);
  const auto same = pairwise_sq_distances({{3, 1}, {3, 1}, {3, 1}});
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(same(i, j) == 0.0);
  }
  const auto d = pairwise_sq_distances(random_vectors(6, 5, 3));
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(d(i, i) == 0.0);
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(d(i, j) == d(j, i));
      CHECK(d(i, j) >= 0.0);
    }
  }
}

TEST_CASE("pairwise distances by id") {
  const auto set = make_set("e", {{0, 0}, {2, 0}, {0, 2}});
  const auto d = pairwise_sq_distances(set, {"x2", "x0"});
  CHECK(d.size() == 2);
  CHECK(d(0, 1) == 4.0);
  CHECK_THROWS_AS(pairwise_sq_distances(set, {"x0", "nope"}), FormatError);
}

TEST_CASE("long vectors use compensated summation") {
  std::vector<double> a(5000, 0.0);
  std::vector<double> b(5000, 0.0);
  a[0] = 1e8;
  for (std::size_t i = 1; i < a.size(); ++i) a[i] = 1e-4;
  // True value: 1e16 + 4999e-8. Naive summation loses the tail entirely.
  const double d = squared_distance(a, b);
  CHECK(d == doctest::Approx(1e16 + 4999e-8).epsilon(1e-15));
}

TEST_CASE("triplet examples") {
  SUBCASE("right isoceles: symmetric zero clamps") {
    const auto d = pairwise_sq_distances({{0, 0}, {2, 0}, {0, 2}});
    const auto e = triplet_estimate(d);
    CHECK(e.clamped[0]);
    CHECK(e.e_hat[0] == e.epsilon);
    CHECK(e.e_hat[1] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(e.e_hat[2] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK_FALSE(e.clamped[1]);
  }
  SUBCASE("duplicate pair and far point") {
    const auto d = pairwise_sq_distances({{0, 0}, {0, 0}, {10, 0}});
    const auto e = triplet_estimate(d);
    CHECK(e.e_hat[0] == e.epsilon);
    CHECK(e.e_hat[1] == e.epsilon);
    CHECK(std::abs(e.e_hat[2] - 100.0) <= 1e-9);
    const auto raw = credibility_raw(e);
    CHECK(raw[0] == 1.0 / e.epsilon);
    CHECK(std::abs(raw[2] - 0.01) <= 1e-12);
  }
  SUBCASE("collinear: negative estimate clamps") {
    const auto d = pairwise_sq_distances({{0, 0}, {1, 0}, {-1, 0}});
    CHECK(brute_force_e_hat(d)[0] == -1.0);
    const auto e = triplet_estimate(d);
    CHECK(e.clamped[0]);
    CHECK(e.e_hat[0] == e.epsilon);
  }
}

TEST_CASE("triplet estimate matches the brute-force pair mean") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const std::size_t n = 3 + seed % 12;
    const auto d = pairwise_sq_distances(random_vectors(n, 8, seed));
    const auto oracle = brute_force_e_hat(d);
    const auto e = triplet_estimate(d);
    for (std::size_t i = 0; i < n; ++i) {
      const double expect = std::max(oracle[i], e.epsilon);
      CHECK(std::abs(e.e_hat[i] - expect) <= 1e-9 * std::max(1.0, std::abs(expect)));
      CHECK(e.clamped[i] == (oracle[i] < e.epsilon));
    }
  }
}

TEST_CASE("epsilon is relative to the mean distance") {
  const auto d = pairwise_sq_distances({{0, 0}, {2, 0}, {0, 2}});
  // Off-diagonal mean = (4 + 4 + 8) / 3.
  CHECK(clamp_epsilon(d) == doctest::Approx(1e-6 * 16.0 / 3.0));
  CHECK(clamp_epsilon(pairwise_sq_distances({{1, 1}, {1, 1}, {1, 1}})) == 1e-12);
  EpsilonPolicy p;
  p.relative = 0.5;
  CHECK(clamp_epsilon(d, p) == doctest::Approx(8.0 / 3.0));
}

TEST_CASE("degenerate sizes are neutral") {
  for (std::size_t n : {1u, 2u}) {
    const auto d = pairwise_sq_distances(random_vectors(n, 4, n));
    const auto e = triplet_estimate(d);
    CHECK(e.degenerate);
    REQUIRE(e.e_hat.size() == n);
    const auto s = standardize(credibility_raw(e));
    for (double x : s) CHECK(x == 0.5);
  }
  const auto e = triplet_estimate(pairwise_sq_distances({{1, 2}, {1, 2}, {1, 2}, {1, 2}}));
  for (double x : standardize(credibility_raw(e))) CHECK(x == 0.5);
}

TEST_CASE("credibility raw is strictly decreasing in e_hat") {
  TripletEstimate e;
  e.e_hat = {3.0, 1.0, 2.0};
  e.clamped = {false, false, false};
  const auto raw = credibility_raw(e);
  CHECK(raw[1] > raw[2]);
  CHECK(raw[2] > raw[0]);
  e.e_hat = {2.0, 2.0};
  const auto flat = credibility_raw(e);
  CHECK(flat[0] == flat[1]);
}

TEST_CASE("standardize") {
  CHECK(standardize(std::vector<double>{1, 2, 3}) == std::vector<double>{0, 0.5, 1});
  CHECK(standardize(std::vector<double>{7, 7}) == std::vector<double>{0.5, 0.5});
  const std::vector<double> raw{0.3, 9.0, 2.5, 4.0};
  std::vector<double> affine;
  for (double x : raw) affine.push_back(3.0 * x + 11.0);
  const auto a = standardize(raw);
  const auto b = standardize(affine);
  for (std::size_t i = 0; i < raw.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("ensemble") {
  CHECK(ensemble_scores({{0.2, 0.7}}) == std::vector<double>{0.2, 0.7});
  CHECK(ensemble_scores({{0, 1}, {1, 0}}) == std::vector<double>{0.5, 0.5});
  CHECK(ensemble_scores({{0, 0.5, 1}, {0, 0.5, 1}, {0, 0.5, 1}}) == std::vector<double>{0, 0.5, 1});
  CHECK_THROWS(ensemble_scores({{0, 1}, {1}}));
  CHECK_THROWS(ensemble_scores({}));
}

TEST_CASE("permutation equivariance") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t n = 7;
    const auto v = random_vectors(n, 6, 100 + seed);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    rng.shuffle(perm);
    std::vector<std::vector<double>> pv;
    for (auto p : perm) pv.push_back(v[p]);
    const auto a = triplet_estimate(pairwise_sq_distances(v));
    const auto b = triplet_estimate(pairwise_sq_distances(pv));
    const auto sa = standardize(credibility_raw(a));
    const auto sb = standardize(credibility_raw(b));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(b.e_hat[i] == doctest::Approx(a.e_hat[perm[i]]).epsilon(1e-12));
      CHECK(sb[i] == doctest::Approx(sa[perm[i]]).epsilon(1e-9));
    }
  }
}

TEST_CASE("global scale invariance") {
  const auto v = random_vectors(8, 16, 77);
  const auto base = triplet_estimate(pairwise_sq_distances(v));
  const auto sb = standardize(credibility_raw(base));
  for (double c : {1e-3, 0.5, 7.0, 1e3}) {
    auto w = v;
    for (auto& row : w) {
      for (auto& x : row) x *= c;
    }
    const auto e = triplet_estimate(pairwise_sq_distances(w));
    const auto s = standardize(credibility_raw(e));
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(e.e_hat[i] == doctest::Approx(base.e_hat[i] * c * c).epsilon(1e-9));
      CHECK(std::abs(s[i] - sb[i]) <= 1e-9);
    }
  }
}

TEST_CASE("symmetric documents get identical scores") {
  // x1 and x2 are mirror images across the axis through x0 and x3.
  const std::vector<std::vector<double>> v{{0, 0}, {1, 0.3}, {1, -0.3}, {2.5, 0}, {0.4, 0}};
  const auto e = triplet_estimate(pairwise_sq_distances(v));
  CHECK(e.e_hat[1] == e.e_hat[2]);
  const auto s = standardize(credibility_raw(e));
  CHECK(s[1] == s[2]);
}

TEST_CASE("bounds on random data") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 3 + seed % 9;
    const auto e = triplet_estimate(pairwise_sq_distances(random_vectors(n, 4, seed)));
    for (double x : e.e_hat) CHECK(x >= e.epsilon);
    for (double r : credibility_raw(e)) {
      CHECK(std::isfinite(r));
      CHECK(r > 0.0);
    }
    for (double s : standardize(credibility_raw(e))) {
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
    }
  }
}

TEST_CASE("sampled pairs only above the threshold") {
  const auto d = pairwise_sq_distances(random_vectors(12, 4, 9));
  TripletOptions opt;
  opt.sampled_pairs = 5;
  CHECK(triplet_estimate(d, opt).e_hat == triplet_estimate(d).e_hat);
  opt.sample_threshold = 5;
  const auto a = triplet_estimate(d, opt);
  const auto b = triplet_estimate(d, opt);
  CHECK(a.e_hat == b.e_hat);
  CHECK(a.e_hat != triplet_estimate(d).e_hat);
}

TEST_CASE("score_query builds the table in record order") {
  corpus::QueryRecord rec;
  rec.query_id = "q";
  for (int i : {2, 0, 1, 3}) rec.documents.push_back(corpus::make_document("x" + std::to_string(i), "t"));
  const auto v = random_vectors(4, 5, 1);
  std::vector<embed::EmbeddingSet> sets{make_set("a", v), make_set("b", random_vectors(4, 5, 2))};
  const auto table = score_query(rec, sets);
  CHECK(table.doc_ids == std::vector<std::string>{"x2", "x0", "x1", "x3"});
  REQUIRE(table.per_embedder.size() == 2);
  CHECK(table.per_embedder[0].embedder_id == "a");
  const auto direct = score_embedder(sets[0], table.doc_ids);
  CHECK(direct == table.per_embedder[0]);
  for (std::size_t i = 0; i < 4; ++i) {
    const double mean = 0.5 * (table.per_embedder[0].standardized[i] + table.per_embedder[1].standardized[i]);
    CHECK(table.aggregated[i] == doctest::Approx(mean).epsilon(1e-15));
  }
  CHECK(table.find_embedder("b") == &table.per_embedder[1]);
  CHECK(table.find_embedder("zz") == nullptr);
}

TEST_CASE("credibility table json round trip") {
  corpus::QueryRecord rec;
  rec.query_id = "q";
  for (int i = 0; i < 3; ++i) rec.documents.push_back(corpus::make_document("x" + std::to_string(i), "t"));
  const auto table = score_query(rec, {make_set("a", {{0, 0}, {0, 0}, {10, 0}})});
  const json j = table;
  CHECK(j["clamped"] == json::array({true, true, false}));
  CHECK(j["epsilon"].get<double>() == table.max_epsilon());
  CHECK(j.begin().key() == "query_id");
  const auto back = j.get<CredibilityTable>();
  CHECK(back == table);
  CHECK(json(back).dump() == j.dump());
}
