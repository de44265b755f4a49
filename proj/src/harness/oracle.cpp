#include "crest/harness/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crest/harness/metrics.hpp"
#include "crest/harness/world.hpp"
#include "crest/wscore.hpp"

namespace crest::harness {

OracleConsistency oracle_consistency(std::size_t n, std::size_t m, std::size_t trials, double theta_min,
                                     double theta_max, std::uint64_t seed) {
  OracleConsistency out{n, m, theta_min, theta_max, {}, 0.0, 0.0};
  double sum = 0.0;
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(t));
    Rng theta_rng(derive_seed(s, "theta"));
    const auto theta = log_uniform_theta(n, theta_min, theta_max, theta_rng);
    const auto sample = sample_world(n, m, theta, s);
    const auto d = wscore::pairwise_sq_distances(sample.embeddings.vectors());
    const auto est = wscore::triplet_estimate(d);
    const double rho = spearman(est.e_hat, sample.world.expected_sq_distance());
    out.per_seed.push_back(rho);
    sum += rho;
    lowest = std::min(lowest, rho);
  }
  if (trials > 0) {
    out.mean = sum / static_cast<double>(trials);
    out.min = lowest;
  }
  return out;
}

double AdditivityCheck::max_abs_z() const {
  double z = 0.0;
  for (const auto& p : pairs) z = std::max(z, std::abs(p.z));
  for (const auto& p : to_truth) z = std::max(z, std::abs(p.z));
  return z;
}

namespace {

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  void add(double x) {
    sum += x;
    sum_sq += x * x;
  }
  PairMoment finish(std::size_t i, std::size_t j, double expected, std::size_t draws) const {
    const double n = static_cast<double>(draws);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    const double se = std::sqrt(var / n);
    return {i, j, expected, mean, se, se > 0.0 ? (mean - expected) / se : 0.0};
  }
};

}  // namespace

AdditivityCheck additivity_check(const std::vector<double>& theta, std::size_t m, std::size_t draws,
                                 std::uint64_t seed) {
  auto sample = sample_world(theta.size(), m, theta, seed);
  const std::size_t n = theta.size();
  std::vector<Moments> pair(n * n), truth(n);
  auto accumulate = [&](const embed::EmbeddingSet& set) {
    const auto& v = set.vectors();
    for (std::size_t i = 0; i < n; ++i) {
      truth[i].add(wscore::squared_distance(v[i], sample.world.truth));
      for (std::size_t j = i + 1; j < n; ++j) pair[i * n + j].add(wscore::squared_distance(v[i], v[j]));
    }
  };
  accumulate(sample.embeddings);
  for (std::size_t k = 1; k < draws; ++k) accumulate(sample.world.draw(sample.rng));

  AdditivityCheck out;
  out.theta = theta;
  out.m = m;
  out.draws = draws;
  const auto expected = sample.world.expected_sq_distance();
  for (std::size_t i = 0; i < n; ++i) {
    out.to_truth.push_back(truth[i].finish(i, i, expected[i], draws));
    for (std::size_t j = i + 1; j < n; ++j) {
      out.pairs.push_back(pair[i * n + j].finish(i, j, expected[i] + expected[j], draws));
    }
  }
  return out;
}

json to_json(const OracleConsistency& o) {
  json j;
  j["n"] = o.n;
  j["m"] = o.m;
  j["theta_min"] = o.theta_min;
  j["theta_max"] = o.theta_max;
  j["trials"] = o.per_seed.size();
  j["spearman_mean"] = o.mean;
  j["spearman_min"] = o.min;
  return j;
}

namespace {
json moment_json(const PairMoment& p) {
  json j;
  j["i"] = p.i;
  j["j"] = p.j;
  j["expected"] = p.expected;
  j["sample_mean"] = p.sample_mean;
  j["standard_error"] = p.standard_error;
  j["z"] = p.z;
  return j;
}
}  // namespace

json to_json(const AdditivityCheck& a) {
  json j;
  j["theta"] = a.theta;
  j["m"] = a.m;
  j["draws"] = a.draws;
  json pairs = json::array();
  for (const auto& p : a.pairs) pairs.push_back(moment_json(p));
  j["pairs"] = std::move(pairs);
  json truth = json::array();
  for (const auto& p : a.to_truth) truth.push_back(moment_json(p));
  j["to_truth"] = std::move(truth);
  j["max_abs_z"] = a.max_abs_z();
  return j;
}

}  // namespace crest::harness
