#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "crest/util.hpp"

namespace crest::harness {

// Spearman correlation between the triplet estimates and the true
// m / (2 theta_i), over independent worlds with log-uniform theta.
struct OracleConsistency {
  std::size_t n = 0;
  std::size_t m = 0;
  double theta_min = 0.0;
  double theta_max = 0.0;
  std::vector<double> per_seed;
  double mean = 0.0;
  double min = 0.0;
};

OracleConsistency oracle_consistency(std::size_t n, std::size_t m, std::size_t trials, double theta_min,
                                     double theta_max, std::uint64_t seed);

// Monte Carlo check that E||x_i - x_j||^2 = m (var_i + var_j) for each pair.
struct PairMoment {
  std::size_t i = 0;
  std::size_t j = 0;
  double expected = 0.0;
  double sample_mean = 0.0;
  double standard_error = 0.0;
  double z = 0.0;  // (sample_mean - expected) / standard_error
};

struct AdditivityCheck {
  std::vector<double> theta;
  std::size_t m = 0;
  std::size_t draws = 0;
  std::vector<PairMoment> pairs;
  // Per-document mean of ||x_i - truth||^2 against m var_i.
  std::vector<PairMoment> to_truth;
  double max_abs_z() const;
};

AdditivityCheck additivity_check(const std::vector<double>& theta, std::size_t m, std::size_t draws,
                                 std::uint64_t seed);

json to_json(const OracleConsistency& o);
json to_json(const AdditivityCheck& a);

}  // namespace crest::harness
