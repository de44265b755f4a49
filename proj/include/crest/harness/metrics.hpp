#pragma once

#include <optional>
#include <span>
#include <vector>

#include "crest/corpus.hpp"
#include "crest/util.hpp"
#include "crest/wscore.hpp"

namespace crest::harness {

// Probability that a random positive outranks a random negative, ties 1/2.
// nullopt when either class is empty.
std::optional<double> auc(std::span<const double> positives, std::span<const double> negatives);

struct CdfPoint {
  double score = 0.0;
  double cumulative = 0.0;

  bool operator==(const CdfPoint&) const = default;
};

// Empirical CDF evaluated at each distinct observed score.
std::vector<CdfPoint> empirical_cdf(std::span<const double> values);

// Average ranks for ties; 0 when either side is constant.
std::vector<double> average_ranks(std::span<const double> values);
double spearman(std::span<const double> a, std::span<const double> b);

// (x - mean) / sd with the population sd; all zeros for constant input.
std::vector<double> zscore(std::span<const double> values);

struct ScoreEvaluation {
  std::size_t gold = 0;
  std::size_t distractor = 0;
  std::optional<double> auc_gold_vs_distractor;
  std::vector<CdfPoint> cdf_gold;
  std::vector<CdfPoint> cdf_distractor;
  // Same statistics after z-scoring aggregated scores within each query.
  std::optional<double> auc_zscored;
  std::vector<CdfPoint> cdf_gold_zscored;
  std::vector<CdfPoint> cdf_distractor_zscored;
};

// Joins tables to records by query_id; every document needs an is_gold label.
ScoreEvaluation evaluate(const std::vector<wscore::CredibilityTable>& tables,
                         const std::vector<corpus::QueryRecord>& records);

json to_json(const ScoreEvaluation& e);
json to_json(const std::vector<CdfPoint>& cdf);

}  // namespace crest::harness
