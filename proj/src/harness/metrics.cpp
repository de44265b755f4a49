#include "crest/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "crest/error.hpp"

namespace crest::harness {

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> auc(std::span<const double> positives, std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) return std::nullopt;
  // Mann-Whitney U from pooled average ranks.
  std::vector<double> pooled(positives.begin(), positives.end());
  pooled.insert(pooled.end(), negatives.begin(), negatives.end());
  const auto ranks = average_ranks(pooled);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < positives.size(); ++i) rank_sum += ranks[i];
  const double np = static_cast<double>(positives.size());
  const double nn = static_cast<double>(negatives.size());
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return std::clamp(u / (np * nn), 0.0, 1.0);
}

std::vector<CdfPoint> empirical_cdf(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<CdfPoint> cdf;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    cdf.push_back({sorted[i], static_cast<double>(i + 1) / n});
  }
  return cdf;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("spearman: length mismatch");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  if (a.size() < 2) return 0.0;
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

std::vector<double> zscore(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / n);
  if (!(sd > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - mean) / sd;
  return out;
}

ScoreEvaluation evaluate(const std::vector<wscore::CredibilityTable>& tables,
                         const std::vector<corpus::QueryRecord>& records) {
  std::unordered_map<std::string, const corpus::QueryRecord*> by_id;
  for (const auto& r : records) by_id.emplace(r.query_id, &r);
  std::vector<double> gold, distractor, gold_z, distractor_z;
  for (const auto& t : tables) {
    auto it = by_id.find(t.query_id);
    if (it == by_id.end()) throw FormatError("evaluate: scores for unknown query " + t.query_id);
    const auto& rec = *it->second;
    const auto z = zscore(t.aggregated);
    for (std::size_t i = 0; i < t.doc_ids.size(); ++i) {
      const auto* doc = corpus::find_document(rec, t.doc_ids[i]);
      if (!doc) throw FormatError("evaluate: " + t.query_id + " has no document " + t.doc_ids[i]);
      if (!doc->is_gold) throw FormatError("evaluate: " + t.query_id + "/" + doc->doc_id + " is unlabeled");
      (*doc->is_gold ? gold : distractor).push_back(t.aggregated[i]);
      (*doc->is_gold ? gold_z : distractor_z).push_back(z[i]);
    }
  }
  ScoreEvaluation e;
  e.gold = gold.size();
  e.distractor = distractor.size();
  e.auc_gold_vs_distractor = auc(gold, distractor);
  e.cdf_gold = empirical_cdf(gold);
  e.cdf_distractor = empirical_cdf(distractor);
  e.auc_zscored = auc(gold_z, distractor_z);
  e.cdf_gold_zscored = empirical_cdf(gold_z);
  e.cdf_distractor_zscored = empirical_cdf(distractor_z);
  return e;
}

json to_json(const std::vector<CdfPoint>& cdf) {
  json arr = json::array();
  for (const auto& p : cdf) arr.push_back(json::array({p.score, p.cumulative}));
  return arr;
}

namespace {
json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
}  // namespace

json to_json(const ScoreEvaluation& e) {
  json j;
  j["gold_documents"] = e.gold;
  j["distractor_documents"] = e.distractor;
  j["auc_gold_vs_distractor"] = optional_number(e.auc_gold_vs_distractor);
  j["score_cdf"] = json{{"gold", to_json(e.cdf_gold)}, {"distractor", to_json(e.cdf_distractor)}};
  j["auc_zscored"] = optional_number(e.auc_zscored);
  j["score_cdf_zscored"] =
      json{{"gold", to_json(e.cdf_gold_zscored)}, {"distractor", to_json(e.cdf_distractor_zscored)}};
  return j;
}

}  // namespace crest::harness
