#include "crest/wscore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crest/error.hpp"
#include "crest/rng.hpp"

namespace crest::wscore {

double DistanceMatrix::mean_off_diagonal() const {
  if (n_ < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) sum += (*this)(i, j);
  }
  return sum / (static_cast<double>(n_) * static_cast<double>(n_ - 1) / 2.0);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("squared_distance: dimension mismatch");
  if (a.size() <= 1000) {
    double sum = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
      const double diff = a[c] - b[c];
      sum += diff * diff;
    }
    return sum;
  }
  // Neumaier compensated sum for long vectors.
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double diff = a[c] - b[c];
    const double term = diff * diff;
    const double t = sum + term;
    comp += std::abs(sum) >= term ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + comp;
}

DistanceMatrix pairwise_sq_distances(const std::vector<std::vector<double>>& vectors) {
  const std::size_t n = vectors.size();
  DistanceMatrix d(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = squared_distance(vectors[i], vectors[j]);
      if (!std::isfinite(v)) throw FormatError("non-finite distance");
      d.set(i, j, v);
    }
  }
  return d;
}

DistanceMatrix pairwise_sq_distances(const embed::EmbeddingSet& set, const std::vector<std::string>& order) {
  if (order.empty()) throw FormatError("pairwise_sq_distances: no documents");
  std::vector<std::vector<double>> vectors;
  vectors.reserve(order.size());
  for (const auto& id : order) vectors.push_back(set.at(id));
  return pairwise_sq_distances(vectors);
}

double clamp_epsilon(const DistanceMatrix& d, const EpsilonPolicy& policy) {
  return std::max(policy.relative * d.mean_off_diagonal(), policy.absolute_floor);
}

namespace {

// Sorted summation so that documents whose distance rows are permutations of
// each other get bit-identical sums.
double sorted_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

std::vector<double> all_pair_means(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  std::vector<double> row_sum(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row;
    row.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) row.push_back(d(i, j));
    }
    row_sum[i] = sorted_sum(std::move(row));
  }
  const double total = sorted_sum(row_sum) / 2.0;
  const double nm1 = static_cast<double>(n - 1);
  const double denom = nm1 * static_cast<double>(n - 2);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = (nm1 * row_sum[i] - total) / denom;
  return out;
}

std::vector<double> sampled_pair_means(const DistanceMatrix& d, std::size_t pairs, std::uint64_t seed) {
  const std::size_t n = d.size();
  Rng rng(seed);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t s = 0; s < pairs; ++s) {
      std::size_t j = rng.index(n - 1);
      if (j >= i) ++j;
      std::size_t k = rng.index(n - 2);
      // k ranges over indices other than i and j.
      const std::size_t lo = std::min(i, j);
      const std::size_t hi = std::max(i, j);
      if (k >= lo) ++k;
      if (k >= hi) ++k;
      sum += 0.5 * (d(i, j) + d(i, k) - d(j, k));
    }
    out[i] = sum / static_cast<double>(pairs);
  }
  return out;
}

}  // namespace

TripletEstimate triplet_estimate(const DistanceMatrix& d, const TripletOptions& options) {
  const std::size_t n = d.size();
  TripletEstimate est;
  est.epsilon = clamp_epsilon(d, options.epsilon);
  if (n < 3) {
    est.degenerate = true;
    est.e_hat.assign(n, est.epsilon);
    est.clamped.assign(n, false);
    return est;
  }
  const bool sample = options.sampled_pairs && *options.sampled_pairs > 0 && n > options.sample_threshold;
  std::vector<double> means = sample ? sampled_pair_means(d, *options.sampled_pairs, options.seed) : all_pair_means(d);
  est.e_hat.resize(n);
  est.clamped.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool clamp = !(means[i] >= est.epsilon);
    est.clamped[i] = clamp;
    est.e_hat[i] = clamp ? est.epsilon : means[i];
  }
  return est;
}

std::vector<double> credibility_raw(const TripletEstimate& estimate) {
  std::vector<double> raw;
  raw.reserve(estimate.e_hat.size());
  for (double e : estimate.e_hat) raw.push_back(1.0 / e);
  return raw;
}

std::vector<double> standardize(std::span<const double> raw) {
  if (raw.empty()) return {};
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double min = *lo;
  const double span = *hi - *lo;
  std::vector<double> out(raw.size(), 0.5);
  if (!(span > 0.0)) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = std::clamp((raw[i] - min) / span, 0.0, 1.0);
  return out;
}

std::vector<double> ensemble_scores(const std::vector<std::vector<double>>& standardized) {
  if (standardized.empty()) throw std::invalid_argument("ensemble_scores: no embedders");
  const std::size_t n = standardized.front().size();
  std::vector<double> out(n, 0.0);
  for (const auto& s : standardized) {
    if (s.size() != n) throw std::invalid_argument("ensemble_scores: length mismatch across embedders");
    for (std::size_t i = 0; i < n; ++i) out[i] += s[i];
  }
  const double m = static_cast<double>(standardized.size());
  for (double& v : out) v = std::clamp(v / m, 0.0, 1.0);
  return out;
}

std::vector<bool> CredibilityTable::any_clamped() const {
  std::vector<bool> out(doc_ids.size(), false);
  for (const auto& e : per_embedder) {
    for (std::size_t i = 0; i < out.size() && i < e.clamped.size(); ++i) out[i] = out[i] || e.clamped[i];
  }
  return out;
}

double CredibilityTable::max_epsilon() const {
  double eps = 0.0;
  for (const auto& e : per_embedder) eps = std::max(eps, e.epsilon);
  return eps;
}

const EmbedderScores* CredibilityTable::find_embedder(std::string_view id) const {
  for (const auto& e : per_embedder) {
    if (e.embedder_id == id) return &e;
  }
  return nullptr;
}

EmbedderScores score_embedder(const embed::EmbeddingSet& set, const std::vector<std::string>& order,
                              const TripletOptions& options) {
  const auto estimate = triplet_estimate(pairwise_sq_distances(set, order), options);
  EmbedderScores scores;
  scores.embedder_id = set.embedder_id();
  scores.raw = credibility_raw(estimate);
  scores.standardized = standardize(scores.raw);
  scores.clamped = estimate.clamped;
  scores.epsilon = estimate.epsilon;
  return scores;
}

CredibilityTable score_query(const corpus::QueryRecord& record, const std::vector<embed::EmbeddingSet>& sets,
                             const TripletOptions& options) {
  if (sets.empty()) throw std::invalid_argument("score_query: no embedders");
  CredibilityTable table;
  table.query_id = record.query_id;
  for (const auto& d : record.documents) table.doc_ids.push_back(d.doc_id);
  std::vector<std::vector<double>> standardized;
  for (const auto& set : sets) {
    if (table.find_embedder(set.embedder_id())) {
      throw std::invalid_argument("score_query: duplicate embedder " + set.embedder_id());
    }
    table.per_embedder.push_back(score_embedder(set, table.doc_ids, options));
    standardized.push_back(table.per_embedder.back().standardized);
  }
  table.aggregated = ensemble_scores(standardized);
  return table;
}

void to_json(json& j, const CredibilityTable& table) {
  j = json::object();
  j["query_id"] = table.query_id;
  j["doc_ids"] = table.doc_ids;
  json per = json::object();
  for (const auto& e : table.per_embedder) {
    json ej;
    ej["raw"] = e.raw;
    ej["standardized"] = e.standardized;
    ej["clamped"] = e.clamped;
    ej["epsilon"] = e.epsilon;
    per[e.embedder_id] = std::move(ej);
  }
  j["per_embedder"] = std::move(per);
  j["aggregated"] = table.aggregated;
  j["clamped"] = table.any_clamped();
  j["epsilon"] = table.max_epsilon();
}

void from_json(const json& j, CredibilityTable& table) {
  table = CredibilityTable{};
  table.query_id = j.at("query_id").get<std::string>();
  table.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
  for (const auto& [id, ej] : j.at("per_embedder").items()) {
    EmbedderScores e;
    e.embedder_id = id;
    e.raw = ej.at("raw").get<std::vector<double>>();
    e.standardized = ej.at("standardized").get<std::vector<double>>();
    if (ej.contains("clamped")) e.clamped = ej.at("clamped").get<std::vector<bool>>();
    if (ej.contains("epsilon")) e.epsilon = ej.at("epsilon").get<double>();
    if (e.raw.size() != table.doc_ids.size() || e.standardized.size() != table.doc_ids.size()) {
      throw FormatError("scores for " + table.query_id + ": embedder " + id + " length mismatch");
    }
    table.per_embedder.push_back(std::move(e));
  }
  table.aggregated = j.at("aggregated").get<std::vector<double>>();
  if (table.aggregated.size() != table.doc_ids.size()) {
    throw FormatError("scores for " + table.query_id + ": aggregated length mismatch");
  }
}

}  // namespace crest::wscore
