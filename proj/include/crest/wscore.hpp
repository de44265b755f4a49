#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crest/corpus.hpp"
#include "crest/embed.hpp"
#include "crest/util.hpp"

namespace crest::wscore {

// Symmetric matrix of squared L2 distances with a zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    d_[i * n_ + j] = v;
    d_[j * n_ + i] = v;
  }
  std::span<const double> row(std::size_t i) const { return {d_.data() + i * n_, n_}; }

  // Mean over the n(n-1)/2 off-diagonal pairs; 0 when n < 2.
  double mean_off_diagonal() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

DistanceMatrix pairwise_sq_distances(const std::vector<std::vector<double>>& vectors);
// Rows follow `order`; throws FormatError if an id has no embedding.
DistanceMatrix pairwise_sq_distances(const embed::EmbeddingSet& set, const std::vector<std::string>& order);

// The clamp is relative to the data scale so that rescaling all embeddings by
// c rescales epsilon by c^2 as well.
struct EpsilonPolicy {
  double relative = 1e-6;
  double absolute_floor = 1e-12;
};

double clamp_epsilon(const DistanceMatrix& d, const EpsilonPolicy& policy = {});

struct TripletOptions {
  EpsilonPolicy epsilon;
  // When set and n > sample_threshold, each document averages this many
  // random (j, k) pairs instead of all C(n-1, 2).
  std::optional<std::size_t> sampled_pairs;
  std::size_t sample_threshold = 200;
  std::uint64_t seed = 0;
};

struct TripletEstimate {
  std::vector<double> e_hat;  // estimated E||x_i - x*||^2, floored at epsilon
  std::vector<bool> clamped;
  double epsilon = 0.0;
  bool degenerate = false;  // n < 3, no triplet exists; e_hat is uniform
};

// e_hat[i] = mean over unordered pairs {j, k} not containing i of
//   (d_ij + d_ik - d_jk) / 2,
// then max(., epsilon). Summing over all pairs collapses to
//   ((n-1) R_i - T) / ((n-1)(n-2)),
// with R_i the i-th row sum and T the sum over all unordered pairs.
TripletEstimate triplet_estimate(const DistanceMatrix& d, const TripletOptions& options = {});

// Inverse expected distance to the latent truth: raw[i] = 1 / e_hat[i].
std::vector<double> credibility_raw(const TripletEstimate& estimate);

// Min-max to [0, 1]; a constant input maps to 0.5 everywhere.
std::vector<double> standardize(std::span<const double> raw);

// Elementwise mean of per-embedder standardized scores.
std::vector<double> ensemble_scores(const std::vector<std::vector<double>>& standardized);

struct EmbedderScores {
  std::string embedder_id;
  std::vector<double> raw;
  std::vector<double> standardized;
  std::vector<bool> clamped;
  double epsilon = 0.0;

  bool operator==(const EmbedderScores&) const = default;
};

struct CredibilityTable {
  std::string query_id;
  std::vector<std::string> doc_ids;
  std::vector<EmbedderScores> per_embedder;
  std::vector<double> aggregated;

  // Per document: clamped under any embedder.
  std::vector<bool> any_clamped() const;
  double max_epsilon() const;
  const EmbedderScores* find_embedder(std::string_view id) const;

  bool operator==(const CredibilityTable&) const = default;
};

EmbedderScores score_embedder(const embed::EmbeddingSet& set, const std::vector<std::string>& order,
                              const TripletOptions& options = {});

// Scores a query's documents (in record order) under every embedder and
// averages the standardized scores.
CredibilityTable score_query(const corpus::QueryRecord& record, const std::vector<embed::EmbeddingSet>& sets,
                             const TripletOptions& options = {});

void to_json(json& j, const CredibilityTable& table);
void from_json(const json& j, CredibilityTable& table);

}  // namespace crest::wscore
