#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "crest/corpus.hpp"
#include "crest/embed.hpp"
#include "crest/harness/noise.hpp"
#include "crest/util.hpp"
#include "crest/wscore.hpp"

namespace crest::harness {

// Embeds every query of a corpus under each provider. Result is indexed
// [query][provider].
std::vector<std::vector<embed::EmbeddingSet>> embed_corpus(const std::vector<corpus::QueryRecord>& corpus,
                                                           const std::vector<embed::ProviderSpec>& providers,
                                                           const embed::EmbedOptions& options = {});

std::vector<wscore::CredibilityTable> score_corpus(const std::vector<corpus::QueryRecord>& corpus,
                                                   const std::vector<std::vector<embed::EmbeddingSet>>& embeddings,
                                                   const wscore::TripletOptions& options = {},
                                                   std::size_t parallelism = 1);

// Mean pairwise squared distance within each class, averaged over queries
// with at least two members of the class. Self-pairs are excluded.
struct DistancePoint {
  double rate = 0.0;
  std::optional<double> gold;
  std::optional<double> corrupted;
  std::optional<double> all;
};

// `embeddings[q]` holds the set used for query q. Gold means is_gold and not
// corrupted.
DistancePoint distance_point(double rate, const std::vector<corpus::QueryRecord>& corpus,
                             const CorruptionRecord& record, const std::vector<embed::EmbeddingSet>& embeddings);

// Pooled mean aggregated score of gold documents minus that of corrupted ones.
std::optional<double> separation(const std::vector<corpus::QueryRecord>& corpus, const CorruptionRecord& record,
                                 const std::vector<wscore::CredibilityTable>& tables);

struct SweepPoint {
  double rate = 0.0;
  std::size_t swaps = 0;
  DistancePoint distances;
  std::optional<double> separation;
};

// Corrupts at each rate, re-embeds, re-scores. Distances use providers[0].
std::vector<SweepPoint> noise_sweep(const std::vector<corpus::QueryRecord>& corpus, const std::vector<double>& rates,
                                    const CategoryMap& categories, const std::vector<embed::ProviderSpec>& providers,
                                    std::uint64_t seed, const embed::EmbedOptions& options = {},
                                    const wscore::TripletOptions& triplet = {});

json to_json(const std::vector<SweepPoint>& points);
std::string sweep_csv(const std::vector<SweepPoint>& points);

}  // namespace crest::harness
