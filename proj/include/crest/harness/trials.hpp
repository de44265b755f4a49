#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "crest/corpus.hpp"
#include "crest/rng.hpp"
#include "crest/util.hpp"

namespace crest::harness {

// Candidate answers for one selection trial: a majority cluster of
// near-identical texts plus outliers.
struct ClusterSpec {
  std::size_t candidates = 5;
  std::size_t cluster_size = 3;
  std::size_t base_tokens = 6;           // shared by every cluster member
  std::size_t member_noise_tokens = 1;   // random extra tokens per member
  std::size_t outlier_tokens = 6;        // fresh tokens per outlier
  std::size_t outlier_shared_tokens = 0; // base tokens an outlier also carries
  std::size_t dim = 64;
  std::uint64_t embed_seed = 0;
  bool shuffle = true;  // place cluster members at random positions

  void validate() const;
};

struct TrialCandidates {
  corpus::CandidateSet set;
  std::vector<bool> in_cluster;
};

TrialCandidates make_trial(const ClusterSpec& spec, Rng& rng, std::string query_id = "trial");

struct RankHistogram {
  std::vector<std::size_t> counts;  // counts[r - 1] = trials where the cluster's best rank was r
  std::size_t trials = 0;

  double frequency(std::size_t rank) const;
  double cumulative(std::size_t rank) const;
};

RankHistogram selection_trials(std::size_t n_trials, const ClusterSpec& spec, std::uint64_t seed);

json to_json(const RankHistogram& h);

// Pseudo-word vocabulary shared by the synthetic generators.
std::string pseudo_word(Rng& rng);

}  // namespace crest::harness
