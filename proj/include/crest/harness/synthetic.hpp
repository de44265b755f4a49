#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "crest/corpus.hpp"
#include "crest/harness/noise.hpp"

namespace crest::harness {

// Desk-scale retrieval corpus. Each query has a topic vocabulary and an
// answer keyword drawn from one of the demo categories. Gold documents carry
// most topic tokens plus the answer; distractors carry a few topic tokens, a
// wrong same-category entity and their own filler.
struct SyntheticCorpusSpec {
  std::size_t queries = 200;
  std::size_t docs_per_query = 5;
  std::size_t golds_per_query = 1;
  std::size_t topic_vocab = 10;
  std::size_t gold_topic_tokens = 7;
  std::size_t distractor_topic_tokens = 3;
  std::size_t gold_filler_tokens = 2;
  std::size_t distractor_filler_tokens = 5;
  std::size_t answer_repeats = 1;

  void validate() const;
};

std::vector<corpus::QueryRecord> make_synthetic_corpus(const SyntheticCorpusSpec& spec, std::uint64_t seed);

// Countries, people and years; each keyword maps to the rest of its category.
CategoryMap demo_categories();

}  // namespace crest::harness
