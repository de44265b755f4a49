#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crest/corpus.hpp"
#include "crest/embed.hpp"
#include "crest/util.hpp"
#include "crest/wscore.hpp"

namespace crest::integrate {

enum class Level { low, medium, high };

std::string_view to_string(Level level);
Level level_from_string(std::string_view s);

// Rank terciles: the top ceil(n/3) scores are high, the bottom ceil(n/3) of
// what remains are low, the rest medium. Equal scores rank by index, earlier
// first.
std::vector<Level> bucket_levels(std::span<const double> standardized);

struct AnnotatedPrompt {
  std::string query_id;
  std::string embedder_id;
  std::vector<Level> levels;
  std::string text;

  bool operator==(const AnnotatedPrompt&) const = default;
};

inline constexpr std::string_view kPromptHeader =
    "Answer the question using the documents below. Each document is tagged with an estimated credibility level.\n";

AnnotatedPrompt annotate_prompt(const corpus::QueryRecord& record, const std::vector<Level>& levels,
                                std::string embedder_id = "");

// One prompt per embedder, each tagged from that embedder's standardized scores.
std::vector<AnnotatedPrompt> prompt_variants(const corpus::QueryRecord& record,
                                             const wscore::CredibilityTable& table);

inline constexpr double kDefaultScoreFloor = 0.01;

struct MaskEntry {
  std::string doc_id;
  double scale = 1.0;
  std::size_t token_count = 0;

  bool operator==(const MaskEntry&) const = default;
};

// Per-document multiplicative attention factors w_i = max(s_i, floor) * C,
// with C chosen so that sum_i w_i t_i == sum_i t_i.
struct MaskSpec {
  std::string query_id;
  double C = 1.0;
  std::vector<MaskEntry> entries;
  double conservation_residual = 0.0;  // (sum w t - sum t) / sum t

  bool operator==(const MaskSpec&) const = default;
};

MaskSpec attention_scales(std::span<const double> aggregated, std::span<const std::size_t> token_counts,
                          double score_floor = kDefaultScoreFloor);

// Builds the mask for a record from its scores; doc ids are taken from the
// record and must line up with the table.
MaskSpec build_mask(const corpus::QueryRecord& record, const wscore::CredibilityTable& table,
                    double score_floor = kDefaultScoreFloor);

struct SelectionResult {
  std::string query_id;
  std::string chosen_candidate_id;
  std::size_t chosen_index = 0;
  std::vector<double> popularity;
  std::vector<std::size_t> ranks;  // ranks[m] is candidate m's 1-based rank

  bool operator==(const SelectionResult&) const = default;
};

// 1-based descending ranks; ties go to the lower index.
std::vector<std::size_t> descending_ranks(std::span<const double> values);

// Popularity is the document credibility computation applied to the
// candidates' embeddings. With M <= 2 no triplet exists and the first
// candidate is chosen.
SelectionResult select_output(const corpus::CandidateSet& candidates, const embed::EmbeddingSet& embeddings,
                              const wscore::TripletOptions& options = {});

void to_json(json& j, const AnnotatedPrompt& p);
void from_json(const json& j, AnnotatedPrompt& p);
void to_json(json& j, const MaskSpec& m);
void from_json(const json& j, MaskSpec& m);
void to_json(json& j, const SelectionResult& s);
void from_json(const json& j, SelectionResult& s);

}  // namespace crest::integrate
