#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "crest/corpus.hpp"
#include "crest/util.hpp"

namespace crest::harness {

// keyword (lowercased) -> same-category alternatives.
using CategoryMap = std::map<std::string, std::vector<std::string>>;

CategoryMap load_category_map(const std::filesystem::path& path);
CategoryMap category_map_from_json(const json& j);
json to_json(const CategoryMap& map);

// Case-insensitive whole-token match; tokens are whitespace-delimited with
// leading/trailing ASCII punctuation ignored. Multi-word keywords match
// consecutive tokens.
bool contains_keyword(std::string_view text, std::string_view keyword);
// Replaces every match, keeping surrounding punctuation. Returns the count.
std::size_t replace_keyword(std::string& text, std::string_view keyword, std::string_view replacement);

struct Swap {
  std::string query_id;
  std::string doc_id;
  std::string original_keyword;
  std::string replacement_keyword;

  bool operator==(const Swap&) const = default;
};

struct CorruptionRecord {
  double rate = 0.0;
  std::uint64_t seed = 0;
  std::vector<Swap> swaps;
  std::vector<std::string> skipped;   // query ids, with reasons in warnings
  std::vector<std::string> warnings;

  bool is_corrupted(std::string_view query_id, std::string_view doc_id) const;
  bool operator==(const CorruptionRecord&) const = default;
};

struct CorruptionResult {
  std::vector<corpus::QueryRecord> corpus;
  CorruptionRecord record;
  std::vector<bool> modified;  // per query
};

// For each query with an answer, floor(rate * eligible) of the documents that
// contain the answer keyword get every occurrence swapped for a same-category
// alternative. Selection and replacement come from a per-query substream of
// `seed`, so the corrupted sets for increasing rates are nested. Corrupted
// documents lose their gold label (is_gold becomes false when present).
CorruptionResult corrupt(const std::vector<corpus::QueryRecord>& corpus, double rate, const CategoryMap& categories,
                         std::uint64_t seed);

void to_json(json& j, const CorruptionRecord& r);
void from_json(const json& j, CorruptionRecord& r);

}  // namespace crest::harness
