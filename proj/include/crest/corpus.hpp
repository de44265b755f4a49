#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crest/util.hpp"

namespace crest::corpus {

// A retrieved passage. is_gold is an evaluation label only; scoring never
// reads it.
struct Document {
  std::string doc_id;
  std::string text;
  std::optional<bool> is_gold;
  std::size_t token_count = 0;

  bool operator==(const Document&) const = default;
};

// Validates the text and fills token_count. Throws FormatError on empty text.
Document make_document(std::string doc_id, std::string text, std::optional<bool> is_gold = std::nullopt);

struct QueryRecord {
  std::string query_id;
  std::string query;
  std::vector<Document> documents;
  std::optional<std::string> answer;

  bool operator==(const QueryRecord&) const = default;
};

struct Candidate {
  std::string candidate_id;
  std::string text;

  bool operator==(const Candidate&) const = default;
};

// The M answers returned by the black-box model for one query.
struct CandidateSet {
  std::string query_id;
  std::vector<Candidate> candidates;

  bool operator==(const CandidateSet&) const = default;
};

// Whitespace-delimited token count; runs of whitespace collapse.
std::size_t count_tokens(std::string_view text);

std::vector<QueryRecord> load_corpus(const std::filesystem::path& path);
std::vector<QueryRecord> parse_corpus(std::string_view contents, std::string_view source = "<corpus>");
void save_corpus(const std::filesystem::path& path, const std::vector<QueryRecord>& records);

std::vector<CandidateSet> load_candidates(const std::filesystem::path& path);
void save_candidates(const std::filesystem::path& path, const std::vector<CandidateSet>& sets);

// Schema-checked conversions. `where` prefixes error messages (e.g. "file:3").
QueryRecord record_from_json(const json& value, std::string_view where = "");
CandidateSet candidates_from_json(const json& value, std::string_view where = "");
json to_json(const QueryRecord& record);
json to_json(const CandidateSet& set);

const Document* find_document(const QueryRecord& record, std::string_view doc_id);

}  // namespace crest::corpus
