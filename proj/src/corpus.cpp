#include "crest/corpus.hpp"

#include <unordered_set>

#include "crest/error.hpp"

namespace crest::corpus {

std::size_t count_tokens(std::string_view text) { return split_whitespace(text).size(); }

Document make_document(std::string doc_id, std::string text, std::optional<bool> is_gold) {
  const std::size_t tokens = count_tokens(text);
  if (tokens == 0) throw FormatError("document " + doc_id + ": text empty");
  return Document{std::move(doc_id), std::move(text), is_gold, tokens};
}

namespace {

[[noreturn]] void fail(std::string_view where, std::string_view id, const std::string& what) {
  std::string msg;
  if (!where.empty()) msg += std::string(where) + ": ";
  msg += std::string(id.empty() ? "q?" : id) + ": " + what;
  throw FormatError(msg);
}

std::string require_string(const json& obj, const char* key, std::string_view where, std::string_view id) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) fail(where, id, std::string(key) + " missing or not a string");
  return it->get<std::string>();
}

}  // namespace

QueryRecord record_from_json(const json& value, std::string_view where) {
  if (!value.is_object()) fail(where, "", "record is not an object");
  QueryRecord record;
  record.query_id = require_string(value, "query_id", where, "");
  const std::string& id = record.query_id;
  record.query = require_string(value, "query", where, id);
  if (auto it = value.find("answer"); it != value.end() && !it->is_null()) {
    if (!it->is_string()) fail(where, id, "answer not a string");
    record.answer = it->get<std::string>();
  }
  auto docs = value.find("documents");
  if (docs == value.end() || !docs->is_array() || docs->empty()) fail(where, id, "documents missing/empty");
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < docs->size(); ++i) {
    const json& d = (*docs)[i];
    const std::string at = "documents[" + std::to_string(i) + "]";
    if (!d.is_object()) fail(where, id, at + " is not an object");
    auto doc_id = d.find("doc_id");
    if (doc_id == d.end() || !doc_id->is_string()) fail(where, id, at + ".doc_id missing or not a string");
    auto text = d.find("text");
    if (text == d.end() || !text->is_string()) fail(where, id, at + ".text missing or not a string");
    std::optional<bool> gold;
    if (auto g = d.find("is_gold"); g != d.end() && !g->is_null()) {
      if (!g->is_boolean()) fail(where, id, at + ".is_gold not a boolean");
      gold = g->get<bool>();
    }
    std::string did = doc_id->get<std::string>();
    if (!seen.insert(did).second) fail(where, id, "duplicate doc_id " + did);
    if (count_tokens(text->get_ref<const std::string&>()) == 0) fail(where, id, at + ".text empty");
    record.documents.push_back(make_document(std::move(did), text->get<std::string>(), gold));
  }
  return record;
}

json to_json(const QueryRecord& record) {
  json j;
  j["query_id"] = record.query_id;
  j["query"] = record.query;
  if (record.answer) j["answer"] = *record.answer;
  json docs = json::array();
  for (const auto& d : record.documents) {
    json dj;
    dj["doc_id"] = d.doc_id;
    dj["text"] = d.text;
    if (d.is_gold) dj["is_gold"] = *d.is_gold;
    docs.push_back(std::move(dj));
  }
  j["documents"] = std::move(docs);
  return j;
}

std::vector<QueryRecord> parse_corpus(std::string_view contents, std::string_view source) {
  std::vector<QueryRecord> records;
  std::unordered_set<std::string> ids;
  for (const auto& line : parse_jsonl(contents, source)) {
    const std::string where = std::string(source) + ":" + std::to_string(line.line_number);
    QueryRecord rec = record_from_json(line.value, where);
    if (!ids.insert(rec.query_id).second) fail(where, rec.query_id, "duplicate query_id");
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<QueryRecord> load_corpus(const std::filesystem::path& path) {
  return parse_corpus(read_file(path), path.string());
}

void save_corpus(const std::filesystem::path& path, const std::vector<QueryRecord>& records) {
  std::vector<json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(to_json(r));
  write_jsonl(path, rows);
}

CandidateSet candidates_from_json(const json& value, std::string_view where) {
  if (!value.is_object()) fail(where, "", "record is not an object");
  CandidateSet set;
  set.query_id = require_string(value, "query_id", where, "");
  auto cands = value.find("candidates");
  if (cands == value.end() || !cands->is_array() || cands->empty()) {
    fail(where, set.query_id, "candidates missing/empty");
  }
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < cands->size(); ++i) {
    const json& c = (*cands)[i];
    const std::string at = "candidates[" + std::to_string(i) + "]";
    if (!c.is_object()) fail(where, set.query_id, at + " is not an object");
    Candidate cand{require_string(c, "candidate_id", where, set.query_id),
                   require_string(c, "text", where, set.query_id)};
    if (!seen.insert(cand.candidate_id).second) {
      fail(where, set.query_id, "duplicate candidate_id " + cand.candidate_id);
    }
    set.candidates.push_back(std::move(cand));
  }
  return set;
}

json to_json(const CandidateSet& set) {
  json j;
  j["query_id"] = set.query_id;
  json arr = json::array();
  for (const auto& c : set.candidates) {
    json cj;
    cj["candidate_id"] = c.candidate_id;
    cj["text"] = c.text;
    arr.push_back(std::move(cj));
  }
  j["candidates"] = std::move(arr);
  return j;
}

std::vector<CandidateSet> load_candidates(const std::filesystem::path& path) {
  std::vector<CandidateSet> sets;
  std::unordered_set<std::string> ids;
  for (const auto& line : read_jsonl(path)) {
    const std::string where = path.string() + ":" + std::to_string(line.line_number);
    CandidateSet set = candidates_from_json(line.value, where);
    if (!ids.insert(set.query_id).second) fail(where, set.query_id, "duplicate query_id");
    sets.push_back(std::move(set));
  }
  return sets;
}

void save_candidates(const std::filesystem::path& path, const std::vector<CandidateSet>& sets) {
  std::vector<json> rows;
  rows.reserve(sets.size());
  for (const auto& s : sets) rows.push_back(to_json(s));
  write_jsonl(path, rows);
}

const Document* find_document(const QueryRecord& record, std::string_view doc_id) {
  for (const auto& d : record.documents) {
    if (d.doc_id == doc_id) return &d;
  }
  return nullptr;
}

}  // namespace crest::corpus
