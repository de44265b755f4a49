#include "crest/harness/noise.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iostream>
#include <numeric>

#include "crest/error.hpp"
#include "crest/rng.hpp"

namespace crest::harness {

CategoryMap category_map_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("category map must be a JSON object");
  CategoryMap map;
  for (const auto& [key, alts] : j.items()) {
    if (!alts.is_array()) throw FormatError("category map: alternatives for " + key + " must be an array");
    auto& out = map[ascii_lower(key)];
    for (const auto& a : alts) {
      if (!a.is_string()) throw FormatError("category map: alternatives for " + key + " must be strings");
      out.push_back(a.get<std::string>());
    }
  }
  return map;
}

CategoryMap load_category_map(const std::filesystem::path& path) {
  try {
    return category_map_from_json(json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

json to_json(const CategoryMap& map) {
  json j = json::object();
  for (const auto& [k, v] : map) j[k] = v;
  return j;
}

namespace {

struct Token {
  std::size_t begin;  // core span, punctuation stripped
  std::size_t end;
  std::string lowered;
};

bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

std::vector<Token> core_tokens(std::string_view text) {
  std::vector<Token> tokens;
  for (auto raw : split_whitespace(text)) {
    std::size_t b = static_cast<std::size_t>(raw.data() - text.data());
    std::size_t e = b + raw.size();
    while (b < e && is_punct(text[b])) ++b;
    while (e > b && is_punct(text[e - 1])) --e;
    if (b == e) continue;
    tokens.push_back({b, e, ascii_lower(text.substr(b, e - b))});
  }
  return tokens;
}

std::vector<std::string> keyword_cores(std::string_view keyword) {
  std::vector<std::string> out;
  for (auto& t : core_tokens(keyword)) out.push_back(t.lowered);
  return out;
}

// Start indices of non-overlapping matches.
std::vector<std::size_t> find_matches(const std::vector<Token>& tokens, const std::vector<std::string>& key) {
  std::vector<std::size_t> starts;
  if (key.empty() || tokens.size() < key.size()) return starts;
  for (std::size_t i = 0; i + key.size() <= tokens.size();) {
    bool match = true;
    for (std::size_t k = 0; k < key.size() && match; ++k) match = tokens[i + k].lowered == key[k];
    if (match) {
      starts.push_back(i);
      i += key.size();
    } else {
      ++i;
    }
  }
  return starts;
}

}  // namespace

bool contains_keyword(std::string_view text, std::string_view keyword) {
  return !find_matches(core_tokens(text), keyword_cores(keyword)).empty();
}

std::size_t replace_keyword(std::string& text, std::string_view keyword, std::string_view replacement) {
  const auto key = keyword_cores(keyword);
  const auto tokens = core_tokens(text);
  const auto starts = find_matches(tokens, key);
  for (auto it = starts.rbegin(); it != starts.rend(); ++it) {
    const std::size_t b = tokens[*it].begin;
    const std::size_t e = tokens[*it + key.size() - 1].end;
    text.replace(b, e - b, replacement);
  }
  return starts.size();
}

bool CorruptionRecord::is_corrupted(std::string_view query_id, std::string_view doc_id) const {
  for (const auto& s : swaps) {
    if (s.query_id == query_id && s.doc_id == doc_id) return true;
  }
  return false;
}

CorruptionResult corrupt(const std::vector<corpus::QueryRecord>& corpus, double rate, const CategoryMap& categories,
                         std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("corrupt: rate must be in [0, 1]");
  CorruptionResult result;
  result.corpus = corpus;
  result.record.rate = rate;
  result.record.seed = seed;
  result.modified.assign(corpus.size(), false);

  for (std::size_t q = 0; q < corpus.size(); ++q) {
    auto& rec = result.corpus[q];
    auto skip = [&](const std::string& why) {
      result.record.skipped.push_back(rec.query_id);
      result.record.warnings.push_back(rec.query_id + ": " + why);
      std::cerr << "warning: corrupt: skipping " << rec.query_id << ": " << why << "\n";
    };
    if (!rec.answer || split_whitespace(*rec.answer).empty()) {
      skip("no gold answer");
      continue;
    }
    const std::string& keyword = *rec.answer;
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < rec.documents.size(); ++i) {
      if (contains_keyword(rec.documents[i].text, keyword)) eligible.push_back(i);
    }
    if (eligible.empty()) continue;
    auto cat = categories.find(ascii_lower(keyword));
    if (cat == categories.end()) {
      skip("answer keyword '" + keyword + "' not in category map");
      continue;
    }
    std::vector<std::string> alternatives;
    for (const auto& a : cat->second) {
      if (ascii_lower(a) != ascii_lower(keyword) && !split_whitespace(a).empty()) alternatives.push_back(a);
    }
    if (alternatives.empty()) {
      skip("no alternative for '" + keyword + "'");
      continue;
    }
    // Guard against rate * k landing a hair below an integer.
    const auto count = static_cast<std::size_t>(std::floor(rate * static_cast<double>(eligible.size()) + 1e-9));
    if (count == 0) continue;
    Rng rng(derive_seed(seed, rec.query_id));
    rng.shuffle(eligible);
    std::vector<std::size_t> chosen(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(count));
    std::vector<std::string> replacement(count);
    for (std::size_t k = 0; k < count; ++k) replacement[k] = alternatives[rng.index(alternatives.size())];
    std::vector<std::size_t> by_doc(count);
    std::iota(by_doc.begin(), by_doc.end(), 0);
    std::sort(by_doc.begin(), by_doc.end(), [&](std::size_t a, std::size_t b) { return chosen[a] < chosen[b]; });
    for (std::size_t k : by_doc) {
      auto& doc = rec.documents[chosen[k]];
      replace_keyword(doc.text, keyword, replacement[k]);
      doc.token_count = corpus::count_tokens(doc.text);
      if (doc.is_gold) doc.is_gold = false;
      result.record.swaps.push_back({rec.query_id, doc.doc_id, keyword, replacement[k]});
    }
    result.modified[q] = true;
  }
  return result;
}

void to_json(json& j, const CorruptionRecord& r) {
  j = json::object();
  j["rate"] = r.rate;
  j["seed"] = r.seed;
  j["scope"] = "per-query";
  json swaps = json::array();
  for (const auto& s : r.swaps) {
    json sj;
    sj["query_id"] = s.query_id;
    sj["doc_id"] = s.doc_id;
    sj["original_keyword"] = s.original_keyword;
    sj["replacement_keyword"] = s.replacement_keyword;
    swaps.push_back(std::move(sj));
  }
  j["swaps"] = std::move(swaps);
  j["skipped"] = r.skipped;
  j["warnings"] = r.warnings;
}

void from_json(const json& j, CorruptionRecord& r) {
  r = CorruptionRecord{};
  r.rate = j.at("rate").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& sj : j.at("swaps")) {
    r.swaps.push_back({sj.at("query_id").get<std::string>(), sj.at("doc_id").get<std::string>(),
                       sj.at("original_keyword").get<std::string>(), sj.at("replacement_keyword").get<std::string>()});
  }
  if (j.contains("skipped")) r.skipped = j.at("skipped").get<std::vector<std::string>>();
  if (j.contains("warnings")) r.warnings = j.at("warnings").get<std::vector<std::string>>();
}

}  // namespace crest::harness
