#include "crest/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "crest/error.hpp"

namespace crest::integrate {

std::string_view to_string(Level level) {
  switch (level) {
    case Level::low:
      return "low";
    case Level::medium:
      return "medium";
    case Level::high:
      return "high";
  }
  return "medium";
}

Level level_from_string(std::string_view s) {
  if (s == "low") return Level::low;
  if (s == "medium") return Level::medium;
  if (s == "high") return Level::high;
  throw FormatError("unknown credibility level " + std::string(s));
}

namespace {

std::vector<std::size_t> descending_order(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

}  // namespace

std::vector<Level> bucket_levels(std::span<const double> standardized) {
  const std::size_t n = standardized.size();
  const std::size_t third = (n + 2) / 3;
  const std::size_t n_high = std::min(third, n);
  const std::size_t n_low = std::min(third, n - n_high);
  const auto order = descending_order(standardized);
  std::vector<Level> levels(n, Level::medium);
  for (std::size_t r = 0; r < n; ++r) {
    if (r < n_high) {
      levels[order[r]] = Level::high;
    } else if (r >= n - n_low) {
      levels[order[r]] = Level::low;
    }
  }
  return levels;
}

AnnotatedPrompt annotate_prompt(const corpus::QueryRecord& record, const std::vector<Level>& levels,
                                std::string embedder_id) {
  if (levels.size() != record.documents.size()) {
    throw std::invalid_argument("annotate_prompt: " + std::to_string(levels.size()) + " levels for " +
                                std::to_string(record.documents.size()) + " documents");
  }
  AnnotatedPrompt prompt{record.query_id, std::move(embedder_id), levels, std::string(kPromptHeader)};
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& doc = record.documents[i];
    prompt.text += "[doc ";
    prompt.text += doc.doc_id;
    prompt.text += " | credibility: ";
    prompt.text += to_string(levels[i]);
    prompt.text += "]\n";
    prompt.text += doc.text;
    prompt.text += '\n';
  }
  prompt.text += "Question: ";
  prompt.text += record.query;
  prompt.text += "\nAnswer:";
  return prompt;
}

namespace {

void check_alignment(const corpus::QueryRecord& record, const wscore::CredibilityTable& table) {
  if (table.doc_ids.size() != record.documents.size()) {
    throw FormatError("scores for " + record.query_id + " do not match its documents");
  }
  for (std::size_t i = 0; i < record.documents.size(); ++i) {
    if (table.doc_ids[i] != record.documents[i].doc_id) {
      throw FormatError("scores for " + record.query_id + ": doc order differs from corpus at " + table.doc_ids[i]);
    }
  }
}

}  // namespace

std::vector<AnnotatedPrompt> prompt_variants(const corpus::QueryRecord& record,
                                             const wscore::CredibilityTable& table) {
  check_alignment(record, table);
  std::vector<AnnotatedPrompt> prompts;
  for (const auto& e : table.per_embedder) {
    prompts.push_back(annotate_prompt(record, bucket_levels(e.standardized), e.embedder_id));
  }
  return prompts;
}

MaskSpec attention_scales(std::span<const double> aggregated, std::span<const std::size_t> token_counts,
                          double score_floor) {
  if (aggregated.empty()) throw std::invalid_argument("attention_scales: no documents");
  if (aggregated.size() != token_counts.size()) {
    throw std::invalid_argument("attention_scales: score/token count length mismatch");
  }
  if (!(score_floor > 0.0) || score_floor > 1.0) throw std::invalid_argument("attention_scales: floor must be in (0, 1]");
  const std::size_t n = aggregated.size();
  std::vector<double> s(n);
  double total_tokens = 0.0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(aggregated[i] >= 0.0 && aggregated[i] <= 1.0)) {
      throw std::invalid_argument("attention_scales: score outside [0, 1]");
    }
    if (token_counts[i] < 1) throw std::invalid_argument("attention_scales: token count must be >= 1");
    s[i] = std::max(aggregated[i], score_floor);
    const double t = static_cast<double>(token_counts[i]);
    total_tokens += t;
    weighted += s[i] * t;
  }
  MaskSpec mask;
  mask.C = total_tokens / weighted;
  double conserved = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = n == 1 ? 1.0 : s[i] * mask.C;
    mask.entries.push_back({"", w, token_counts[i]});
    conserved += w * static_cast<double>(token_counts[i]);
  }
  mask.conservation_residual = (conserved - total_tokens) / total_tokens;
  return mask;
}

MaskSpec build_mask(const corpus::QueryRecord& record, const wscore::CredibilityTable& table, double score_floor) {
  check_alignment(record, table);
  std::vector<std::size_t> tokens;
  for (const auto& d : record.documents) tokens.push_back(d.token_count);
  MaskSpec mask = attention_scales(table.aggregated, tokens, score_floor);
  mask.query_id = record.query_id;
  for (std::size_t i = 0; i < tokens.size(); ++i) mask.entries[i].doc_id = record.documents[i].doc_id;
  return mask;
}

std::vector<std::size_t> descending_ranks(std::span<const double> values) {
  const auto order = descending_order(values);
  std::vector<std::size_t> ranks(values.size());
  for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = r + 1;
  return ranks;
}

SelectionResult select_output(const corpus::CandidateSet& candidates, const embed::EmbeddingSet& embeddings,
                              const wscore::TripletOptions& options) {
  if (candidates.candidates.empty()) throw std::invalid_argument("select_output: no candidates");
  std::vector<std::string> order;
  for (const auto& c : candidates.candidates) {
    if (!embeddings.find(c.candidate_id)) {
      throw FormatError("select_output: no embedding for candidate " + c.candidate_id);
    }
    order.push_back(c.candidate_id);
  }
  const auto estimate = wscore::triplet_estimate(wscore::pairwise_sq_distances(embeddings, order), options);
  SelectionResult result;
  result.query_id = candidates.query_id;
  result.popularity = wscore::credibility_raw(estimate);
  result.ranks = descending_ranks(result.popularity);
  result.chosen_index = 0;
  if (!estimate.degenerate) {
    result.chosen_index = static_cast<std::size_t>(
        std::find(result.ranks.begin(), result.ranks.end(), std::size_t{1}) - result.ranks.begin());
  }
  result.chosen_candidate_id = candidates.candidates[result.chosen_index].candidate_id;
  return result;
}

void to_json(json& j, const AnnotatedPrompt& p) {
  j = json::object();
  j["query_id"] = p.query_id;
  j["embedder_id"] = p.embedder_id;
  json levels = json::array();
  for (auto l : p.levels) levels.push_back(std::string(to_string(l)));
  j["levels"] = std::move(levels);
  j["text"] = p.text;
}

void from_json(const json& j, AnnotatedPrompt& p) {
  p.query_id = j.at("query_id").get<std::string>();
  p.embedder_id = j.at("embedder_id").get<std::string>();
  p.levels.clear();
  for (const auto& l : j.at("levels")) p.levels.push_back(level_from_string(l.get<std::string>()));
  p.text = j.at("text").get<std::string>();
}

void to_json(json& j, const MaskSpec& m) {
  j = json::object();
  j["query_id"] = m.query_id;
  j["C"] = m.C;
  json entries = json::array();
  for (const auto& e : m.entries) {
    json ej;
    ej["doc_id"] = e.doc_id;
    ej["scale"] = e.scale;
    ej["token_count"] = e.token_count;
    entries.push_back(std::move(ej));
  }
  j["entries"] = std::move(entries);
  j["conservation_residual"] = m.conservation_residual;
}

void from_json(const json& j, MaskSpec& m) {
  m.query_id = j.at("query_id").get<std::string>();
  m.C = j.at("C").get<double>();
  m.entries.clear();
  for (const auto& ej : j.at("entries")) {
    m.entries.push_back(
        {ej.at("doc_id").get<std::string>(), ej.at("scale").get<double>(), ej.at("token_count").get<std::size_t>()});
  }
  m.conservation_residual = j.contains("conservation_residual") ? j.at("conservation_residual").get<double>() : 0.0;
}

void to_json(json& j, const SelectionResult& s) {
  j = json::object();
  j["query_id"] = s.query_id;
  j["chosen"] = s.chosen_candidate_id;
  j["chosen_index"] = s.chosen_index;
  j["popularity"] = s.popularity;
  j["ranks"] = s.ranks;
}

void from_json(const json& j, SelectionResult& s) {
  s.query_id = j.at("query_id").get<std::string>();
  s.chosen_candidate_id = j.at("chosen").get<std::string>();
  s.popularity = j.at("popularity").get<std::vector<double>>();
  s.ranks = j.at("ranks").get<std::vector<std::size_t>>();
  if (j.contains("chosen_index")) {
    s.chosen_index = j.at("chosen_index").get<std::size_t>();
  } else {
    const auto it = std::find(s.ranks.begin(), s.ranks.end(), std::size_t{1});
    s.chosen_index = static_cast<std::size_t>(it - s.ranks.begin());
  }
}

}  // namespace crest::integrate
