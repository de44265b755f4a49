#include "crest/harness/synthetic.hpp"

#include <array>
#include <set>
#include <stdexcept>

#include "crest/harness/trials.hpp"
#include "crest/rng.hpp"

namespace crest::harness {

namespace {

const std::array<std::vector<std::string>, 3>& demo_category_lists() {
  static const std::array<std::vector<std::string>, 3> lists = {
      std::vector<std::string>{"france", "germany", "italy", "spain", "portugal", "norway", "sweden", "finland",
                               "poland", "austria", "greece", "egypt", "kenya", "brazil", "chile", "peru",
                               "canada", "mexico", "japan", "india"},
      std::vector<std::string>{"einstein", "curie", "newton", "darwin", "galileo", "tesla", "faraday", "kepler",
                               "pasteur", "turing", "lovelace", "hopper", "bohr", "planck", "noether", "euler",
                               "gauss", "riemann", "fermi", "dirac"},
      std::vector<std::string>{"1905", "1912", "1923", "1939", "1945", "1953", "1961", "1969", "1975", "1989",
                               "1991", "1997", "2001", "2004", "2008", "2011", "1848", "1871", "1889", "1815"},
  };
  return lists;
}

std::vector<std::string> sample_without_replacement(const std::vector<std::string>& pool, std::size_t k, Rng& rng) {
  std::vector<std::string> copy = pool;
  rng.shuffle(copy);
  copy.resize(std::min(k, copy.size()));
  return copy;
}

std::string join_shuffled(std::vector<std::string> words, Rng& rng) {
  rng.shuffle(words);
  std::string s;
  for (const auto& w : words) {
    if (!s.empty()) s.push_back(' ');
    s += w;
  }
  return s;
}

}  // namespace

CategoryMap demo_categories() {
  CategoryMap map;
  for (const auto& list : demo_category_lists()) {
    for (const auto& word : list) {
      auto& alts = map[word];
      for (const auto& other : list) {
        if (other != word) alts.push_back(other);
      }
    }
  }
  return map;
}

void SyntheticCorpusSpec::validate() const {
  if (docs_per_query < 1) throw std::invalid_argument("synthetic corpus: docs_per_query must be >= 1");
  if (golds_per_query > docs_per_query) throw std::invalid_argument("synthetic corpus: more golds than documents");
  if (gold_topic_tokens > topic_vocab || distractor_topic_tokens > topic_vocab) {
    throw std::invalid_argument("synthetic corpus: topic token count exceeds vocabulary");
  }
  if (answer_repeats < 1) throw std::invalid_argument("synthetic corpus: answer_repeats must be >= 1");
}

std::vector<corpus::QueryRecord> make_synthetic_corpus(const SyntheticCorpusSpec& spec, std::uint64_t seed) {
  spec.validate();
  const auto& lists = demo_category_lists();
  std::vector<corpus::QueryRecord> records;
  records.reserve(spec.queries);
  for (std::size_t q = 0; q < spec.queries; ++q) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(q)));
    const auto& category = lists[rng.index(lists.size())];
    const std::string answer = category[rng.index(category.size())];

    std::set<std::string> used(category.begin(), category.end());
    std::vector<std::string> topic;
    while (topic.size() < spec.topic_vocab) {
      auto w = pseudo_word(rng);
      if (used.insert(w).second) topic.push_back(std::move(w));
    }
    auto fresh = [&](std::size_t count) {
      std::vector<std::string> out;
      while (out.size() < count) {
        auto w = pseudo_word(rng);
        if (used.insert(w).second) out.push_back(std::move(w));
      }
      return out;
    };

    struct Draft {
      std::string text;
      bool gold;
    };
    std::vector<Draft> drafts;
    for (std::size_t g = 0; g < spec.golds_per_query; ++g) {
      auto words = sample_without_replacement(topic, spec.gold_topic_tokens, rng);
      for (std::size_t r = 0; r < spec.answer_repeats; ++r) words.push_back(answer);
      for (auto& w : fresh(spec.gold_filler_tokens)) words.push_back(std::move(w));
      drafts.push_back({join_shuffled(std::move(words), rng), true});
    }
    for (std::size_t d = spec.golds_per_query; d < spec.docs_per_query; ++d) {
      auto words = sample_without_replacement(topic, spec.distractor_topic_tokens, rng);
      std::string wrong;
      do {
        wrong = category[rng.index(category.size())];
      } while (wrong == answer);
      words.push_back(std::move(wrong));
      for (auto& w : fresh(spec.distractor_filler_tokens)) words.push_back(std::move(w));
      drafts.push_back({join_shuffled(std::move(words), rng), false});
    }
    rng.shuffle(drafts);

    corpus::QueryRecord rec;
    rec.query_id = "q" + std::to_string(q);
    rec.query = "which entity is linked to " + topic[0] + " " + topic[1] + "?";
    rec.answer = answer;
    for (std::size_t i = 0; i < drafts.size(); ++i) {
      rec.documents.push_back(corpus::make_document("d" + std::to_string(i), drafts[i].text, drafts[i].gold));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace crest::harness
