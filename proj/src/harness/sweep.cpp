#include "crest/harness/sweep.hpp"

#include <sstream>

#include "crest/error.hpp"
#include "crest/parallel.hpp"

namespace crest::harness {

std::vector<std::vector<embed::EmbeddingSet>> embed_corpus(const std::vector<corpus::QueryRecord>& corpus,
                                                           const std::vector<embed::ProviderSpec>& providers,
                                                           const embed::EmbedOptions& options) {
  std::vector<std::vector<embed::EmbeddingSet>> out(corpus.size());
  std::vector<std::string> texts;
  for (const auto& rec : corpus) {
    for (const auto& d : rec.documents) texts.push_back(d.text);
  }
  for (const auto& spec : providers) {
    auto provider = embed::make_provider(spec);
    auto vectors = embed::embed_texts(*provider, spec, texts, options);
    std::size_t k = 0;
    for (std::size_t q = 0; q < corpus.size(); ++q) {
      embed::EmbeddingSet set(spec.embedder_id);
      for (const auto& d : corpus[q].documents) set.add(d.doc_id, std::move(vectors[k++]));
      out[q].push_back(std::move(set));
    }
  }
  return out;
}

std::vector<wscore::CredibilityTable> score_corpus(const std::vector<corpus::QueryRecord>& corpus,
                                                   const std::vector<std::vector<embed::EmbeddingSet>>& embeddings,
                                                   const wscore::TripletOptions& options, std::size_t parallelism) {
  if (embeddings.size() != corpus.size()) throw std::invalid_argument("score_corpus: embeddings/corpus mismatch");
  std::vector<wscore::CredibilityTable> tables(corpus.size());
  parallel_for(corpus.size(), parallelism,
               [&](std::size_t q) { tables[q] = wscore::score_query(corpus[q], embeddings[q], options); });
  return tables;
}

namespace {

std::optional<double> mean_pairwise(const std::vector<const std::vector<double>*>& members) {
  if (members.size() < 2) return std::nullopt;
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      sum += wscore::squared_distance(*members[i], *members[j]);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

struct Accumulator {
  double sum = 0.0;
  std::size_t count = 0;
  void add(const std::optional<double>& v) {
    if (v) {
      sum += *v;
      ++count;
    }
  }
  std::optional<double> mean() const {
    return count ? std::optional<double>(sum / static_cast<double>(count)) : std::nullopt;
  }
};

}  // namespace

DistancePoint distance_point(double rate, const std::vector<corpus::QueryRecord>& corpus,
                             const CorruptionRecord& record, const std::vector<embed::EmbeddingSet>& embeddings) {
  if (embeddings.size() != corpus.size()) throw std::invalid_argument("distance_point: embeddings/corpus mismatch");
  Accumulator gold, corrupted, all;
  for (std::size_t q = 0; q < corpus.size(); ++q) {
    std::vector<const std::vector<double>*> g, c, a;
    for (const auto& d : corpus[q].documents) {
      const auto* v = &embeddings[q].at(d.doc_id);
      a.push_back(v);
      if (record.is_corrupted(corpus[q].query_id, d.doc_id)) {
        c.push_back(v);
      } else if (d.is_gold.value_or(false)) {
        g.push_back(v);
      }
    }
    gold.add(mean_pairwise(g));
    corrupted.add(mean_pairwise(c));
    all.add(mean_pairwise(a));
  }
  return {rate, gold.mean(), corrupted.mean(), all.mean()};
}

std::optional<double> separation(const std::vector<corpus::QueryRecord>& corpus, const CorruptionRecord& record,
                                 const std::vector<wscore::CredibilityTable>& tables) {
  if (tables.size() != corpus.size()) throw std::invalid_argument("separation: tables/corpus mismatch");
  Accumulator gold, corrupted;
  for (std::size_t q = 0; q < corpus.size(); ++q) {
    const auto& t = tables[q];
    for (std::size_t i = 0; i < t.doc_ids.size(); ++i) {
      const auto* d = corpus::find_document(corpus[q], t.doc_ids[i]);
      if (!d) throw FormatError("separation: unknown document " + t.doc_ids[i]);
      if (record.is_corrupted(corpus[q].query_id, d->doc_id)) {
        corrupted.add(t.aggregated[i]);
      } else if (d->is_gold.value_or(false)) {
        gold.add(t.aggregated[i]);
      }
    }
  }
  const auto g = gold.mean();
  const auto c = corrupted.mean();
  if (!g || !c) return std::nullopt;
  return *g - *c;
}

std::vector<SweepPoint> noise_sweep(const std::vector<corpus::QueryRecord>& corpus, const std::vector<double>& rates,
                                    const CategoryMap& categories, const std::vector<embed::ProviderSpec>& providers,
                                    std::uint64_t seed, const embed::EmbedOptions& options,
                                    const wscore::TripletOptions& triplet) {
  if (providers.empty()) throw std::invalid_argument("noise_sweep: no providers");
  std::vector<SweepPoint> points;
  for (double rate : rates) {
    const auto corrupted = corrupt(corpus, rate, categories, seed);
    const auto embeddings = embed_corpus(corrupted.corpus, providers, options);
    const auto tables = score_corpus(corrupted.corpus, embeddings, triplet, options.parallelism);
    std::vector<embed::EmbeddingSet> first;
    first.reserve(embeddings.size());
    for (const auto& e : embeddings) first.push_back(e.front());
    SweepPoint p;
    p.rate = rate;
    p.swaps = corrupted.record.swaps.size();
    p.distances = distance_point(rate, corrupted.corpus, corrupted.record, first);
    p.separation = separation(corrupted.corpus, corrupted.record, tables);
    points.push_back(std::move(p));
  }
  return points;
}

namespace {
json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
std::string csv_cell(const std::optional<double>& v) {
  if (!v) return "";
  return json(*v).dump();
}
}  // namespace

json to_json(const std::vector<SweepPoint>& points) {
  json arr = json::array();
  for (const auto& p : points) {
    json j;
    j["rate"] = p.rate;
    j["swaps"] = p.swaps;
    j["mean_distance_gold"] = optional_number(p.distances.gold);
    j["mean_distance_corrupted"] = optional_number(p.distances.corrupted);
    j["mean_distance_all"] = optional_number(p.distances.all);
    j["separation"] = optional_number(p.separation);
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  out << "rate,swaps,mean_distance_gold,mean_distance_corrupted,mean_distance_all,separation\n";
  for (const auto& p : points) {
    out << json(p.rate).dump() << ',' << p.swaps << ',' << csv_cell(p.distances.gold) << ','
        << csv_cell(p.distances.corrupted) << ',' << csv_cell(p.distances.all) << ',' << csv_cell(p.separation)
        << '\n';
  }
  return out.str();
}

}  // namespace crest::harness
