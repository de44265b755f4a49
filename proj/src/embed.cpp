#include "crest/embed.hpp"

#include <cmath>
#include <map>
#include <unordered_map>

#include "crest/cache.hpp"
#include "crest/error.hpp"
#include "crest/http_provider.hpp"
#include "crest/parallel.hpp"
#include "crest/rng.hpp"

namespace crest::embed {

void EmbeddingSet::add(std::string id, std::vector<double> vector) {
  if (vector.empty()) throw FormatError("embedding for " + id + " is empty");
  if (!ids_.empty() && vector.size() != dim_) {
    throw FormatError("embedding for " + id + " has dimension " + std::to_string(vector.size()) +
                      ", expected " + std::to_string(dim_));
  }
  if (index_.count(id)) throw FormatError("duplicate embedding id " + id);
  dim_ = vector.size();
  index_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  vectors_.push_back(std::move(vector));
}

const std::vector<double>* EmbeddingSet::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &vectors_[it->second];
}

const std::vector<double>& EmbeddingSet::at(std::string_view id) const {
  if (const auto* v = find(id)) return *v;
  throw FormatError("embedder " + embedder_id_ + ": no embedding for " + std::string(id));
}

EmbeddingSet EmbeddingSet::scaled(double c) const {
  EmbeddingSet out(embedder_id_);
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    std::vector<double> v = vectors_[i];
    for (double& x : v) x *= c;
    out.add(ids_[i], std::move(v));
  }
  return out;
}

void ProviderSpec::validate() const {
  if (embedder_id.empty()) throw ConfigError("provider embedder_id must be non-empty");
  if (batch_size < 1) throw ConfigError("provider " + embedder_id + ": batch_size must be >= 1");
  if (is_builtin()) {
    if (dim < 2) throw ConfigError("provider " + embedder_id + ": builtin dim must be >= 2");
  } else if (endpoint.rfind("http://", 0) != 0 && endpoint.rfind("https://", 0) != 0) {
    throw ConfigError("provider " + embedder_id + ": endpoint must be an http(s) URL or builtin:test");
  }
}

double l2_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

void l2_normalize(std::vector<double>& v) {
  const double norm = l2_norm(v);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw ProviderError("cannot normalize zero or non-finite vector");
  for (double& x : v) x /= norm;
}

namespace {

std::vector<double> term_vector(std::string_view term, std::size_t dim, std::uint64_t seed) {
  std::uint64_t state = derive_seed(seed, term);
  std::vector<double> v(dim);
  // Box-Muller over splitmix64 uniforms; spherical symmetry gives a uniform
  // direction after normalization.
  for (std::size_t i = 0; i < dim; i += 2) {
    const double u1 = 1.0 - static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    const double u2 = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    v[i] = r * std::cos(a);
    if (i + 1 < dim) v[i + 1] = r * std::sin(a);
  }
  l2_normalize(v);
  return v;
}

}  // namespace

std::vector<double> builtin_test_embed(std::string_view text, std::size_t dim, std::uint64_t seed) {
  if (dim < 2) throw std::invalid_argument("builtin embedder needs dim >= 2");
  const std::string lowered = ascii_lower(text);
  std::map<std::string_view, std::size_t> frequency;
  for (auto token : split_whitespace(lowered)) ++frequency[token];
  if (frequency.empty()) throw std::invalid_argument("builtin embedder: empty text");
  std::vector<double> out(dim, 0.0);
  for (const auto& [term, count] : frequency) {
    const auto tv = term_vector(term, dim, seed);
    for (std::size_t i = 0; i < dim; ++i) out[i] += static_cast<double>(count) * tv[i];
  }
  l2_normalize(out);
  return out;
}

BuiltinProvider::BuiltinProvider(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {}

std::vector<std::vector<double>> BuiltinProvider::embed_batch(const std::vector<std::string>& texts) {
  ++calls_;
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    try {
      out.push_back(builtin_test_embed(t, dim_, seed_));
    } catch (const std::invalid_argument& e) {
      throw ProviderError(e.what());
    }
  }
  return out;
}

std::unique_ptr<Provider> make_provider(const ProviderSpec& spec, const RetryPolicy& retry) {
  spec.validate();
  if (spec.is_builtin()) return std::make_unique<BuiltinProvider>(spec.dim, spec.seed);
  return std::make_unique<HttpProvider>(spec, retry);
}

std::vector<std::vector<double>> embed_texts(Provider& provider, const ProviderSpec& spec,
                                             const std::vector<std::string>& texts,
                                             const EmbedOptions& options) {
  spec.validate();
  // Deduplicate so each distinct text is fetched and cached once.
  std::vector<std::string> unique;
  std::vector<std::size_t> slot(texts.size());
  {
    std::unordered_map<std::string_view, std::size_t> seen;
    for (std::size_t i = 0; i < texts.size(); ++i) {
      auto [it, inserted] = seen.emplace(texts[i], unique.size());
      if (inserted) unique.push_back(texts[i]);
      slot[i] = it->second;
    }
  }

  std::vector<std::vector<double>> vectors(unique.size());
  std::vector<std::string> hashes(unique.size());
  std::vector<std::size_t> misses;
  for (std::size_t u = 0; u < unique.size(); ++u) {
    if (options.cache) {
      hashes[u] = EmbeddingCache::content_hash(unique[u]);
      if (auto hit = options.cache->get(spec.embedder_id, hashes[u])) {
        vectors[u] = std::move(*hit);
        continue;
      }
    }
    misses.push_back(u);
  }

  const std::size_t batch = spec.batch_size;
  const std::size_t n_batches = (misses.size() + batch - 1) / batch;
  parallel_for(n_batches, options.parallelism, [&](std::size_t b) {
    const std::size_t begin = b * batch;
    const std::size_t end = std::min(misses.size(), begin + batch);
    std::vector<std::string> chunk;
    chunk.reserve(end - begin);
    for (std::size_t k = begin; k < end; ++k) chunk.push_back(unique[misses[k]]);
    auto result = provider.embed_batch(chunk);
    if (result.size() != chunk.size()) {
      throw ProviderError("provider " + spec.embedder_id + " returned " + std::to_string(result.size()) +
                          " vectors for " + std::to_string(chunk.size()) + " texts");
    }
    for (std::size_t k = begin; k < end; ++k) vectors[misses[k]] = std::move(result[k - begin]);
  });

  std::size_t dim = 0;
  for (const auto& v : vectors) {
    if (v.empty()) throw ProviderError("provider " + spec.embedder_id + " returned an empty vector");
    for (double x : v) {
      if (!std::isfinite(x)) throw ProviderError("provider " + spec.embedder_id + " returned non-finite values");
    }
    if (dim == 0) dim = v.size();
    if (v.size() != dim) {
      throw ProviderError("provider " + spec.embedder_id + ": dimension mismatch (" + std::to_string(dim) +
                          " vs " + std::to_string(v.size()) + ")");
    }
  }

  if (options.cache) {
    for (std::size_t u : misses) options.cache->put(spec.embedder_id, hashes[u], vectors[u]);
  }
  if (options.normalize) {
    for (auto& v : vectors) l2_normalize(v);
  }

  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) out.push_back(vectors[slot[i]]);
  return out;
}

EmbeddingSet embed_documents(Provider& provider, const ProviderSpec& spec,
                             const std::vector<corpus::Document>& docs, const EmbedOptions& options) {
  if (docs.empty()) throw FormatError("embed_documents: no documents");
  std::vector<std::string> texts;
  texts.reserve(docs.size());
  for (const auto& d : docs) texts.push_back(d.text);
  auto vectors = embed_texts(provider, spec, texts, options);
  EmbeddingSet set(spec.embedder_id);
  for (std::size_t i = 0; i < docs.size(); ++i) set.add(docs[i].doc_id, std::move(vectors[i]));
  return set;
}

EmbeddingSet embed_documents(const ProviderSpec& spec, const std::vector<corpus::Document>& docs,
                             const EmbedOptions& options) {
  auto provider = make_provider(spec);
  return embed_documents(*provider, spec, docs, options);
}

EmbeddingSet embed_candidates(Provider& provider, const ProviderSpec& spec, const corpus::CandidateSet& set,
                              const EmbedOptions& options) {
  std::vector<std::string> texts;
  texts.reserve(set.candidates.size());
  for (const auto& c : set.candidates) texts.push_back(c.text);
  auto vectors = embed_texts(provider, spec, texts, options);
  EmbeddingSet out(spec.embedder_id);
  for (std::size_t i = 0; i < set.candidates.size(); ++i) {
    out.add(set.candidates[i].candidate_id, std::move(vectors[i]));
  }
  return out;
}

}  // namespace crest::embed
