#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "crest/corpus.hpp"

namespace crest::embed {

class EmbeddingCache;

// Vectors for one embedder keyed by document (or candidate) id, kept in
// insertion order.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  explicit EmbeddingSet(std::string embedder_id) : embedder_id_(std::move(embedder_id)) {}

  // Throws FormatError on a duplicate id or a dimension mismatch.
  void add(std::string id, std::vector<double> vector);

  const std::vector<double>* find(std::string_view id) const;
  const std::vector<double>& at(std::string_view id) const;

  const std::string& embedder_id() const { return embedder_id_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<std::vector<double>>& vectors() const { return vectors_; }

  // Multiplies every vector by c. Used by scale-invariance checks.
  EmbeddingSet scaled(double c) const;

  bool operator==(const EmbeddingSet& other) const {
    return embedder_id_ == other.embedder_id_ && ids_ == other.ids_ && vectors_ == other.vectors_;
  }

 private:
  std::string embedder_id_;
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<std::vector<double>> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr std::string_view kBuiltinEndpoint = "builtin:test";

struct ProviderSpec {
  std::string embedder_id;
  std::string endpoint;  // http(s) URL or "builtin:test"
  std::size_t batch_size = 32;
  std::string auth;  // name of the env var holding a bearer token; may be empty
  // Only read by builtin:test.
  std::size_t dim = 64;
  std::uint64_t seed = 0;

  bool is_builtin() const { return endpoint == kBuiltinEndpoint; }
  void validate() const;
};

// Deterministic offline stand-in for a neural embedder: lowercase, split on
// whitespace, sum one pseudo-random unit vector per distinct term (keyed by
// seed and term) weighted by term frequency, then L2-normalize.
std::vector<double> builtin_test_embed(std::string_view text, std::size_t dim, std::uint64_t seed);

// Throws ProviderError if the vector has zero or non-finite norm.
void l2_normalize(std::vector<double>& v);
double l2_norm(std::span<const double> v);

class Provider {
 public:
  virtual ~Provider() = default;
  // One vector per text, same order.
  virtual std::vector<std::vector<double>> embed_batch(const std::vector<std::string>& texts) = 0;
  // Number of embed_batch invocations that reached the backend.
  std::size_t calls() const { return calls_.load(); }

 protected:
  std::atomic<std::size_t> calls_{0};
};

class BuiltinProvider final : public Provider {
 public:
  BuiltinProvider(std::size_t dim, std::uint64_t seed);
  std::vector<std::vector<double>> embed_batch(const std::vector<std::string>& texts) override;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{250};
};

std::unique_ptr<Provider> make_provider(const ProviderSpec& spec, const RetryPolicy& retry = {});

struct EmbedOptions {
  bool normalize = true;
  std::size_t parallelism = 4;
  EmbeddingCache* cache = nullptr;
};

// Embeds texts in batches of spec.batch_size, consulting the cache first.
// Identical texts are embedded once. Raw provider output is cached;
// normalization is applied afterwards.
std::vector<std::vector<double>> embed_texts(Provider& provider, const ProviderSpec& spec,
                                             const std::vector<std::string>& texts,
                                             const EmbedOptions& options = {});

EmbeddingSet embed_documents(Provider& provider, const ProviderSpec& spec,
                             const std::vector<corpus::Document>& docs, const EmbedOptions& options = {});
EmbeddingSet embed_documents(const ProviderSpec& spec, const std::vector<corpus::Document>& docs,
                             const EmbedOptions& options = {});

EmbeddingSet embed_candidates(Provider& provider, const ProviderSpec& spec, const corpus::CandidateSet& set,
                              const EmbedOptions& options = {});

}  // namespace crest::embed
