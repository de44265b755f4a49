#pragma once

#include <string>

#include "crest/embed.hpp"

namespace crest::embed {

// Remote embedder speaking
//   POST <endpoint>  {"texts": [...]}  ->  {"vectors": [[...], ...]}
// with an optional bearer token read from the env var named in the spec.
// Non-200 replies and transport errors are retried with exponential backoff.
class HttpProvider final : public Provider {
 public:
  HttpProvider(const ProviderSpec& spec, RetryPolicy retry);
  std::vector<std::vector<double>> embed_batch(const std::vector<std::string>& texts) override;

 private:
  std::vector<std::vector<double>> attempt(const std::string& body, std::size_t expected, std::string& error);

  std::string scheme_host_port_;
  std::string path_;
  std::string token_;
  RetryPolicy retry_;
};

}  // namespace crest::embed
