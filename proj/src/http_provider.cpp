#include "crest/http_provider.hpp"

#include <cstdlib>
#include <thread>

#include "crest/error.hpp"
#include "crest/util.hpp"
#include "httplib.h"

namespace crest::embed {

HttpProvider::HttpProvider(const ProviderSpec& spec, RetryPolicy retry) : retry_(retry) {
  const std::string& url = spec.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("bad endpoint URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (!spec.auth.empty()) {
    if (const char* token = std::getenv(spec.auth.c_str())) token_ = token;
  }
  if (retry_.attempts < 1) retry_.attempts = 1;
}

std::vector<std::vector<double>> HttpProvider::attempt(const std::string& body, std::size_t expected,
                                                       std::string& error) {
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);
  httplib::Headers headers;
  if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
  auto res = client.Post(path_, headers, body, "application/json");
  if (!res) {
    error = "transport error: " + httplib::to_string(res.error());
    return {};
  }
  if (res->status != 200) {
    error = "HTTP " + std::to_string(res->status);
    return {};
  }
  std::vector<std::vector<double>> out;
  try {
    auto j = nlohmann::json::parse(res->body);
    const auto& vectors = j.at("vectors");
    if (!vectors.is_array() || vectors.size() != expected) {
      throw ProviderError("response has " + std::to_string(vectors.size()) + " vectors, expected " +
                          std::to_string(expected));
    }
    for (const auto& v : vectors) {
      std::vector<double> row;
      row.reserve(v.size());
      for (const auto& x : v) {
        if (!x.is_number()) throw ProviderError("response vector holds a non-number");
        row.push_back(x.get<double>());
      }
      out.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("malformed provider response: ") + e.what());
  }
  return out;
}

std::vector<std::vector<double>> HttpProvider::embed_batch(const std::vector<std::string>& texts) {
  nlohmann::json request;
  request["texts"] = texts;
  const std::string body = request.dump();
  std::string error;
  auto backoff = retry_.initial_backoff;
  for (int i = 0; i < retry_.attempts; ++i) {
    if (i > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    ++calls_;
    error.clear();
    auto out = attempt(body, texts.size(), error);
    if (error.empty()) return out;
  }
  throw ProviderError(scheme_host_port_ + path_ + ": " + error + " after " + std::to_string(retry_.attempts) +
                      " attempts");
}

}  // namespace crest::embed
