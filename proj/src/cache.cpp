#include "crest/cache.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>

#include "crest/error.hpp"
#include "crest/util.hpp"

namespace crest::embed {

static_assert(std::endian::native == std::endian::little, "cache format assumes a little-endian host");
static_assert(sizeof(double) == 8);

EmbeddingCache::EmbeddingCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string EmbeddingCache::content_hash(std::string_view text) { return sha256_hex(text); }

std::filesystem::path EmbeddingCache::entry_path(std::string_view embedder_id,
                                                 std::string_view content_hash) const {
  return dir_ / std::string(embedder_id) / std::string(content_hash.substr(0, 2)) / std::string(content_hash);
}

std::optional<std::vector<double>> EmbeddingCache::get(std::string_view embedder_id,
                                                       std::string_view content_hash) const {
  const auto path = entry_path(embedder_id, content_hash);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const IoError&) {
    bytes.clear();
  }
  std::uint32_t dim = 0;
  if (bytes.size() >= 4) std::memcpy(&dim, bytes.data(), 4);
  if (bytes.size() < 4 || dim == 0 || bytes.size() != 4 + static_cast<std::size_t>(dim) * 8) {
    ++corrupt_;
    std::cerr << "warning: corrupt cache entry " << path.string() << ", ignoring\n";
    return std::nullopt;
  }
  std::vector<double> v(dim);
  std::memcpy(v.data(), bytes.data() + 4, static_cast<std::size_t>(dim) * 8);
  return v;
}

void EmbeddingCache::put(std::string_view embedder_id, std::string_view content_hash,
                         std::span<const double> vector) {
  const auto path = entry_path(embedder_id, content_hash);
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create cache directory " + path.parent_path().string() + ": " + ec.message());
  const auto dim = static_cast<std::uint32_t>(vector.size());
  std::string bytes(4 + vector.size() * 8, '\0');
  std::memcpy(bytes.data(), &dim, 4);
  std::memcpy(bytes.data() + 4, vector.data(), vector.size() * 8);
  write_file_atomic(path, bytes);
}

}  // namespace crest::embed
