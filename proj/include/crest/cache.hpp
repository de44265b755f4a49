#pragma once

#include <atomic>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crest::embed {

// On-disk vector cache. One file per entry at
//   <dir>/<embedder_id>/<hash[0:2]>/<hash>
// holding a little-endian uint32 dimension followed by that many
// little-endian IEEE-754 doubles. Writes are atomic (temp file + rename), so
// concurrent readers never observe a partial entry.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(std::filesystem::path dir);

  static std::string content_hash(std::string_view text);

  // Corrupt or truncated entries are reported on stderr and treated as misses.
  std::optional<std::vector<double>> get(std::string_view embedder_id, std::string_view content_hash) const;
  void put(std::string_view embedder_id, std::string_view content_hash, std::span<const double> vector);

  std::filesystem::path entry_path(std::string_view embedder_id, std::string_view content_hash) const;
  const std::filesystem::path& dir() const { return dir_; }
  std::size_t corrupt_entries() const { return corrupt_.load(); }

 private:
  std::filesystem::path dir_;
  mutable std::atomic<std::size_t> corrupt_{0};
};

}  // namespace crest::embed
