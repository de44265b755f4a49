#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crest/error.hpp"
#include "json.hpp"

namespace crest {

// Insertion-ordered JSON so every artifact is emitted with a fixed key order.
using json = nlohmann::ordered_json;

inline constexpr std::string_view kToolName = "crest";
inline constexpr std::string_view kToolVersion = "0.1.0";

std::string sha256_hex(std::string_view data);

// Whitespace tokenization shared by token counting, the builtin embedder and
// keyword matching.
std::vector<std::string_view> split_whitespace(std::string_view text);
std::string ascii_lower(std::string_view text);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

struct JsonLine {
  std::size_t line_number = 0;
  json value;
};

// Parses a JSONL file. Blank lines are skipped, as is a leading
// {"header": ...} line written by the CLI.
std::vector<JsonLine> read_jsonl(const std::filesystem::path& path);
std::vector<JsonLine> parse_jsonl(std::string_view contents, std::string_view source);

bool is_header_line(const json& value);

// Compact single-line dump; LF terminated when used for JSONL.
std::string dump_line(const json& value);

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows,
                 const std::optional<json>& header = std::nullopt);

// Reads and writes whole artifact tables through to_json/from_json.
template <class T>
void save_table(const std::filesystem::path& path, const std::vector<T>& rows,
                const std::optional<json>& header = std::nullopt) {
  std::vector<json> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.emplace_back(row);
  write_jsonl(path, out, header);
}

template <class T>
std::vector<T> load_table(const std::filesystem::path& path) {
  std::vector<T> rows;
  for (const auto& line : read_jsonl(path)) {
    try {
      rows.push_back(line.value.template get<T>());
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line.line_number) + ": " + e.what());
    }
  }
  return rows;
}

}  // namespace crest
