#include "crest/util.hpp"

#include <openssl/evp.h>

#include <unistd.h>

#include <array>
#include <functional>
#include <thread>
#include <fstream>
#include <sstream>

#include "crest/error.hpp"

namespace crest {

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

namespace {
constexpr bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
}  // namespace

std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) tokens.push_back(text.substr(start, i - start));
  }
  return tokens;
}

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return std::move(buffer).str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("write failed: " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot write " + path.string() + ": " + ec.message());
  }
}

bool is_header_line(const json& value) {
  return value.is_object() && value.size() == 1 && value.contains("header");
}

std::vector<JsonLine> parse_jsonl(std::string_view contents, std::string_view source) {
  std::vector<JsonLine> lines;
  std::size_t line_number = 0;
  std::size_t pos = 0;
  bool first_value = true;
  while (pos < contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = contents.substr(pos, end - pos);
    pos = end + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (split_whitespace(line).empty()) continue;
    json value;
    try {
      value = json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw FormatError(std::string(source) + ":" + std::to_string(line_number) +
                        ": malformed JSON: " + e.what());
    }
    if (first_value && is_header_line(value)) {
      first_value = false;
      continue;
    }
    first_value = false;
    lines.push_back({line_number, std::move(value)});
  }
  return lines;
}

std::vector<JsonLine> read_jsonl(const std::filesystem::path& path) {
  return parse_jsonl(read_file(path), path.string());
}

std::string dump_line(const json& value) { return value.dump(); }

void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows,
                 const std::optional<json>& header) {
  std::string out;
  if (header) {
    json h;
    h["header"] = *header;
    out += dump_line(h);
    out += '\n';
  }
  for (const auto& row : rows) {
    out += dump_line(row);
    out += '\n';
  }
  write_file_atomic(path, out);
}

}  // namespace crest
