#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "crest/embed.hpp"
#include "crest/util.hpp"

namespace crest::cli {

// Every knob of a run. Serialized flat (one key per field) both as the
// config file format and as the echo in output headers.
struct RunConfig {
  std::vector<embed::ProviderSpec> providers;
  std::string cache_dir;
  bool normalize = true;
  double epsilon_relative = 1e-6;
  double epsilon_absolute = 1e-12;
  double score_floor = 0.01;
  std::size_t parallelism = 4;
  std::uint64_t seed = 0;

  std::string corpus;
  std::string candidates;
  std::string scores;
  std::string masks;
  std::string prompts;  // output directory
  std::string selection;
  std::string report;
  std::string categories;
  std::string record;  // corruption record output
  std::string out;

  double rate = 0.0;
  std::string embedder;  // provider used by select; defaults to the first

  std::size_t n = 10;
  std::size_t m = 32;
  std::size_t trials = 100;
  double theta_min = 0.5;
  double theta_max = 50.0;
  std::size_t draws = 10000;
  std::size_t selection_trials = 0;
  std::string emit_corpus;
  std::string emit_categories;
  std::size_t corpus_queries = 200;
  std::size_t corpus_docs = 5;
  std::size_t corpus_golds = 1;

  std::vector<double> rates;
  std::string csv_dir;
};

// Throws ConfigError on unknown keys or ill-typed values.
void apply_config_json(RunConfig& config, const json& j);
RunConfig load_config(const std::filesystem::path& path);
json to_json(const RunConfig& config);

embed::ProviderSpec provider_from_json(const json& j);
json to_json(const embed::ProviderSpec& spec);

// Header object embedded at the top of every output.
json make_header(std::string_view command, const RunConfig& config);

}  // namespace crest::cli
