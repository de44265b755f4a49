#include "config.hpp"

#include <functional>
#include <map>

#include "crest/error.hpp"

namespace crest::cli {

embed::ProviderSpec provider_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("provider entries must be objects");
  embed::ProviderSpec spec;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "embedder_id") {
        spec.embedder_id = value.get<std::string>();
      } else if (key == "endpoint") {
        spec.endpoint = value.get<std::string>();
      } else if (key == "batch_size") {
        spec.batch_size = value.get<std::size_t>();
      } else if (key == "auth") {
        spec.auth = value.get<std::string>();
      } else if (key == "dim") {
        spec.dim = value.get<std::size_t>();
      } else if (key == "seed") {
        spec.seed = value.get<std::uint64_t>();
      } else {
        throw ConfigError("unknown provider key: " + key);
      }
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("provider key " + key + " has the wrong type");
    }
  }
  if (spec.auth.empty() && !spec.is_builtin() && !spec.embedder_id.empty()) {
    spec.auth = "CREST_EMBED_TOKEN_" + ascii_lower(spec.embedder_id);
    for (char& c : spec.auth) {
      if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
      if (c == '-' || c == '.') c = '_';
    }
  }
  spec.validate();
  return spec;
}

json to_json(const embed::ProviderSpec& spec) {
  json j;
  j["embedder_id"] = spec.embedder_id;
  j["endpoint"] = spec.endpoint;
  j["batch_size"] = spec.batch_size;
  j["auth"] = spec.auth;
  j["dim"] = spec.dim;
  j["seed"] = spec.seed;
  return j;
}

namespace {

template <class T>
std::function<void(RunConfig&, const json&)> field(T RunConfig::*member) {
  return [member](RunConfig& c, const json& v) { c.*member = v.get<T>(); };
}

const std::map<std::string, std::function<void(RunConfig&, const json&)>>& setters() {
  static const std::map<std::string, std::function<void(RunConfig&, const json&)>> table = {
      {"providers",
       [](RunConfig& c, const json& v) {
         if (!v.is_array()) throw ConfigError("providers must be an array");
         c.providers.clear();
         for (const auto& p : v) c.providers.push_back(provider_from_json(p));
       }},
      {"cache_dir", field(&RunConfig::cache_dir)},
      {"normalize", field(&RunConfig::normalize)},
      {"epsilon_relative", field(&RunConfig::epsilon_relative)},
      {"epsilon_absolute", field(&RunConfig::epsilon_absolute)},
      {"score_floor", field(&RunConfig::score_floor)},
      {"parallelism", field(&RunConfig::parallelism)},
      {"seed", field(&RunConfig::seed)},
      {"corpus", field(&RunConfig::corpus)},
      {"candidates", field(&RunConfig::candidates)},
      {"scores", field(&RunConfig::scores)},
      {"masks", field(&RunConfig::masks)},
      {"prompts", field(&RunConfig::prompts)},
      {"selection", field(&RunConfig::selection)},
      {"report", field(&RunConfig::report)},
      {"categories", field(&RunConfig::categories)},
      {"record", field(&RunConfig::record)},
      {"out", field(&RunConfig::out)},
      {"rate", field(&RunConfig::rate)},
      {"embedder", field(&RunConfig::embedder)},
      {"n", field(&RunConfig::n)},
      {"m", field(&RunConfig::m)},
      {"trials", field(&RunConfig::trials)},
      {"theta_min", field(&RunConfig::theta_min)},
      {"theta_max", field(&RunConfig::theta_max)},
      {"draws", field(&RunConfig::draws)},
      {"selection_trials", field(&RunConfig::selection_trials)},
      {"emit_corpus", field(&RunConfig::emit_corpus)},
      {"emit_categories", field(&RunConfig::emit_categories)},
      {"corpus_queries", field(&RunConfig::corpus_queries)},
      {"corpus_docs", field(&RunConfig::corpus_docs)},
      {"corpus_golds", field(&RunConfig::corpus_golds)},
      {"rates", field(&RunConfig::rates)},
      {"csv_dir", field(&RunConfig::csv_dir)},
  };
  return table;
}

}  // namespace

void apply_config_json(RunConfig& config, const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key: " + key);
    try {
      it->second(config, value);
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config key " + key + " has the wrong type");
    }
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  RunConfig config;
  apply_config_json(config, j);
  return config;
}

json to_json(const RunConfig& c) {
  json j;
  json providers = json::array();
  for (const auto& p : c.providers) providers.push_back(to_json(p));
  j["providers"] = std::move(providers);
  j["cache_dir"] = c.cache_dir;
  j["normalize"] = c.normalize;
  j["epsilon_relative"] = c.epsilon_relative;
  j["epsilon_absolute"] = c.epsilon_absolute;
  j["score_floor"] = c.score_floor;
  j["parallelism"] = c.parallelism;
  j["seed"] = c.seed;
  j["corpus"] = c.corpus;
  j["candidates"] = c.candidates;
  j["scores"] = c.scores;
  j["masks"] = c.masks;
  j["prompts"] = c.prompts;
  j["selection"] = c.selection;
  j["report"] = c.report;
  j["categories"] = c.categories;
  j["record"] = c.record;
  j["out"] = c.out;
  j["rate"] = c.rate;
  j["embedder"] = c.embedder;
  j["n"] = c.n;
  j["m"] = c.m;
  j["trials"] = c.trials;
  j["theta_min"] = c.theta_min;
  j["theta_max"] = c.theta_max;
  j["draws"] = c.draws;
  j["selection_trials"] = c.selection_trials;
  j["emit_corpus"] = c.emit_corpus;
  j["emit_categories"] = c.emit_categories;
  j["corpus_queries"] = c.corpus_queries;
  j["corpus_docs"] = c.corpus_docs;
  j["corpus_golds"] = c.corpus_golds;
  j["rates"] = c.rates;
  j["csv_dir"] = c.csv_dir;
  return j;
}

json make_header(std::string_view command, const RunConfig& config) {
  const json effective = to_json(config);
  json h;
  h["tool"] = std::string(kToolName);
  h["version"] = std::string(kToolVersion);
  h["command"] = std::string(command);
  h["seed"] = config.seed;
  h["config_hash"] = sha256_hex(effective.dump());
  h["config"] = effective;
  return h;
}

}  // namespace crest::cli
