#include "scholrec/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>

#include "scholrec/error.hpp"
#include "scholrec/index.hpp"
#include "scholrec/text.hpp"

namespace scholrec {
namespace {

using nlohmann::json;

std::optional<std::filesystem::path> path_or_null(const json& j, const char* key,
                                                  std::optional<std::filesystem::path> fallback) {
  if (!j.contains(key)) return fallback;
  if (j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_string()) throw ValidationError(std::string(key) + " must be a path string", key);
  return std::filesystem::path(j.at(key).get<std::string>());
}

std::string upper(std::string_view key) {
  std::string out(key);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::size_t count_value(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<int64_t>() < 0)
    throw ValidationError(std::string(key) + " must be a non-negative integer", key);
  return v.get<std::size_t>();
}

json path_json(const std::optional<std::filesystem::path>& p) {
  return p ? json(p->string()) : json(nullptr);
}

std::vector<std::string> split_commas(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find(',', start);
    const auto piece = trim(text.substr(start, end == std::string_view::npos ? text.npos : end - start));
    if (!piece.empty()) out.emplace_back(piece);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

}  // namespace

void validate(const ServiceConfig& config) {
  validate(config.scoring);
  if (config.port < 0 || config.port > 65535) throw ValidationError("port out of range", "port");
  if (config.global_ban_threshold < 1)
    throw ValidationError("global_ban_threshold must be >= 1", "global_ban_threshold");
  if (config.request_timeout_ms < 1)
    throw ValidationError("request_timeout_ms must be positive", "request_timeout_ms");
  if (config.key_term_count < 1) throw ValidationError("key_term_count must be >= 1", "key_term_count");
}

ServiceConfig service_config_from_json(const json& j, ServiceConfig base) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  try {
    base.scoring = scoring_config_from_json(j, base.scoring);
    if (j.contains("host")) base.host = j.at("host").get<std::string>();
    if (j.contains("port")) base.port = j.at("port").get<int>();
    if (j.contains("cors_allowlist"))
      base.cors_allowlist = j.at("cors_allowlist").get<std::vector<std::string>>();
    if (j.contains("global_ban_threshold"))
      base.global_ban_threshold = count_value(j, "global_ban_threshold");
    if (j.contains("exclude_own_repository"))
      base.exclude_own_repository = j.at("exclude_own_repository").get<bool>();
    if (j.contains("apply_eligibility")) base.apply_eligibility = j.at("apply_eligibility").get<bool>();
    if (j.contains("cache_enabled")) base.cache_enabled = j.at("cache_enabled").get<bool>();
    if (j.contains("request_timeout_ms"))
      base.request_timeout_ms = j.at("request_timeout_ms").get<int>();
    if (j.contains("key_term_count")) base.key_term_count = count_value(j, "key_term_count");
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid config value: ") + e.what());
  }
  base.corpus_path = path_or_null(j, "corpus_path", base.corpus_path);
  base.indicators_path = path_or_null(j, "indicators_path", base.indicators_path);
  base.feedback_log = path_or_null(j, "feedback_log", base.feedback_log);
  base.event_log = path_or_null(j, "event_log", base.event_log);
  validate(base);
  return base;
}

json to_json(const ServiceConfig& c) {
  json j = to_json(c.scoring);
  j["host"] = c.host;
  j["port"] = c.port;
  j["cors_allowlist"] = c.cors_allowlist;
  j["global_ban_threshold"] = c.global_ban_threshold;
  j["exclude_own_repository"] = c.exclude_own_repository;
  j["apply_eligibility"] = c.apply_eligibility;
  j["cache_enabled"] = c.cache_enabled;
  j["request_timeout_ms"] = c.request_timeout_ms;
  j["key_term_count"] = c.key_term_count;
  j["corpus_path"] = path_json(c.corpus_path);
  j["indicators_path"] = path_json(c.indicators_path);
  j["feedback_log"] = path_json(c.feedback_log);
  j["event_log"] = path_json(c.event_log);
  return j;
}

ServiceConfig load_service_config(const std::filesystem::path& path, ServiceConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed config: ") + e.what(), 1);
  }
  return service_config_from_json(j, std::move(base));
}

ServiceConfig apply_env_overrides(ServiceConfig config, const EnvLookup& lookup) {
  json overrides = json::object();
  auto env = [&](const std::string& key) -> std::optional<std::string> {
    const std::string name = "SCHOLREC_" + key;
    const char* value = lookup(name.c_str());
    if (!value) return std::nullopt;
    return std::string(value);
  };
  auto number = [](const std::string& key, const std::string& text) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw ValidationError("SCHOLREC_" + key + " must be numeric", key);
    }
  };
  auto integer = [&](const std::string& key, const std::string& text) {
    const double v = number(key, text);
    if (v != static_cast<double>(static_cast<int64_t>(v)))
      throw ValidationError("SCHOLREC_" + key + " must be an integer", key);
    return static_cast<int64_t>(v);
  };
  auto boolean = [](const std::string& key, const std::string& text) {
    const auto lower = ascii_lower(text);
    if (lower == "1" || lower == "true" || lower == "yes") return true;
    if (lower == "0" || lower == "false" || lower == "no") return false;
    throw ValidationError("SCHOLREC_" + key + " must be a boolean", key);
  };

  for (const Field f : kAllFields) {
    const std::string name(field_name(f));
    const std::string key = upper("field_boosts_" + name);
    if (const auto v = env(key)) overrides["field_boosts"][name] = number(key, *v);
  }
  for (const char* key : {"decay_half_life_years", "popularity_beta"}) {
    if (const auto v = env(upper(key))) overrides[key] = number(upper(key), *v);
  }
  for (const char* key : {"candidate_pool_size", "cache_capacity", "port", "global_ban_threshold",
                          "request_timeout_ms", "key_term_count"}) {
    if (const auto v = env(upper(key))) overrides[key] = integer(upper(key), *v);
  }
  for (const char* key : {"exclude_own_repository", "apply_eligibility", "cache_enabled"}) {
    if (const auto v = env(upper(key))) overrides[key] = boolean(upper(key), *v);
  }
  if (const auto v = env("HOST")) overrides["host"] = *v;
  if (const auto v = env("CORS_ALLOWLIST")) overrides["cors_allowlist"] = split_commas(*v);
  for (const char* key : {"corpus_path", "indicators_path", "feedback_log", "event_log"}) {
    if (const auto v = env(upper(key))) overrides[key] = *v;
  }
  return service_config_from_json(overrides, std::move(config));
}

ServiceConfig apply_env_overrides(ServiceConfig config) {
  return apply_env_overrides(std::move(config), [](const char* name) { return std::getenv(name); });
}

}  // namespace scholrec
