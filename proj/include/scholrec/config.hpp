#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "scholrec/feedback.hpp"
#include "scholrec/scorer.hpp"

namespace scholrec {

struct ServiceConfig {
  ScoringConfig scoring;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::vector<std::string> cors_allowlist;  // "*" allows any origin
  std::size_t global_ban_threshold = kDefaultGlobalBanThreshold;
  bool exclude_own_repository = false;
  bool apply_eligibility = true;
  bool cache_enabled = true;
  int request_timeout_ms = 2000;
  std::size_t key_term_count = 10;
  std::optional<std::filesystem::path> corpus_path;
  std::optional<std::filesystem::path> indicators_path;
  std::optional<std::filesystem::path> feedback_log;
  std::optional<std::filesystem::path> event_log;
};

void validate(const ServiceConfig& config);

// Keys mirror the struct: scoring keys sit at top level next to port,
// cors_allowlist, global_ban_threshold and the *_path / *_log entries.
ServiceConfig service_config_from_json(const nlohmann::json& j, ServiceConfig base = {});
nlohmann::json to_json(const ServiceConfig& config);

// Throws IoError / ParseError / ValidationError.
ServiceConfig load_service_config(const std::filesystem::path& path, ServiceConfig base = {});

using EnvLookup = std::function<const char*(const char*)>;

// SCHOLREC_<KEY> overrides, e.g. SCHOLREC_PORT, SCHOLREC_DECAY_HALF_LIFE_YEARS,
// SCHOLREC_FIELD_BOOSTS_TITLE, SCHOLREC_CORS_ALLOWLIST (comma-separated).
ServiceConfig apply_env_overrides(ServiceConfig config, const EnvLookup& lookup);
ServiceConfig apply_env_overrides(ServiceConfig config);

}  // namespace scholrec
