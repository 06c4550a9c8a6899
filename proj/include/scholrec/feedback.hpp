#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"

namespace scholrec {

inline constexpr std::size_t kDefaultGlobalBanThreshold = 3;

struct FeedbackEntry {
  std::string reference_key;
  std::string recommended_id;
  std::string reported_at;  // ISO-8601
  std::string reporter_hash;

  bool operator==(const FeedbackEntry&) const = default;
};

void validate(const FeedbackEntry& entry);
nlohmann::json to_json(const FeedbackEntry& entry);
// Throws ValidationError on missing/ill-typed fields or a bad timestamp.
FeedbackEntry feedback_from_json(const nlohmann::json& j);

// Pair bans apply at once; an item is banned everywhere once reports from
// `global_ban_threshold` distinct reporters accumulate. Nothing is ever unbanned.
class Blacklist {
 public:
  explicit Blacklist(std::size_t global_ban_threshold = kDefaultGlobalBanThreshold);

  Blacklist(const Blacklist& other);
  Blacklist& operator=(const Blacklist&) = delete;

  // Entry must already be valid.
  void apply(const FeedbackEntry& entry);

  bool is_blacklisted(const std::string& reference_key, const std::string& doc_id) const;
  bool is_globally_banned(const std::string& doc_id) const;
  std::size_t distinct_reporters(const std::string& doc_id) const;
  std::size_t global_ban_threshold() const noexcept { return threshold_; }

 private:
  std::size_t threshold_;
  mutable std::shared_mutex mutex_;
  std::unordered_set<std::string> pairs_;
  std::unordered_map<std::string, std::unordered_set<std::string>> reporters_;
  std::unordered_set<std::string> global_;
};

// Blacklist backed by an append-only JSONL log. Opening an existing log
// replays it; every accepted entry is written before it takes effect.
class FeedbackStore {
 public:
  explicit FeedbackStore(std::size_t global_ban_threshold = kDefaultGlobalBanThreshold,
                         std::optional<std::filesystem::path> log_path = std::nullopt);

  // Throws ValidationError for an invalid entry, IoError when the log write fails.
  void record_feedback(const FeedbackEntry& entry);
  bool blacklist_check(const std::string& reference_key, const std::string& doc_id) const {
    return blacklist_.is_blacklisted(reference_key, doc_id);
  }
  const Blacklist& blacklist() const noexcept { return blacklist_; }

 private:
  Blacklist blacklist_;
  std::mutex write_mutex_;
  std::optional<std::filesystem::path> log_path_;
  std::ofstream log_;
};

// Rebuilds blacklist state from a feedback log. Malformed lines throw ParseError.
Blacklist replay_feedback_log(const std::filesystem::path& path,
                              std::size_t global_ban_threshold = kDefaultGlobalBanThreshold);

enum class EventKind { kImpression, kClick };

std::string_view to_string(EventKind kind);

struct InteractionEvent {
  std::string user_hash;
  std::string doc_id;
  std::string access_time;  // ISO-8601
  EventKind kind = EventKind::kImpression;
  std::optional<std::string> source_doc_id;
  std::optional<std::string> variant;
  bool orphan = false;  // set by the log: click without an earlier impression

  bool operator==(const InteractionEvent&) const = default;
};

void validate(const InteractionEvent& event);
nlohmann::json to_json(const InteractionEvent& event);
InteractionEvent event_from_json(const nlohmann::json& j);

// Append-only interaction log. Keeps an in-memory copy for CTR queries.
class EventLog {
 public:
  explicit EventLog(std::optional<std::filesystem::path> path = std::nullopt);

  // Validates, flags orphan clicks, appends. Returns the stored event.
  InteractionEvent record_event(InteractionEvent event);
  std::vector<InteractionEvent> events() const;
  std::size_t size() const;

 private:
  void remember(const InteractionEvent& event);

  mutable std::mutex mutex_;
  std::vector<InteractionEvent> events_;
  std::unordered_set<std::string> impressions_;  // user_hash \x1f doc_id
  std::optional<std::filesystem::path> path_;
  std::ofstream out_;
};

std::vector<InteractionEvent> read_event_log(const std::filesystem::path& path);

}  // namespace scholrec
