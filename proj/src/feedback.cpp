#include "scholrec/feedback.hpp"

#include "scholrec/clock.hpp"
#include "scholrec/error.hpp"
#include "scholrec/text.hpp"

namespace scholrec {
namespace {

using nlohmann::json;

std::string pair_key(const std::string& a, const std::string& b) {
  std::string key = a;
  key.push_back('\x1f');
  key += b;
  return key;
}

std::string required_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) throw ValidationError(std::string(key) + " is required", key);
  if (!j.at(key).is_string()) throw ValidationError(std::string(key) + " must be a string", key);
  return j.at(key).get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_string()) throw ValidationError(std::string(key) + " must be a string", key);
  return j.at(key).get<std::string>();
}

template <typename Fn>
void for_each_json_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    try {
      fn(j);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
}

}  // namespace

void validate(const FeedbackEntry& entry) {
  if (entry.recommended_id.empty()) throw ValidationError("recommended_id is required", "recommended_id");
  if (entry.reference_key.empty()) throw ValidationError("reference_key is required", "reference_key");
  if (entry.reporter_hash.empty()) throw ValidationError("reporter_hash is required", "reporter_hash");
  if (!is_iso8601(entry.reported_at))
    throw ValidationError("reported_at must be an ISO-8601 timestamp", "reported_at");
}

json to_json(const FeedbackEntry& e) {
  return {{"reference_key", e.reference_key},
          {"recommended_id", e.recommended_id},
          {"reported_at", e.reported_at},
          {"reporter_hash", e.reporter_hash}};
}

FeedbackEntry feedback_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("feedback must be a JSON object");
  FeedbackEntry e;
  e.reference_key = required_string(j, "reference_key");
  e.recommended_id = required_string(j, "recommended_id");
  e.reported_at = required_string(j, "reported_at");
  e.reporter_hash = required_string(j, "reporter_hash");
  validate(e);
  return e;
}

Blacklist::Blacklist(std::size_t global_ban_threshold)
    : threshold_(global_ban_threshold == 0 ? 1 : global_ban_threshold) {}

Blacklist::Blacklist(const Blacklist& other) : threshold_(other.threshold_) {
  std::shared_lock lock(other.mutex_);
  pairs_ = other.pairs_;
  reporters_ = other.reporters_;
  global_ = other.global_;
}

void Blacklist::apply(const FeedbackEntry& entry) {
  std::unique_lock lock(mutex_);
  pairs_.insert(pair_key(entry.reference_key, entry.recommended_id));
  auto& reporters = reporters_[entry.recommended_id];
  reporters.insert(entry.reporter_hash);
  if (reporters.size() >= threshold_) global_.insert(entry.recommended_id);
}

bool Blacklist::is_blacklisted(const std::string& reference_key, const std::string& doc_id) const {
  std::shared_lock lock(mutex_);
  return global_.contains(doc_id) || pairs_.contains(pair_key(reference_key, doc_id));
}

bool Blacklist::is_globally_banned(const std::string& doc_id) const {
  std::shared_lock lock(mutex_);
  return global_.contains(doc_id);
}

std::size_t Blacklist::distinct_reporters(const std::string& doc_id) const {
  std::shared_lock lock(mutex_);
  const auto it = reporters_.find(doc_id);
  return it == reporters_.end() ? 0 : it->second.size();
}

FeedbackStore::FeedbackStore(std::size_t global_ban_threshold,
                             std::optional<std::filesystem::path> log_path)
    : blacklist_(global_ban_threshold), log_path_(std::move(log_path)) {
  if (!log_path_) return;
  if (std::filesystem::exists(*log_path_)) {
    for_each_json_line(*log_path_, [&](const json& j) { blacklist_.apply(feedback_from_json(j)); });
  }
  log_.open(*log_path_, std::ios::app);
  if (!log_) throw IoError("cannot open feedback log " + log_path_->string());
}

void FeedbackStore::record_feedback(const FeedbackEntry& entry) {
  validate(entry);
  std::lock_guard lock(write_mutex_);
  if (log_path_) {
    log_ << to_json(entry).dump() << '\n';
    log_.flush();
    if (!log_) throw IoError("feedback log write failed");
  }
  blacklist_.apply(entry);
}

Blacklist replay_feedback_log(const std::filesystem::path& path, std::size_t global_ban_threshold) {
  Blacklist blacklist(global_ban_threshold);
  for_each_json_line(path, [&](const json& j) { blacklist.apply(feedback_from_json(j)); });
  return blacklist;
}

std::string_view to_string(EventKind kind) {
  return kind == EventKind::kClick ? "click" : "impression";
}

void validate(const InteractionEvent& event) {
  if (event.user_hash.empty()) throw ValidationError("user_hash is required", "user_hash");
  if (event.doc_id.empty()) throw ValidationError("doc_id is required", "doc_id");
  if (!is_iso8601(event.access_time))
    throw ValidationError("access_time must be an ISO-8601 timestamp", "access_time");
}

json to_json(const InteractionEvent& e) {
  json j = {{"user_hash", e.user_hash},
            {"doc_id", e.doc_id},
            {"access_time", e.access_time},
            {"kind", to_string(e.kind)}};
  if (e.source_doc_id) j["source_doc_id"] = *e.source_doc_id;
  if (e.variant) j["variant"] = *e.variant;
  j["orphan"] = e.orphan;
  return j;
}

InteractionEvent event_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("event must be a JSON object");
  InteractionEvent e;
  e.user_hash = required_string(j, "user_hash");
  e.doc_id = required_string(j, "doc_id");
  e.access_time = required_string(j, "access_time");
  const auto kind = required_string(j, "kind");
  if (kind == "impression") {
    e.kind = EventKind::kImpression;
  } else if (kind == "click") {
    e.kind = EventKind::kClick;
  } else {
    throw ValidationError("kind must be impression or click", "kind");
  }
  e.source_doc_id = optional_string(j, "source_doc_id");
  e.variant = optional_string(j, "variant");
  if (j.contains("orphan") && j.at("orphan").is_boolean()) e.orphan = j.at("orphan").get<bool>();
  validate(e);
  return e;
}

EventLog::EventLog(std::optional<std::filesystem::path> path) : path_(std::move(path)) {
  if (!path_) return;
  if (std::filesystem::exists(*path_)) {
    for (auto& event : read_event_log(*path_)) {
      remember(event);
      events_.push_back(std::move(event));
    }
  }
  out_.open(*path_, std::ios::app);
  if (!out_) throw IoError("cannot open event log " + path_->string());
}

void EventLog::remember(const InteractionEvent& event) {
  if (event.kind == EventKind::kImpression) impressions_.insert(pair_key(event.user_hash, event.doc_id));
}

InteractionEvent EventLog::record_event(InteractionEvent event) {
  validate(event);
  std::lock_guard lock(mutex_);
  event.orphan = event.kind == EventKind::kClick &&
                 !impressions_.contains(pair_key(event.user_hash, event.doc_id));
  if (path_) {
    out_ << to_json(event).dump() << '\n';
    out_.flush();
    if (!out_) throw IoError("event log write failed");
  }
  remember(event);
  events_.push_back(event);
  return event;
}

std::vector<InteractionEvent> EventLog::events() const {
  std::lock_guard lock(mutex_);
  return events_;
}

std::size_t EventLog::size() const {
  std::lock_guard lock(mutex_);
  return events_.size();
}

std::vector<InteractionEvent> read_event_log(const std::filesystem::path& path) {
  std::vector<InteractionEvent> events;
  for_each_json_line(path, [&](const json& j) { events.push_back(event_from_json(j)); });
  return events;
}

}  // namespace scholrec
