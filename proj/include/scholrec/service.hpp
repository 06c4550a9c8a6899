#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "scholrec/config.hpp"
#include "scholrec/corpus.hpp"
#include "scholrec/evaluation.hpp"
#include "scholrec/feedback.hpp"
#include "scholrec/index.hpp"
#include "scholrec/pipeline.hpp"
#include "scholrec/scorer.hpp"

namespace scholrec {

inline constexpr std::size_t kMaxRecommendLimit = 50;
inline constexpr std::size_t kDefaultRecommendLimit = 5;

struct RecommendRequest {
  ReferenceDocument document;
  Scope scope;
  std::size_t limit = kDefaultRecommendLimit;
  std::optional<std::string> variant;
  // Anonymous token for impression logging; "anonymous" when absent.
  std::optional<std::string> user_hash;
};

// Throws ValidationError with a field path ("document", "repository_id", "limit").
// Unknown keys are ignored.
RecommendRequest recommend_request_from_json(const nlohmann::json& j);

struct RecommendResponse {
  std::vector<RecommendationItem> items;
  bool reference_resolved = false;
  std::string reference_key;
  std::string scope;
  uint64_t index_version = 0;
  std::string request_id;
  std::string generated_at;
  StageDrops drops;
};

nlohmann::json to_json(const RecommendResponse& response);

// Failure with an HTTP status and a machine-readable code.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, std::string code, const std::string& message, std::string field = {})
      : std::runtime_error(message), status_(status), code_(std::move(code)), field_(std::move(field)) {}

  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int status_;
  std::string code_;
  std::string field_;
};

// Identifies the reference for blacklisting and list grouping: the matched
// corpus id, else the supplied id, else "doi:<lower doi>", else
// "title:<normalized title>".
std::string reference_key(const ReferenceDocument& ref, const DocumentRecord* matched);

// Store and index published together.
struct CorpusSnapshot {
  CorpusStore store;
  Index index;
};

// The recommender behind the HTTP API. Snapshots are swapped atomically;
// requests hold a shared_ptr to the snapshot they started with.
class RecommenderService {
 public:
  explicit RecommenderService(ServiceConfig config);

  const ServiceConfig& config() const noexcept { return config_; }

  void publish(CorpusStore store);
  void publish(std::shared_ptr<const CorpusSnapshot> snapshot);
  std::shared_ptr<const CorpusSnapshot> snapshot() const;
  bool ready() const { return snapshot() != nullptr; }

  // Throws ServiceError (422 empty query, 503 not loaded / timed out).
  RecommendResponse recommend(const RecommendRequest& request);
  void record_feedback(const FeedbackEntry& entry) { feedback_.record_feedback(entry); }
  InteractionEvent record_event(const InteractionEvent& event) { return events_.record_event(event); }
  CtrReport ctr(CtrGrouping group_by) const;
  nlohmann::json health() const;

  const FeedbackStore& feedback() const noexcept { return feedback_; }
  const EventLog& events() const noexcept { return events_; }
  const RankCache& cache() const noexcept { return cache_; }
  void set_cache_enabled(bool enabled) { cache_enabled_ = enabled; }

 private:
  std::string next_request_id();

  ServiceConfig config_;
  FeedbackStore feedback_;
  EventLog events_;
  RankCache cache_;
  std::atomic<bool> cache_enabled_;
  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const CorpusSnapshot> snapshot_;
  std::atomic<uint64_t> request_counter_{0};
  std::string request_prefix_;
};

// Loads corpus + optional indicators, enriches, and builds the index.
std::shared_ptr<const CorpusSnapshot> load_snapshot_from_config(const ServiceConfig& config);

}  // namespace scholrec
