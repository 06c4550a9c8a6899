#include "scholrec/service.hpp"

#include <chrono>
#include <fstream>
#include <random>

#include "scholrec/clock.hpp"
#include "scholrec/enrich.hpp"
#include "scholrec/error.hpp"
#include "scholrec/text.hpp"

namespace scholrec {
namespace {

using nlohmann::json;

std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_string()) throw ValidationError(std::string(key) + " must be a string", key);
  return j.at(key).get<std::string>();
}

json item_json(const RecommendationItem& item) {
  json j = {{"id", item.doc_id},
            {"title", item.title},
            {"authors", item.authors},
            {"year", item.year ? json(*item.year) : json(nullptr)},
            {"repository_id", item.repository_id},
            {"score", item.final_score}};
  if (item.doi) j["doi"] = *item.doi;
  return j;
}

}  // namespace

RecommendRequest recommend_request_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("request body must be a JSON object");
  if (!j.contains("document") || j.at("document").is_null())
    throw ValidationError("document is required", "document");

  RecommendRequest request;
  request.document = reference_from_json(j.at("document"));

  const auto scope = optional_string(j, "scope").value_or("global");
  const auto repository = optional_string(j, "repository_id");
  if (scope == "global") {
    if (repository) throw ValidationError("repository_id is only valid with scope=repository", "repository_id");
    request.scope = Scope::global();
  } else if (scope == "repository") {
    if (!repository || repository->empty())
      throw ValidationError("repository_id is required for scope=repository", "repository_id");
    request.scope = Scope::of_repository(*repository);
  } else {
    throw ValidationError("scope must be \"global\" or \"repository\"", "scope");
  }

  if (j.contains("limit") && !j.at("limit").is_null()) {
    const auto& limit = j.at("limit");
    if (!limit.is_number_integer()) throw ValidationError("limit must be an integer", "limit");
    const auto value = limit.get<int64_t>();
    if (value < 1 || value > static_cast<int64_t>(kMaxRecommendLimit))
      throw ValidationError("limit must be within 1..50", "limit");
    request.limit = static_cast<std::size_t>(value);
  }
  request.variant = optional_string(j, "variant");
  request.user_hash = optional_string(j, "user_hash");
  return request;
}

json to_json(const RecommendResponse& r) {
  json items = json::array();
  for (const auto& item : r.items) items.push_back(item_json(item));
  return {{"items", items},
          {"reference_resolved", r.reference_resolved},
          {"reference_key", r.reference_key},
          {"scope", r.scope},
          {"index_version", r.index_version},
          {"request_id", r.request_id},
          {"generated_at", r.generated_at},
          {"stage_drops",
           {{"scope", r.drops.scope},
            {"eligibility", r.drops.eligibility},
            {"blacklist", r.drops.blacklist},
            {"dedup", r.drops.dedup},
            {"truncate", r.drops.truncate}}}};
}

std::string reference_key(const ReferenceDocument& ref, const DocumentRecord* matched) {
  if (matched) return matched->id;
  if (ref.id && !ref.id->empty()) return *ref.id;
  if (ref.doi && !ref.doi->empty()) return "doi:" + ascii_lower(*ref.doi);
  return "title:" + normalize_title(ref.title.value_or(""));
}

RecommenderService::RecommenderService(ServiceConfig config)
    : config_(std::move(config)),
      feedback_(config_.global_ban_threshold, config_.feedback_log),
      events_(config_.event_log),
      cache_(config_.scoring.cache_capacity),
      cache_enabled_(config_.cache_enabled) {
  validate(config_);
  std::random_device rd;
  request_prefix_ = fnv1a_hex(std::to_string(rd()) + now_iso8601()).substr(0, 8);
}

void RecommenderService::publish(CorpusStore store) {
  auto snapshot = std::make_shared<CorpusSnapshot>();
  snapshot->index = build_index(store);
  snapshot->store = std::move(store);
  publish(std::shared_ptr<const CorpusSnapshot>(std::move(snapshot)));
}

void RecommenderService::publish(std::shared_ptr<const CorpusSnapshot> snapshot) {
  std::lock_guard lock(snapshot_mutex_);
  snapshot_ = std::move(snapshot);
}

std::shared_ptr<const CorpusSnapshot> RecommenderService::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

std::string RecommenderService::next_request_id() {
  return request_prefix_ + "-" + std::to_string(request_counter_.fetch_add(1) + 1);
}

RecommendResponse RecommenderService::recommend(const RecommendRequest& request) {
  const auto started = std::chrono::steady_clock::now();
  const auto snap = snapshot();
  if (!snap) throw ServiceError(503, "INDEX_LOADING", "index not loaded yet");
  validate(request.document);
  if (request.limit < 1 || request.limit > kMaxRecommendLimit)
    throw ValidationError("limit must be within 1..50", "limit");

  const DocumentRecord* matched = match_reference(request.document, snap->store);
  const std::string key = reference_key(request.document, matched);
  const FieldedVector query = query_vector(request.document, matched, snap->index);
  if (query.empty())
    throw ServiceError(422, "EMPTY_QUERY", "reference has no terms known to the index", "document");

  std::unordered_set<std::string> exclude;
  if (matched) exclude.insert(matched->id);
  if (request.document.id) exclude.insert(*request.document.id);
  const std::optional<int> ref_year = matched ? matched->year : request.document.year;

  RankedList ranked;
  if (cache_enabled_) {
    // Unmatched references are keyed by their full metadata, not just the key.
    std::string cache_ref = key;
    if (!matched) cache_ref += "|" + fnv1a_hex(to_json(request.document).dump());
    const RankKey rank_key{cache_ref, request.scope.to_string(), request.limit, snap->index.version()};
    ranked = cached_rank(cache_, rank_key, query, ref_year, snap->index, config_.scoring, exclude);
  } else {
    ranked = std::make_shared<const std::vector<ScoredCandidate>>(
        rank(query, ref_year, snap->index, config_.scoring, exclude));
  }

  AssembleOptions options;
  options.scope = request.scope;
  options.limit = request.limit;
  options.reference_key = key;
  options.index_version = snap->index.version();
  options.apply_eligibility = config_.apply_eligibility;
  options.exclude_own_repository = config_.exclude_own_repository;
  if (matched) options.own_repository = matched->repository_id;
  const BlacklistCheck blacklisted = [this](const std::string& ref, const std::string& doc) {
    return feedback_.blacklist_check(ref, doc);
  };
  auto assembled = assemble(*ranked, options, snap->store, blacklisted);

  const auto elapsed = std::chrono::steady_clock::now() - started;
  if (elapsed > std::chrono::milliseconds(config_.request_timeout_ms))
    throw ServiceError(503, "TIMEOUT", "recommendation exceeded the request timeout");

  RecommendResponse response;
  response.items = std::move(assembled.list.items);
  response.reference_resolved = matched != nullptr;
  response.reference_key = key;
  response.scope = request.scope.to_string();
  response.index_version = snap->index.version();
  response.request_id = next_request_id();
  response.generated_at = assembled.list.generated_at;
  response.drops = assembled.drops;

  for (const auto& item : response.items) {
    InteractionEvent impression;
    impression.user_hash = request.user_hash.value_or("anonymous");
    impression.doc_id = item.doc_id;
    impression.access_time = response.generated_at;
    impression.kind = EventKind::kImpression;
    impression.source_doc_id = key;
    impression.variant = request.variant;
    events_.record_event(std::move(impression));
  }
  return response;
}

CtrReport RecommenderService::ctr(CtrGrouping group_by) const {
  const auto events = events_.events();
  return compute_ctr(events, group_by);
}

json RecommenderService::health() const {
  const auto snap = snapshot();
  if (!snap) return {{"status", "loading"}, {"index_version", nullptr}, {"doc_count", 0}};
  return {{"status", "ok"},
          {"index_version", snap->index.version()},
          {"doc_count", snap->index.doc_count()}};
}

std::shared_ptr<const CorpusSnapshot> load_snapshot_from_config(const ServiceConfig& config) {
  if (!config.corpus_path) throw ValidationError("corpus_path is required", "corpus_path");
  CorpusStore store = load_corpus(*config.corpus_path).store;
  if (config.indicators_path) {
    std::ifstream in(*config.indicators_path);
    if (!in) throw IoError("cannot open indicators file " + config.indicators_path->string());
    const auto file = read_indicators(in);
    store = join_indicators(store, file.rows).store;
  }
  store = enrich_store(store, config.key_term_count);
  auto snapshot = std::make_shared<CorpusSnapshot>();
  snapshot->index = build_index(store);
  snapshot->store = std::move(store);
  return snapshot;
}

}  // namespace scholrec
