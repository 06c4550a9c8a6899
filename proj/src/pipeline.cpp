#include "scholrec/pipeline.hpp"

#include <algorithm>
#include <unordered_set>

#include "scholrec/clock.hpp"
#include "scholrec/error.hpp"
#include "scholrec/text.hpp"

namespace scholrec {

std::string Scope::to_string() const {
  return repository ? "repository:" + *repository : std::string("global");
}

std::string_view reason_code(IneligibleReason reason) {
  switch (reason) {
    case IneligibleReason::kNoFulltext: return "NO_FULLTEXT";
    case IneligibleReason::kNoThumbnail: return "NO_THUMBNAIL";
    case IneligibleReason::kIncompleteMetadata: return "INCOMPLETE_METADATA";
  }
  return "UNKNOWN";
}

Eligibility eligible(const DocumentRecord& record) {
  if (!record.has_fulltext) return {false, IneligibleReason::kNoFulltext};
  if (!record.has_thumbnail) return {false, IneligibleReason::kNoThumbnail};
  const bool has_author = std::any_of(record.authors.begin(), record.authors.end(),
                                      [](const std::string& a) { return !trim(a).empty(); });
  if (trim(record.title).empty() || !has_author || trim(record.abstract).empty() || !record.year)
    return {false, IneligibleReason::kIncompleteMetadata};
  return {};
}

std::string duplicate_key(const RecommendationItem& item) {
  std::string key = normalize_title(item.title);
  key.push_back('\x1f');
  key += normalize_title(item.authors.empty() ? std::string_view() : item.authors.front());
  return key;
}

std::vector<RecommendationItem> dedup(std::span<const RecommendationItem> items) {
  std::unordered_set<std::string> seen;
  std::vector<RecommendationItem> out;
  out.reserve(items.size());
  for (const auto& item : items) {
    if (seen.insert(duplicate_key(item)).second) out.push_back(item);
  }
  return out;
}

AssembleResult assemble(std::span<const ScoredCandidate> ranked, const AssembleOptions& options,
                        const CorpusStore& store, const BlacklistCheck& blacklisted) {
  if (options.limit < 1) throw ArgumentError("limit must be >= 1");

  AssembleResult result;
  auto& list = result.list;
  auto& drops = result.drops;
  list.reference_key = options.reference_key;
  list.scope = options.scope;
  list.index_version = options.index_version;
  list.generated_at = now_iso8601();

  std::vector<RecommendationItem> kept;
  for (const auto& candidate : ranked) {
    const DocumentRecord* record = store.find_by_id(candidate.doc_id);
    if (!record) {
      ++drops.eligibility;
      continue;
    }
    if (options.scope.repository) {
      if (record->repository_id != *options.scope.repository) {
        ++drops.scope;
        continue;
      }
    } else if (options.exclude_own_repository && options.own_repository &&
               record->repository_id == *options.own_repository) {
      ++drops.scope;
      continue;
    }
    if (options.apply_eligibility && !eligible(*record).eligible) {
      ++drops.eligibility;
      continue;
    }
    if (blacklisted && blacklisted(options.reference_key, record->id)) {
      ++drops.blacklist;
      continue;
    }
    kept.push_back({record->id, candidate.final_score, record->title, record->authors, record->year,
                    record->repository_id, record->doi});
  }

  auto unique = dedup(kept);
  drops.dedup = kept.size() - unique.size();
  if (unique.size() > options.limit) {
    drops.truncate = unique.size() - options.limit;
    unique.resize(options.limit);
  }
  list.items = std::move(unique);
  return result;
}

}  // namespace scholrec
