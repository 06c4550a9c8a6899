#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scholrec/corpus.hpp"
#include "scholrec/scorer.hpp"

namespace scholrec {

// Either every repository (global) or one repository.
struct Scope {
  std::optional<std::string> repository;

  static Scope global() { return {}; }
  static Scope of_repository(std::string id) { return {std::move(id)}; }
  bool is_global() const noexcept { return !repository.has_value(); }
  // "global" or "repository:<id>"
  std::string to_string() const;

  bool operator==(const Scope&) const = default;
};

enum class IneligibleReason { kNoFulltext, kNoThumbnail, kIncompleteMetadata };

std::string_view reason_code(IneligibleReason reason);

struct Eligibility {
  bool eligible = true;
  std::optional<IneligibleReason> reason;  // first failing check
};

// Open-access fulltext, a thumbnail, and title + author + abstract + year.
Eligibility eligible(const DocumentRecord& record);

struct RecommendationItem {
  std::string doc_id;
  double final_score = 0.0;
  std::string title;
  std::vector<std::string> authors;
  std::optional<int> year;
  std::string repository_id;
  std::optional<std::string> doi;

  bool operator==(const RecommendationItem&) const = default;
};

struct RecommendationList {
  std::string reference_key;
  Scope scope;
  std::vector<RecommendationItem> items;
  std::string generated_at;
  uint64_t index_version = 0;
};

// Duplicate key: normalized title plus normalized first author.
std::string duplicate_key(const RecommendationItem& item);

// Keeps the first item per duplicate key; survivor order is preserved.
std::vector<RecommendationItem> dedup(std::span<const RecommendationItem> items);

// (reference_key, doc_id) -> true when the item must not be shown.
using BlacklistCheck = std::function<bool(const std::string&, const std::string&)>;

struct AssembleOptions {
  Scope scope;
  std::size_t limit = 5;
  std::string reference_key;
  uint64_t index_version = 0;
  bool apply_eligibility = true;
  // Global scope only: drop items from own_repository.
  bool exclude_own_repository = false;
  std::optional<std::string> own_repository;
};

struct StageDrops {
  std::size_t scope = 0;
  std::size_t eligibility = 0;
  std::size_t blacklist = 0;
  std::size_t dedup = 0;
  std::size_t truncate = 0;

  std::size_t total() const noexcept { return scope + eligibility + blacklist + dedup + truncate; }
};

struct AssembleResult {
  RecommendationList list;
  StageDrops drops;
};

// scope -> eligibility -> blacklist -> dedup -> truncate. An empty
// BlacklistCheck disables the blacklist stage. Throws ArgumentError when limit < 1.
AssembleResult assemble(std::span<const ScoredCandidate> ranked, const AssembleOptions& options,
                        const CorpusStore& store, const BlacklistCheck& blacklisted);

}  // namespace scholrec
