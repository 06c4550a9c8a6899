#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "scholrec/corpus.hpp"
#include "scholrec/index.hpp"
#include "scholrec/lru_cache.hpp"

namespace scholrec {

struct ScoringConfig {
  // Indexed by Field: title, authors, abstract, fulltext.
  std::array<double, kFieldCount> field_boosts = {3.0, 0.5, 2.0, 1.0};
  double decay_half_life_years = 5.0;
  double popularity_beta = 0.1;
  std::size_t candidate_pool_size = 200;
  std::size_t cache_capacity = 1024;

  double boost(Field f) const { return field_boosts[static_cast<std::size_t>(f)]; }
  double& boost(Field f) { return field_boosts[static_cast<std::size_t>(f)]; }

  bool operator==(const ScoringConfig&) const = default;
};

// Throws ValidationError: negative boost, all boosts zero, non-positive
// half-life, negative beta, zero pool or cache size.
void validate(const ScoringConfig& config);

nlohmann::json to_json(const ScoringConfig& config);
// Missing keys keep their defaults; result is validated.
ScoringConfig scoring_config_from_json(const nlohmann::json& j, ScoringConfig base = {});
// Stable hash of the canonical JSON form.
std::string fingerprint(const ScoringConfig& config);

struct ScoredCandidate {
  DocPos doc = 0;
  std::string doc_id;
  double text_score = 0.0;
  double decay_factor = 1.0;
  double popularity_factor = 1.0;
  double final_score = 0.0;

  bool operator==(const ScoredCandidate&) const = default;
};

// Query vector for a reference document. A reference matched into the index
// reuses the indexed vector (fulltext included); otherwise only the metadata
// the caller supplied is vectorized. An empty result is the empty-query case.
FieldedVector query_vector(const ReferenceDocument& ref, const DocumentRecord* matched,
                           const Index& index);

// Sum over fields of boost * cos(q_f, d_f); an empty side contributes 0.
double fielded_cosine(const FieldedVector& q, const FieldedVector& d,
                      const std::array<double, kFieldCount>& boosts);

// 2^(-max(0, anchor - doc_year) / half_life), with anchor = query_year or
// fallback_year. Unknown doc_year costs one half-life.
double decay_factor(std::optional<int> query_year, std::optional<int> doc_year, double half_life,
                    int fallback_year);
double decay_factor(std::optional<int> query_year, std::optional<int> doc_year, double half_life);

// 1 + beta * log10(1 + citations + downloads + readers).
double popularity_factor(int64_t citations, int64_t downloads, int64_t readers, double beta);

// Every document sharing a weighted term with the query, scored as
// text * decay * popularity, sorted by final score desc then id asc, cut to
// candidate_pool_size. Excluded ids never appear.
std::vector<ScoredCandidate> rank(const FieldedVector& query, std::optional<int> ref_year,
                                  const Index& index, const ScoringConfig& config,
                                  const std::unordered_set<std::string>& exclude);

using RankedList = std::shared_ptr<const std::vector<ScoredCandidate>>;

struct RankKey {
  std::string reference_key;
  std::string scope;
  std::size_t limit = 0;
  uint64_t index_version = 0;

  bool operator==(const RankKey&) const = default;
};

struct RankKeyHash {
  std::size_t operator()(const RankKey& key) const noexcept;
};

using RankCache = LruCache<RankKey, RankedList, RankKeyHash>;

RankedList cached_rank(RankCache& cache, const RankKey& key, const FieldedVector& query,
                       std::optional<int> ref_year, const Index& index,
                       const ScoringConfig& config,
                       const std::unordered_set<std::string>& exclude);

}  // namespace scholrec
