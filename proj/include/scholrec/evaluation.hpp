#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "scholrec/corpus.hpp"
#include "scholrec/feedback.hpp"
#include "scholrec/index.hpp"
#include "scholrec/scorer.hpp"

namespace scholrec {

// Directed citing -> cited edges, no self-citations.
class CitationGraph {
 public:
  using Edge = std::pair<std::string, std::string>;

  // Throws ValidationError for empty ids or citing == cited. Duplicates collapse.
  void add_edge(std::string citing, std::string cited);
  const std::set<Edge>& edges() const noexcept { return edges_; }
  std::size_t size() const noexcept { return edges_.size(); }

 private:
  std::set<Edge> edges_;
};

struct CitationFile {
  CitationGraph graph;
  std::size_t self_edges = 0;
  std::size_t malformed = 0;
};

// CSV with header `citing_id,cited_id`.
CitationFile read_citation_graph(std::istream& in);

using RelevantSet = std::set<std::string>;
using GroundTruth = std::map<std::string, RelevantSet>;

// Symmetric closure of the citation relation.
GroundTruth build_citation_gt(const CitationGraph& graph);
// X and Y are mutually relevant when at least `threshold` papers cite both.
GroundTruth build_cocitation_gt(const CitationGraph& graph, std::size_t threshold);

inline constexpr std::size_t kDefaultCocitationThreshold = 2;

// |top-k ∩ relevant| / k; k stays the denominator even for short rankings.
double precision_at_k(std::span<const std::string> ranked, const RelevantSet& relevant, std::size_t k);
// |top-k ∩ relevant| / |relevant|. Throws ArgumentError when relevant is empty.
double recall_at_k(std::span<const std::string> ranked, const RelevantSet& relevant, std::size_t k);
// Mean of precision at each relevant hit, over |relevant|. Throws on empty relevant.
double average_precision(std::span<const std::string> ranked, const RelevantSet& relevant);
// Binary-gain NDCG@k; 0 when relevant is empty.
double ndcg_at_k(std::span<const std::string> ranked, const RelevantSet& relevant, std::size_t k);

struct MeanAveragePrecision {
  double value = 0.0;
  std::size_t queries = 0;
  std::size_t skipped_empty = 0;
};

MeanAveragePrecision mean_average_precision(
    std::span<const std::pair<std::vector<std::string>, RelevantSet>> runs);

struct QueryMetrics {
  std::string query_id;
  std::size_t relevant_count = 0;
  std::size_t retrieved = 0;
  std::map<std::size_t, double> precision;
  std::map<std::size_t, double> recall;
  std::map<std::size_t, double> ndcg;
  double average_precision = 0.0;
};

struct EvalReport {
  std::vector<std::size_t> ks;
  std::vector<QueryMetrics> per_query;
  std::map<std::size_t, double> mean_precision;
  std::map<std::size_t, double> mean_recall;
  std::map<std::size_t, double> mean_ndcg;
  double map = 0.0;
  std::size_t query_count = 0;
  std::size_t skipped_unresolvable = 0;
  std::size_t skipped_empty = 0;
  nlohmann::json config;  // the exact ScoringConfig used, when any
  std::string config_fingerprint;
};

nlohmann::json to_json(const EvalReport& report);
// One row per query: query_id,relevant,retrieved,ap,p@k...,r@k...,ndcg@k...
void write_per_query_csv(const EvalReport& report, std::ostream& out);

// Returns the ranked ids for a query, or nullopt when the query cannot be resolved.
using Ranker = std::function<std::optional<std::vector<std::string>>(const std::string& query_id)>;

// Scores every ground-truth query with `ranker`. Throws ArgumentError on an empty
// ks list or any k < 1.
EvalReport evaluate_rankings(const GroundTruth& gt, std::span<const std::size_t> ks,
                             const Ranker& ranker);

struct OfflineEvalOptions {
  bool apply_eligibility = true;
};

// Content-based recommendations per query (global scope, no blacklist), top max(ks).
EvalReport run_offline_eval(const CorpusStore& store, const Index& index,
                            const ScoringConfig& config, const GroundTruth& gt,
                            std::span<const std::size_t> ks, OfflineEvalOptions options = {});

// Baseline: a seeded random permutation of the corpus minus the query.
Ranker random_ranker(const CorpusStore& store, std::size_t depth, uint64_t seed);

enum class CtrGrouping { kItem, kList, kVariant };

std::optional<CtrGrouping> parse_ctr_grouping(std::string_view name);
std::string_view to_string(CtrGrouping grouping);

struct CtrGroup {
  std::size_t impressions = 0;
  std::size_t clicks = 0;
  std::optional<double> rate;  // undefined without impressions
};

struct CtrReport {
  CtrGrouping group_by = CtrGrouping::kItem;
  std::map<std::string, CtrGroup> groups;
  std::size_t orphan_clicks = 0;
};

inline constexpr std::string_view kUngrouped = "(none)";

// Clicks / impressions per group. A click counts only after an impression of
// the same (user_hash, doc_id) earlier in the sequence.
CtrReport compute_ctr(std::span<const InteractionEvent> events, CtrGrouping group_by);
nlohmann::json to_json(const CtrReport& report);

struct AbResult {
  double ctr_a = 0.0;
  double ctr_b = 0.0;
  double z = 0.0;
  double p_value = 0.5;
  bool significant = false;
};

// Pooled two-proportion z-test of H1: CTR_b > CTR_a.
AbResult ab_significance(int64_t clicks_a, int64_t impressions_a, int64_t clicks_b,
                         int64_t impressions_b, double alpha = 0.05);
nlohmann::json to_json(const AbResult& result);

}  // namespace scholrec
