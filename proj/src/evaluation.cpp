#include "scholrec/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

#include "scholrec/csv.hpp"
#include "scholrec/error.hpp"
#include "scholrec/pipeline.hpp"
#include "scholrec/text.hpp"

namespace scholrec {
namespace {

std::size_t hits_in_top(std::span<const std::string> ranked, const RelevantSet& relevant,
                        std::size_t k) {
  const std::size_t depth = std::min(k, ranked.size());
  return static_cast<std::size_t>(std::count_if(
      ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(depth),
      [&](const std::string& id) { return relevant.contains(id); }));
}

void check_k(std::size_t k) {
  if (k < 1) throw ArgumentError("k must be >= 1");
}

}  // namespace

void CitationGraph::add_edge(std::string citing, std::string cited) {
  if (citing.empty() || cited.empty()) throw ValidationError("citation ids must be non-empty");
  if (citing == cited) throw ValidationError("self-citation " + citing);
  edges_.emplace(std::move(citing), std::move(cited));
}

CitationFile read_citation_graph(std::istream& in) {
  CitationFile file;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("citation file is missing its header", 1);
  if (split_csv_line(line) != std::vector<std::string>{"citing_id", "cited_id"})
    throw ParseError("expected header citing_id,cited_id", 1);
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2 || trim(fields[0]).empty() || trim(fields[1]).empty()) {
      ++file.malformed;
      continue;
    }
    std::string citing(trim(fields[0]));
    std::string cited(trim(fields[1]));
    if (citing == cited) {
      ++file.self_edges;
      continue;
    }
    file.graph.add_edge(std::move(citing), std::move(cited));
  }
  return file;
}

GroundTruth build_citation_gt(const CitationGraph& graph) {
  GroundTruth gt;
  for (const auto& [citing, cited] : graph.edges()) {
    gt[citing].insert(cited);
    gt[cited].insert(citing);
  }
  return gt;
}

GroundTruth build_cocitation_gt(const CitationGraph& graph, std::size_t threshold) {
  if (threshold < 1) throw ArgumentError("co-citation threshold must be >= 1");
  // Edges are ordered by citing id, so each citing paper's references are contiguous.
  std::map<std::pair<std::string, std::string>, std::size_t> counts;
  const auto& edges = graph.edges();
  for (auto it = edges.begin(); it != edges.end();) {
    auto end = it;
    std::vector<const std::string*> cited;
    while (end != edges.end() && end->first == it->first) {
      cited.push_back(&end->second);
      ++end;
    }
    for (std::size_t i = 0; i < cited.size(); ++i) {
      for (std::size_t j = i + 1; j < cited.size(); ++j) ++counts[{*cited[i], *cited[j]}];
    }
    it = end;
  }
  GroundTruth gt;
  for (const auto& [pair, count] : counts) {
    if (count < threshold) continue;
    gt[pair.first].insert(pair.second);
    gt[pair.second].insert(pair.first);
  }
  return gt;
}

double precision_at_k(std::span<const std::string> ranked, const RelevantSet& relevant, std::size_t k) {
  check_k(k);
  return static_cast<double>(hits_in_top(ranked, relevant, k)) / static_cast<double>(k);
}

double recall_at_k(std::span<const std::string> ranked, const RelevantSet& relevant, std::size_t k) {
  check_k(k);
  if (relevant.empty()) throw ArgumentError("recall needs a non-empty relevant set");
  return static_cast<double>(hits_in_top(ranked, relevant, k)) / static_cast<double>(relevant.size());
}

double average_precision(std::span<const std::string> ranked, const RelevantSet& relevant) {
  if (relevant.empty()) throw ArgumentError("average precision needs a non-empty relevant set");
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (!relevant.contains(ranked[i])) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  return sum / static_cast<double>(relevant.size());
}

double ndcg_at_k(std::span<const std::string> ranked, const RelevantSet& relevant, std::size_t k) {
  check_k(k);
  double ideal = 0.0;
  for (std::size_t i = 1; i <= std::min(k, relevant.size()); ++i) ideal += 1.0 / std::log2(i + 1.0);
  if (ideal == 0.0) return 0.0;
  double dcg = 0.0;
  for (std::size_t i = 1; i <= std::min(k, ranked.size()); ++i) {
    if (relevant.contains(ranked[i - 1])) dcg += 1.0 / std::log2(i + 1.0);
  }
  return dcg / ideal;
}

MeanAveragePrecision mean_average_precision(
    std::span<const std::pair<std::vector<std::string>, RelevantSet>> runs) {
  MeanAveragePrecision result;
  double sum = 0.0;
  for (const auto& [ranked, relevant] : runs) {
    if (relevant.empty()) {
      ++result.skipped_empty;
      continue;
    }
    sum += average_precision(ranked, relevant);
    ++result.queries;
  }
  result.value = result.queries == 0 ? 0.0 : sum / static_cast<double>(result.queries);
  return result;
}

EvalReport evaluate_rankings(const GroundTruth& gt, std::span<const std::size_t> ks,
                             const Ranker& ranker) {
  if (ks.empty()) throw ArgumentError("at least one k is required");
  for (const auto k : ks) check_k(k);

  EvalReport report;
  report.ks.assign(ks.begin(), ks.end());
  std::sort(report.ks.begin(), report.ks.end());
  report.ks.erase(std::unique(report.ks.begin(), report.ks.end()), report.ks.end());

  double ap_sum = 0.0;
  std::map<std::size_t, double> p_sum, r_sum, n_sum;
  for (const auto& [query, relevant] : gt) {
    if (relevant.empty()) {
      ++report.skipped_empty;
      continue;
    }
    const auto ranked = ranker(query);
    if (!ranked) {
      ++report.skipped_unresolvable;
      continue;
    }
    QueryMetrics m;
    m.query_id = query;
    m.relevant_count = relevant.size();
    m.retrieved = ranked->size();
    for (const auto k : report.ks) {
      m.precision[k] = precision_at_k(*ranked, relevant, k);
      m.recall[k] = recall_at_k(*ranked, relevant, k);
      m.ndcg[k] = ndcg_at_k(*ranked, relevant, k);
      p_sum[k] += m.precision[k];
      r_sum[k] += m.recall[k];
      n_sum[k] += m.ndcg[k];
    }
    m.average_precision = average_precision(*ranked, relevant);
    ap_sum += m.average_precision;
    report.per_query.push_back(std::move(m));
  }

  report.query_count = report.per_query.size();
  const double n = static_cast<double>(report.query_count);
  for (const auto k : report.ks) {
    report.mean_precision[k] = report.query_count ? p_sum[k] / n : 0.0;
    report.mean_recall[k] = report.query_count ? r_sum[k] / n : 0.0;
    report.mean_ndcg[k] = report.query_count ? n_sum[k] / n : 0.0;
  }
  report.map = report.query_count ? ap_sum / n : 0.0;
  return report;
}

EvalReport run_offline_eval(const CorpusStore& store, const Index& index,
                            const ScoringConfig& config, const GroundTruth& gt,
                            std::span<const std::size_t> ks, OfflineEvalOptions options) {
  validate(config);
  const std::size_t depth = ks.empty() ? 1 : *std::max_element(ks.begin(), ks.end());
  const Ranker cbf = [&](const std::string& query) -> std::optional<std::vector<std::string>> {
    const DocumentRecord* record = store.find_by_id(query);
    if (!record) return std::nullopt;
    ReferenceDocument ref;
    ref.id = record->id;
    const auto q = query_vector(ref, record, index);
    const auto ranked = rank(q, record->year, index, config, {record->id});
    AssembleOptions assemble_options;
    assemble_options.scope = Scope::global();
    assemble_options.limit = std::max<std::size_t>(depth, 1);
    assemble_options.reference_key = record->id;
    assemble_options.index_version = index.version();
    assemble_options.apply_eligibility = options.apply_eligibility;
    const auto assembled = assemble(ranked, assemble_options, store, BlacklistCheck{});
    std::vector<std::string> ids;
    ids.reserve(assembled.list.items.size());
    for (const auto& item : assembled.list.items) ids.push_back(item.doc_id);
    return ids;
  };
  EvalReport report = evaluate_rankings(gt, ks, cbf);
  report.config = to_json(config);
  report.config_fingerprint = fingerprint(config);
  return report;
}

Ranker random_ranker(const CorpusStore& store, std::size_t depth, uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return [&store, depth, rng](const std::string& query) -> std::optional<std::vector<std::string>> {
    if (!store.find_by_id(query)) return std::nullopt;
    std::vector<std::string> ids;
    ids.reserve(store.size());
    for (const auto& record : store.records()) {
      if (record.id != query) ids.push_back(record.id);
    }
    std::shuffle(ids.begin(), ids.end(), *rng);
    if (ids.size() > depth) ids.resize(depth);
    return ids;
  };
}

nlohmann::json to_json(const EvalReport& report) {
  using nlohmann::json;
  auto by_k = [](const std::map<std::size_t, double>& values) {
    json j = json::object();
    for (const auto& [k, v] : values) j[std::to_string(k)] = v;
    return j;
  };
  json per_query = json::array();
  for (const auto& m : report.per_query) {
    per_query.push_back({{"query_id", m.query_id},
                         {"relevant", m.relevant_count},
                         {"retrieved", m.retrieved},
                         {"average_precision", m.average_precision},
                         {"precision", by_k(m.precision)},
                         {"recall", by_k(m.recall)},
                         {"ndcg", by_k(m.ndcg)}});
  }
  return {{"ks", report.ks},
          {"query_count", report.query_count},
          {"skipped_unresolvable", report.skipped_unresolvable},
          {"skipped_empty", report.skipped_empty},
          {"map", report.map},
          {"precision", by_k(report.mean_precision)},
          {"recall", by_k(report.mean_recall)},
          {"ndcg", by_k(report.mean_ndcg)},
          {"config", report.config},
          {"config_fingerprint", report.config_fingerprint},
          {"per_query", per_query}};
}

void write_per_query_csv(const EvalReport& report, std::ostream& out) {
  out << "query_id,relevant,retrieved,ap";
  for (const auto k : report.ks) out << ",p@" << k;
  for (const auto k : report.ks) out << ",r@" << k;
  for (const auto k : report.ks) out << ",ndcg@" << k;
  out << '\n';
  const auto old_precision = out.precision(17);
  for (const auto& m : report.per_query) {
    std::string id = m.query_id;
    if (id.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (const char c : id) {
        if (c == '"') quoted.push_back('"');
        quoted.push_back(c);
      }
      id = quoted + "\"";
    }
    out << id << ',' << m.relevant_count << ',' << m.retrieved << ',' << m.average_precision;
    for (const auto k : report.ks) out << ',' << m.precision.at(k);
    for (const auto k : report.ks) out << ',' << m.recall.at(k);
    for (const auto k : report.ks) out << ',' << m.ndcg.at(k);
    out << '\n';
  }
  out.precision(old_precision);
}

std::optional<CtrGrouping> parse_ctr_grouping(std::string_view name) {
  if (name == "item") return CtrGrouping::kItem;
  if (name == "list") return CtrGrouping::kList;
  if (name == "variant") return CtrGrouping::kVariant;
  return std::nullopt;
}

std::string_view to_string(CtrGrouping grouping) {
  switch (grouping) {
    case CtrGrouping::kItem: return "item";
    case CtrGrouping::kList: return "list";
    case CtrGrouping::kVariant: return "variant";
  }
  return "item";
}

CtrReport compute_ctr(std::span<const InteractionEvent> events, CtrGrouping group_by) {
  CtrReport report;
  report.group_by = group_by;
  std::set<std::pair<std::string, std::string>> impressed;
  auto group_of = [&](const InteractionEvent& e) -> std::string {
    switch (group_by) {
      case CtrGrouping::kItem: return e.doc_id;
      case CtrGrouping::kList: return e.source_doc_id.value_or(std::string(kUngrouped));
      case CtrGrouping::kVariant: return e.variant.value_or(std::string(kUngrouped));
    }
    return e.doc_id;
  };
  for (const auto& e : events) {
    if (e.kind == EventKind::kImpression) {
      impressed.emplace(e.user_hash, e.doc_id);
      ++report.groups[group_of(e)].impressions;
    } else if (impressed.contains({e.user_hash, e.doc_id})) {
      ++report.groups[group_of(e)].clicks;
    } else {
      ++report.orphan_clicks;
    }
  }
  for (auto& [_, group] : report.groups) {
    if (group.impressions > 0)
      group.rate = static_cast<double>(group.clicks) / static_cast<double>(group.impressions);
  }
  return report;
}

nlohmann::json to_json(const CtrReport& report) {
  using nlohmann::json;
  json groups = json::object();
  for (const auto& [key, g] : report.groups) {
    groups[key] = {{"impressions", g.impressions},
                   {"clicks", g.clicks},
                   {"ctr", g.rate ? json(*g.rate) : json(nullptr)}};
  }
  return {{"group_by", to_string(report.group_by)},
          {"groups", groups},
          {"orphan_clicks", report.orphan_clicks}};
}

AbResult ab_significance(int64_t clicks_a, int64_t impressions_a, int64_t clicks_b,
                         int64_t impressions_b, double alpha) {
  if (impressions_a < 1 || impressions_b < 1) throw ArgumentError("impressions must be >= 1");
  if (clicks_a < 0 || clicks_b < 0) throw ArgumentError("clicks must be non-negative");
  if (clicks_a > impressions_a || clicks_b > impressions_b)
    throw ArgumentError("clicks cannot exceed impressions");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0, 1)");

  const double na = static_cast<double>(impressions_a);
  const double nb = static_cast<double>(impressions_b);
  AbResult r;
  r.ctr_a = static_cast<double>(clicks_a) / na;
  r.ctr_b = static_cast<double>(clicks_b) / nb;
  const double pooled = static_cast<double>(clicks_a + clicks_b) / (na + nb);
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb));
  // Zero variance means both arms are all-0 or all-1: no evidence either way.
  r.z = se > 0.0 ? (r.ctr_b - r.ctr_a) / se : 0.0;
  r.p_value = 0.5 * std::erfc(r.z / std::sqrt(2.0));
  r.significant = r.p_value < alpha;
  return r;
}

nlohmann::json to_json(const AbResult& r) {
  return {{"ctr_a", r.ctr_a},
          {"ctr_b", r.ctr_b},
          {"z", r.z},
          {"p_value", r.p_value},
          {"significant", r.significant}};
}

}  // namespace scholrec
