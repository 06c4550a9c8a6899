#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "scholrec/corpus.hpp"
#include "scholrec/evaluation.hpp"
#include "scholrec/scorer.hpp"

// Brute-force reference implementations written straight from the formulas.
// They share no code with the library beyond the record types.
namespace scholrec::oracle {

struct Scored {
  std::string id;
  double score;
};

// Whitespace-tokenized corpora only (see testing::random_corpus).
std::vector<Scored> rank(const std::vector<DocumentRecord>& docs, const DocumentRecord& query,
                         const ScoringConfig& config, int current_year);

double precision_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& rel, std::size_t k);
double recall_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& rel, std::size_t k);
double average_precision(const std::vector<std::string>& ranked, const std::set<std::string>& rel);
double ndcg_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& rel, std::size_t k);

// Node ids 0..n-1 as strings, adjacency cites[i][j].
GroundTruth citation_gt(const std::vector<std::string>& ids, const std::vector<std::vector<bool>>& cites);
GroundTruth cocitation_gt(const std::vector<std::string>& ids, const std::vector<std::vector<bool>>& cites,
                          std::size_t threshold);

// Pooled one-sided two-proportion z statistic.
double two_proportion_z(double ca, double na, double cb, double nb);

}  // namespace scholrec::oracle
