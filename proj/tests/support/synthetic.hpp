#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "scholrec/corpus.hpp"
#include "scholrec/evaluation.hpp"

namespace scholrec::testing {

// Word number i of a synthetic vocabulary: "wa", "wb", ..., "wza", ...
std::string vocab_word(std::size_t i);

struct RandomCorpusSpec {
  std::size_t docs = 100;
  std::size_t vocabulary = 50;
  std::size_t repositories = 3;
  double fulltext_rate = 0.7;
  double thumbnail_rate = 0.8;
  double year_rate = 0.9;
  double doi_rate = 0.5;
  double duplicate_rate = 0.05;  // copies title + first author of an earlier doc
};

// Documents are space-separated words from the synthetic vocabulary, so a
// plain whitespace split reproduces the tokenizer.
std::vector<DocumentRecord> random_corpus(std::mt19937_64& rng, const RandomCorpusSpec& spec);

struct ClusteredCorpus {
  std::vector<DocumentRecord> records;
  CitationGraph citations;
};

// `topics` clusters with private vocabularies over a shared background; each
// paper cites a few papers from its own cluster.
ClusteredCorpus clustered_corpus(uint64_t seed, std::size_t docs, std::size_t topics);

DocumentRecord make_doc(std::string id, std::string title, std::vector<std::string> authors,
                        std::string abstract, std::optional<int> year,
                        std::string repository = "repo-a");

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& tag);

}  // namespace scholrec::testing
