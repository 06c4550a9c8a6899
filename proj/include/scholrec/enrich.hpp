#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scholrec/corpus.hpp"

namespace scholrec {

inline constexpr double kLanguageThreshold = 0.05;

// Languages with shipped stopword profiles, sorted by code.
std::span<const std::string_view> supported_languages();
// Empty span for an unsupported code.
std::span<const std::string_view> stopwords(std::string_view language);
// True when the token is a stopword in any shipped profile.
bool is_stopword(std::string_view token);

// The record's language when already set; otherwise the stopword profile with
// the highest hit ratio over title + abstract tokens, or "und" below threshold.
std::string infer_language(const DocumentRecord& record);

// Document frequencies over title + abstract + fulltext, one count per document.
class TermStatistics {
 public:
  explicit TermStatistics(const CorpusStore& store);

  std::size_t doc_count() const noexcept { return doc_count_; }
  std::size_t df(const std::string& term) const;

 private:
  std::size_t doc_count_ = 0;
  std::unordered_map<std::string, std::size_t> df_;
};

// Up to k non-stopword tokens by descending TF-IDF weight, ties by token.
// Zero-weight terms are never key terms. Throws ArgumentError when k < 1.
std::vector<std::string> extract_key_terms(const DocumentRecord& record,
                                           const TermStatistics& stats, std::size_t k);

struct IndicatorRow {
  std::string key;  // document id or DOI
  int64_t citation_count = 0;
  int64_t download_count = 0;
  int64_t reader_count = 0;
};

struct IndicatorFile {
  std::vector<IndicatorRow> rows;
  std::size_t malformed = 0;  // wrong arity or non-integer counts
};

// CSV with header `key,citation_count,download_count,reader_count`.
// Throws ParseError on a missing or different header.
IndicatorFile read_indicators(std::istream& in);

struct JoinReport {
  std::size_t matched = 0;
  std::size_t unmatched = 0;
  std::size_t rejected = 0;  // negative counts or empty key
};

struct JoinResult {
  CorpusStore store;
  JoinReport report;
};

// Rows resolve by id first, then DOI; counts overwrite, last row wins.
JoinResult join_indicators(const CorpusStore& store, std::span<const IndicatorRow> rows);

// Fills missing language and key_terms on every record.
CorpusStore enrich_store(const CorpusStore& store, std::size_t key_term_count);

}  // namespace scholrec
