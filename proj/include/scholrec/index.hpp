#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scholrec/corpus.hpp"

namespace scholrec {

enum class Field : uint8_t { kTitle = 0, kAuthors = 1, kAbstract = 2, kFulltext = 3 };

inline constexpr std::size_t kFieldCount = 4;
inline constexpr std::array<Field, kFieldCount> kAllFields = {Field::kTitle, Field::kAuthors,
                                                               Field::kAbstract, Field::kFulltext};

std::string_view field_name(Field field);
std::optional<Field> parse_field(std::string_view name);

using TermId = uint32_t;
using DocPos = uint32_t;

struct TermWeight {
  TermId term;
  double weight;

  bool operator==(const TermWeight&) const = default;
};

// Sparse term-weight vector for one field, sorted by term id, zero weights
// never stored. The cached L2 norm is summed in term order.
class FieldVector {
 public:
  FieldVector() = default;
  explicit FieldVector(std::vector<TermWeight> entries);

  std::span<const TermWeight> entries() const noexcept { return entries_; }
  double norm() const noexcept { return norm_; }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }

  bool operator==(const FieldVector&) const = default;

 private:
  std::vector<TermWeight> entries_;
  double norm_ = 0.0;
};

struct FieldedVector {
  std::array<FieldVector, kFieldCount> fields;

  const FieldVector& operator[](Field f) const { return fields[static_cast<std::size_t>(f)]; }
  FieldVector& operator[](Field f) { return fields[static_cast<std::size_t>(f)]; }
  bool empty() const noexcept;

  bool operator==(const FieldedVector&) const = default;
};

// (1 + ln tf) * ln(N / df). tf may be fractional but must be >= 1.
// Throws ArgumentError when tf < 1, df < 1 or df > N.
double tfidf_weight(double raw_tf, std::size_t df, std::size_t doc_count);

// Text the index sees for one field: authors are space-joined, fulltext is
// empty unless has_fulltext.
std::string field_text(const DocumentRecord& record, Field field);

struct Posting {
  DocPos doc;
  double weight;

  bool operator==(const Posting&) const = default;
};

// Immutable fielded inverted index. Term ids follow byte-wise lexicographic
// order of the vocabulary, so iteration in id order is alphabetical.
class Index {
 public:
  Index() = default;

  std::size_t doc_count() const noexcept { return doc_ids_.size(); }
  uint64_t version() const noexcept { return version_; }
  std::size_t vocabulary_size() const noexcept { return vocabulary_.size(); }

  std::optional<TermId> term_id(std::string_view term) const;
  const std::string& term(TermId id) const { return vocabulary_.at(id); }

  std::size_t df(Field field, TermId term) const;
  std::span<const Posting> postings(Field field, TermId term) const;

  const std::string& doc_id(DocPos doc) const { return doc_ids_.at(doc); }
  std::optional<DocPos> position_of(const std::string& id) const;
  const FieldedVector& document_vector(DocPos doc) const { return vectors_.at(doc); }
  // 1 / ||d_f||, 0 for an empty field.
  double inverse_norm(Field field, DocPos doc) const {
    return inverse_norms_[static_cast<std::size_t>(field)][doc];
  }
  std::optional<int> doc_year(DocPos doc) const;
  int64_t popularity_total(DocPos doc) const { return popularity_totals_.at(doc); }

  // TF-IDF vector for free text per field using this index's df / N. Unknown
  // terms and terms absent from a field's vocabulary are dropped.
  FieldedVector vectorize(const std::array<std::string, kFieldCount>& texts) const;

  friend Index build_index(const CorpusStore& store);
  friend void write_snapshot(const Index& index, std::ostream& out);
  friend Index read_snapshot(std::istream& in);

 private:
  void finalize_derived();

  uint64_t version_ = 0;
  std::vector<std::string> vocabulary_;
  std::unordered_map<std::string, TermId> term_ids_;
  std::array<std::vector<uint32_t>, kFieldCount> df_;
  std::array<std::vector<std::vector<Posting>>, kFieldCount> postings_;
  std::vector<std::string> doc_ids_;
  std::unordered_map<std::string, DocPos> doc_positions_;
  std::vector<int> doc_years_;  // kNoYear when absent
  std::vector<int64_t> popularity_totals_;
  std::vector<FieldedVector> vectors_;
  std::array<std::vector<double>, kFieldCount> inverse_norms_;
};

Index build_index(const CorpusStore& store);

// JSON snapshot: {format_version, index_version, N, documents, vocabulary,
// fields{name: {df, postings}}}. Reading reproduces the in-memory index exactly.
void write_snapshot(const Index& index, std::ostream& out);
Index read_snapshot(std::istream& in);

inline constexpr int kSnapshotFormatVersion = 1;

}  // namespace scholrec
