#include "scholrec/index.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "scholrec/error.hpp"
#include "scholrec/text.hpp"

namespace scholrec {
namespace {

constexpr int kNoYear = INT_MIN;

std::atomic<uint64_t> g_last_version{0};

uint64_t next_version() { return g_last_version.fetch_add(1) + 1; }

void observe_version(uint64_t version) {
  uint64_t seen = g_last_version.load();
  while (seen < version && !g_last_version.compare_exchange_weak(seen, version)) {
  }
}

using TermCounts = std::vector<std::pair<TermId, uint32_t>>;

// Sorts ids and collapses runs into (id, count).
TermCounts run_length(std::vector<TermId>& ids) {
  std::sort(ids.begin(), ids.end());
  TermCounts counts;
  for (std::size_t i = 0; i < ids.size();) {
    std::size_t j = i;
    while (j < ids.size() && ids[j] == ids[i]) ++j;
    counts.emplace_back(ids[i], static_cast<uint32_t>(j - i));
    i = j;
  }
  return counts;
}

}  // namespace

std::string_view field_name(Field field) {
  switch (field) {
    case Field::kTitle: return "title";
    case Field::kAuthors: return "authors";
    case Field::kAbstract: return "abstract";
    case Field::kFulltext: return "fulltext";
  }
  return "unknown";
}

std::optional<Field> parse_field(std::string_view name) {
  for (const Field f : kAllFields) {
    if (field_name(f) == name) return f;
  }
  return std::nullopt;
}

FieldVector::FieldVector(std::vector<TermWeight> entries) : entries_(std::move(entries)) {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.weight * e.weight;
  norm_ = std::sqrt(sum);
}

bool FieldedVector::empty() const noexcept {
  return std::all_of(fields.begin(), fields.end(), [](const FieldVector& v) { return v.empty(); });
}

double tfidf_weight(double raw_tf, std::size_t df, std::size_t doc_count) {
  if (!(raw_tf >= 1.0)) throw ArgumentError("raw_tf must be >= 1");
  if (df < 1) throw ArgumentError("df must be >= 1");
  if (df > doc_count) throw ArgumentError("df must not exceed N");
  return (1.0 + std::log(raw_tf)) *
         std::log(static_cast<double>(doc_count) / static_cast<double>(df));
}

std::string field_text(const DocumentRecord& record, Field field) {
  switch (field) {
    case Field::kTitle: return record.title;
    case Field::kAuthors: {
      std::string joined;
      for (const auto& author : record.authors) {
        if (!joined.empty()) joined.push_back(' ');
        joined += author;
      }
      return joined;
    }
    case Field::kAbstract: return record.abstract;
    case Field::kFulltext: return record.has_fulltext ? record.fulltext.value_or("") : std::string();
  }
  return {};
}

std::optional<TermId> Index::term_id(std::string_view term) const {
  const auto it = term_ids_.find(std::string(term));
  if (it == term_ids_.end()) return std::nullopt;
  return it->second;
}

std::size_t Index::df(Field field, TermId term) const {
  const auto& table = df_[static_cast<std::size_t>(field)];
  return term < table.size() ? table[term] : 0;
}

std::span<const Posting> Index::postings(Field field, TermId term) const {
  const auto& table = postings_[static_cast<std::size_t>(field)];
  if (term >= table.size()) return {};
  return table[term];
}

std::optional<DocPos> Index::position_of(const std::string& id) const {
  const auto it = doc_positions_.find(id);
  if (it == doc_positions_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Index::doc_year(DocPos doc) const {
  const int year = doc_years_.at(doc);
  if (year == kNoYear) return std::nullopt;
  return year;
}

FieldedVector Index::vectorize(const std::array<std::string, kFieldCount>& texts) const {
  FieldedVector out;
  const std::size_t n = doc_count();
  for (const Field f : kAllFields) {
    std::vector<TermId> ids;
    for (const auto& token : tokenize(texts[static_cast<std::size_t>(f)])) {
      const auto id = term_id(token);
      if (id && df(f, *id) > 0) ids.push_back(*id);
    }
    std::vector<TermWeight> entries;
    for (const auto& [id, count] : run_length(ids)) {
      const double w = tfidf_weight(count, df(f, id), n);
      if (w != 0.0) entries.push_back({id, w});
    }
    out[f] = FieldVector(std::move(entries));
  }
  return out;
}

void Index::finalize_derived() {
  doc_positions_.clear();
  doc_positions_.reserve(doc_ids_.size());
  for (DocPos d = 0; d < doc_ids_.size(); ++d) doc_positions_.emplace(doc_ids_[d], d);
  term_ids_.clear();
  term_ids_.reserve(vocabulary_.size());
  for (TermId t = 0; t < vocabulary_.size(); ++t) term_ids_.emplace(vocabulary_[t], t);
  for (const Field f : kAllFields) {
    auto& inv = inverse_norms_[static_cast<std::size_t>(f)];
    inv.assign(doc_ids_.size(), 0.0);
    for (DocPos d = 0; d < doc_ids_.size(); ++d) {
      const double norm = vectors_[d][f].norm();
      inv[d] = norm > 0.0 ? 1.0 / norm : 0.0;
    }
  }
}

Index build_index(const CorpusStore& store) {
  Index index;
  const std::size_t n = store.size();

  // Pass 1: provisional ids in first-seen order, per-field term counts.
  std::unordered_map<std::string, TermId> provisional;
  std::vector<std::string> provisional_terms;
  std::vector<std::array<TermCounts, kFieldCount>> counts(n);
  std::vector<TermId> ids;
  for (std::size_t d = 0; d < n; ++d) {
    const auto& record = store.at(d);
    for (const Field f : kAllFields) {
      ids.clear();
      for (auto& token : tokenize(field_text(record, f))) {
        auto [it, inserted] = provisional.try_emplace(std::move(token), 0);
        if (inserted) {
          it->second = static_cast<TermId>(provisional_terms.size());
          provisional_terms.push_back(it->first);
        }
        ids.push_back(it->second);
      }
      counts[d][static_cast<std::size_t>(f)] = run_length(ids);
    }
  }

  // Pass 2: renumber terms lexicographically.
  std::vector<TermId> order(provisional_terms.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](TermId a, TermId b) {
    return provisional_terms[a] < provisional_terms[b];
  });
  std::vector<TermId> remap(order.size());
  index.vocabulary_.reserve(order.size());
  for (TermId final_id = 0; final_id < order.size(); ++final_id) {
    remap[order[final_id]] = final_id;
    index.vocabulary_.push_back(std::move(provisional_terms[order[final_id]]));
  }
  provisional.clear();

  const std::size_t vocab = index.vocabulary_.size();
  for (auto& table : index.df_) table.assign(vocab, 0);
  for (auto& doc_counts : counts) {
    for (const Field f : kAllFields) {
      auto& field_counts = doc_counts[static_cast<std::size_t>(f)];
      for (auto& entry : field_counts) entry.first = remap[entry.first];
      std::sort(field_counts.begin(), field_counts.end());
      for (const auto& entry : field_counts) ++index.df_[static_cast<std::size_t>(f)][entry.first];
    }
  }

  // Pass 3: weights, vectors and postings.
  for (auto& table : index.postings_) table.assign(vocab, {});
  index.vectors_.resize(n);
  index.doc_ids_.reserve(n);
  index.doc_years_.reserve(n);
  index.popularity_totals_.reserve(n);
  for (std::size_t d = 0; d < n; ++d) {
    const auto& record = store.at(d);
    index.doc_ids_.push_back(record.id);
    index.doc_years_.push_back(record.year.value_or(kNoYear));
    index.popularity_totals_.push_back(record.citation_count + record.download_count +
                                       record.reader_count);
    for (const Field f : kAllFields) {
      const auto fi = static_cast<std::size_t>(f);
      std::vector<TermWeight> entries;
      for (const auto& [term, tf] : counts[d][fi]) {
        const double w = tfidf_weight(tf, index.df_[fi][term], n);
        if (w == 0.0) continue;
        entries.push_back({term, w});
        index.postings_[fi][term].push_back({static_cast<DocPos>(d), w});
      }
      index.vectors_[d][f] = FieldVector(std::move(entries));
    }
    counts[d] = {};
  }

  index.finalize_derived();
  index.version_ = next_version();
  return index;
}

void write_snapshot(const Index& index, std::ostream& out) {
  using nlohmann::json;
  json j;
  j["format_version"] = kSnapshotFormatVersion;
  j["index_version"] = index.version_;
  j["N"] = index.doc_count();
  json docs = json::array();
  for (DocPos d = 0; d < index.doc_count(); ++d) {
    json doc = {{"id", index.doc_ids_[d]}, {"popularity", index.popularity_totals_[d]}};
    doc["year"] = index.doc_years_[d] == kNoYear ? json(nullptr) : json(index.doc_years_[d]);
    docs.push_back(std::move(doc));
  }
  j["documents"] = std::move(docs);
  j["vocabulary"] = index.vocabulary_;
  json fields = json::object();
  for (const Field f : kAllFields) {
    const auto fi = static_cast<std::size_t>(f);
    json postings = json::array();
    for (TermId t = 0; t < index.postings_[fi].size(); ++t) {
      const auto& list = index.postings_[fi][t];
      if (list.empty()) continue;
      json entries = json::array();
      for (const auto& p : list) entries.push_back(json::array({p.doc, p.weight}));
      postings.push_back(json::array({t, std::move(entries)}));
    }
    fields[std::string(field_name(f))] = {{"df", index.df_[fi]}, {"postings", std::move(postings)}};
  }
  j["fields"] = std::move(fields);
  out << j.dump() << '\n';
}

Index read_snapshot(std::istream& in) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed index snapshot: ") + e.what(), 1);
  }
  try {
    if (j.at("format_version").get<int>() != kSnapshotFormatVersion)
      throw ValidationError("unsupported snapshot format_version", "format_version");
    Index index;
    index.version_ = j.at("index_version").get<uint64_t>();
    const auto n = j.at("N").get<std::size_t>();
    const auto& docs = j.at("documents");
    if (docs.size() != n) throw ValidationError("documents length differs from N", "documents");
    for (const auto& doc : docs) {
      index.doc_ids_.push_back(doc.at("id").get<std::string>());
      index.popularity_totals_.push_back(doc.at("popularity").get<int64_t>());
      index.doc_years_.push_back(doc.at("year").is_null() ? kNoYear : doc.at("year").get<int>());
    }
    index.vocabulary_ = j.at("vocabulary").get<std::vector<std::string>>();
    const std::size_t vocab = index.vocabulary_.size();

    std::vector<std::array<std::vector<TermWeight>, kFieldCount>> entries(n);
    for (const Field f : kAllFields) {
      const auto fi = static_cast<std::size_t>(f);
      const auto& field = j.at("fields").at(std::string(field_name(f)));
      index.df_[fi] = field.at("df").get<std::vector<uint32_t>>();
      if (index.df_[fi].size() != vocab) throw ValidationError("df table size mismatch", "fields");
      index.postings_[fi].assign(vocab, {});
      for (const auto& row : field.at("postings")) {
        const auto term = row.at(0).get<TermId>();
        if (term >= vocab) throw ValidationError("posting term out of range", "fields");
        auto& list = index.postings_[fi][term];
        for (const auto& p : row.at(1)) {
          const Posting posting{p.at(0).get<DocPos>(), p.at(1).get<double>()};
          if (posting.doc >= n) throw ValidationError("posting doc out of range", "fields");
          list.push_back(posting);
          entries[posting.doc][fi].push_back({term, posting.weight});
        }
      }
    }
    // Postings rows are written in term order, so each entries list is already sorted.
    index.vectors_.resize(n);
    for (std::size_t d = 0; d < n; ++d) {
      for (const Field f : kAllFields) {
        index.vectors_[d][f] = FieldVector(std::move(entries[d][static_cast<std::size_t>(f)]));
      }
    }
    index.finalize_derived();
    observe_version(index.version_);
    return index;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid index snapshot: ") + e.what());
  }
}

}  // namespace scholrec
