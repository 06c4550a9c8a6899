#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace scholrec {

inline constexpr int kMinPublicationYear = 1400;

struct DocumentRecord {
  std::string id;
  std::optional<std::string> doi;
  std::string title;
  std::vector<std::string> authors;
  std::string abstract;
  std::optional<std::string> fulltext;
  std::optional<int> year;
  std::optional<std::string> language;  // ISO-639-1
  std::optional<std::vector<std::string>> key_terms;
  std::string repository_id;
  bool has_fulltext = false;
  bool has_thumbnail = false;
  int64_t citation_count = 0;
  int64_t download_count = 0;
  int64_t reader_count = 0;

  bool operator==(const DocumentRecord&) const = default;
};

// What a repository page knows about the visited item. At least one of id,
// doi and title must be present.
struct ReferenceDocument {
  std::optional<std::string> id;
  std::optional<std::string> doi;
  std::optional<std::string> title;
  std::optional<std::vector<std::string>> authors;
  std::optional<std::string> abstract;
  std::optional<int> year;
  std::optional<std::string> fulltext;

  bool operator==(const ReferenceDocument&) const = default;
};

// Throws ValidationError naming the first broken invariant.
void validate(const DocumentRecord& record, int current_year);
void validate(const ReferenceDocument& ref);

// Parses one JSON-Lines corpus row. Missing optional fields take their
// defaults and has_fulltext is derived from the fulltext text. Unknown keys are
// ignored and counted into *unknown_fields when given.
DocumentRecord parse_record(std::string_view line, std::size_t line_no = 1,
                            std::size_t* unknown_fields = nullptr);
nlohmann::json to_json(const DocumentRecord& record);

ReferenceDocument reference_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ReferenceDocument& ref);

// Immutable id-keyed document collection with DOI and title side indexes.
class CorpusStore {
 public:
  CorpusStore() = default;

  // Throws ValidationError on duplicate ids.
  static CorpusStore from_records(std::vector<DocumentRecord> records);

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  std::span<const DocumentRecord> records() const noexcept { return records_; }
  const DocumentRecord& at(std::size_t pos) const { return records_.at(pos); }

  const DocumentRecord* find_by_id(const std::string& id) const;
  std::optional<std::size_t> position_of(const std::string& id) const;
  // Case-insensitive.
  std::vector<const DocumentRecord*> find_by_doi(std::string_view doi) const;
  // Key must already be normalize_title()'d.
  std::vector<const DocumentRecord*> find_by_title_key(const std::string& key) const;

 private:
  std::vector<DocumentRecord> records_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_doi_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_title_;
};

struct LoadOptions {
  // Invalid rows are counted in `skipped` instead of aborting the load.
  // Duplicate ids are always fatal.
  bool skip_invalid = false;
};

struct LoadReport {
  std::size_t loaded = 0;
  std::size_t skipped = 0;
  std::size_t unknown_fields = 0;
};

struct LoadedCorpus {
  CorpusStore store;
  LoadReport report;
};

LoadedCorpus load_corpus(const std::filesystem::path& path, LoadOptions options = {});
LoadedCorpus read_corpus(std::istream& in, LoadOptions options = {});
void write_corpus(const CorpusStore& store, const std::filesystem::path& path);
void write_corpus(const CorpusStore& store, std::ostream& out);

// Resolution order: exact id, DOI (case-insensitive), then normalized title
// (plus year when both sides have one). Ambiguous hits resolve to nullptr.
const DocumentRecord* match_reference(const ReferenceDocument& ref, const CorpusStore& store);

}  // namespace scholrec
