#include "scholrec/corpus.hpp"

#include <fstream>
#include <unordered_set>

#include "scholrec/clock.hpp"
#include "scholrec/error.hpp"
#include "scholrec/text.hpp"

namespace scholrec {
namespace {

using nlohmann::json;

const std::unordered_set<std::string>& known_record_fields() {
  static const std::unordered_set<std::string> fields = {
      "id",           "doi",           "title",          "authors",        "abstract",
      "fulltext",     "year",          "language",       "key_terms",      "repository_id",
      "has_fulltext", "has_thumbnail", "citation_count", "download_count", "reader_count"};
  return fields;
}

bool present(const json& j, const char* key) { return j.contains(key) && !j.at(key).is_null(); }

std::string get_string(const json& j, const char* key, const std::string& path_prefix = {}) {
  const auto& v = j.at(key);
  if (!v.is_string()) throw ValidationError(std::string(key) + " must be a string", path_prefix + key);
  return v.get<std::string>();
}

std::vector<std::string> get_string_list(const json& j, const char* key,
                                         const std::string& path_prefix = {}) {
  const auto& v = j.at(key);
  if (!v.is_array()) throw ValidationError(std::string(key) + " must be an array", path_prefix + key);
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& item : v) {
    if (!item.is_string())
      throw ValidationError(std::string(key) + " entries must be strings", path_prefix + key);
    out.push_back(item.get<std::string>());
  }
  return out;
}

int get_year(const json& j, const char* key, const std::string& path_prefix = {}) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ValidationError("year must be an integer", path_prefix + key);
  return v.get<int>();
}

int64_t get_count(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ValidationError(std::string(key) + " must be an integer", key);
  const auto value = v.get<int64_t>();
  if (value < 0) throw ValidationError(std::string(key) + " must be non-negative", key);
  return value;
}

bool get_bool(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_boolean()) throw ValidationError(std::string(key) + " must be a boolean", key);
  return v.get<bool>();
}

bool fulltext_present(const std::optional<std::string>& fulltext) {
  return fulltext.has_value() && !trim(*fulltext).empty();
}

}  // namespace

void validate(const DocumentRecord& record, int current_year) {
  if (record.id.empty()) throw ValidationError("id is required", "id");
  if (record.year && (*record.year < kMinPublicationYear || *record.year > current_year + 1)) {
    throw ValidationError("year " + std::to_string(*record.year) + " outside [" +
                              std::to_string(kMinPublicationYear) + ", " +
                              std::to_string(current_year + 1) + "]",
                          "year");
  }
  if (record.citation_count < 0 || record.download_count < 0 || record.reader_count < 0)
    throw ValidationError("indicator counts must be non-negative");
  if (record.has_fulltext != fulltext_present(record.fulltext))
    throw ValidationError("has_fulltext disagrees with fulltext", "has_fulltext");
}

void validate(const ReferenceDocument& ref) {
  const bool has_id = ref.id && !ref.id->empty();
  const bool has_doi = ref.doi && !ref.doi->empty();
  const bool has_title = ref.title && !trim(*ref.title).empty();
  if (!has_id && !has_doi && !has_title)
    throw ValidationError("document needs at least one of id, doi, title", "document");
}

DocumentRecord parse_record(std::string_view line, std::size_t line_no, std::size_t* unknown_fields) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
  }
  if (!j.is_object()) throw ParseError("expected a JSON object", line_no);

  DocumentRecord r;
  if (!present(j, "id")) throw ValidationError("id is required", "id");
  r.id = get_string(j, "id");
  if (present(j, "doi")) r.doi = get_string(j, "doi");
  if (present(j, "title")) r.title = get_string(j, "title");
  if (present(j, "authors")) r.authors = get_string_list(j, "authors");
  if (present(j, "abstract")) r.abstract = get_string(j, "abstract");
  if (present(j, "fulltext")) r.fulltext = get_string(j, "fulltext");
  if (present(j, "year")) r.year = get_year(j, "year");
  if (present(j, "language")) r.language = get_string(j, "language");
  if (present(j, "key_terms")) r.key_terms = get_string_list(j, "key_terms");
  if (present(j, "repository_id")) r.repository_id = get_string(j, "repository_id");
  if (present(j, "has_thumbnail")) r.has_thumbnail = get_bool(j, "has_thumbnail");
  if (present(j, "citation_count")) r.citation_count = get_count(j, "citation_count");
  if (present(j, "download_count")) r.download_count = get_count(j, "download_count");
  if (present(j, "reader_count")) r.reader_count = get_count(j, "reader_count");
  // has_fulltext is derived; a stale input flag is not trusted.
  if (present(j, "has_fulltext")) (void)get_bool(j, "has_fulltext");
  r.has_fulltext = fulltext_present(r.fulltext);

  if (unknown_fields) {
    for (const auto& [key, _] : j.items()) {
      if (!known_record_fields().contains(key)) ++*unknown_fields;
    }
  }
  validate(r, current_year());
  return r;
}

json to_json(const DocumentRecord& r) {
  json j = json::object();
  j["id"] = r.id;
  if (r.doi) j["doi"] = *r.doi;
  j["title"] = r.title;
  j["authors"] = r.authors;
  j["abstract"] = r.abstract;
  if (r.fulltext) j["fulltext"] = *r.fulltext;
  if (r.year) j["year"] = *r.year;
  if (r.language) j["language"] = *r.language;
  if (r.key_terms) j["key_terms"] = *r.key_terms;
  j["repository_id"] = r.repository_id;
  j["has_fulltext"] = r.has_fulltext;
  j["has_thumbnail"] = r.has_thumbnail;
  j["citation_count"] = r.citation_count;
  j["download_count"] = r.download_count;
  j["reader_count"] = r.reader_count;
  return j;
}

ReferenceDocument reference_from_json(const json& j) {
  const std::string prefix = "document.";
  if (!j.is_object()) throw ValidationError("document must be an object", "document");
  ReferenceDocument ref;
  if (present(j, "id")) ref.id = get_string(j, "id", prefix);
  if (present(j, "doi")) ref.doi = get_string(j, "doi", prefix);
  if (present(j, "title")) ref.title = get_string(j, "title", prefix);
  if (present(j, "authors")) ref.authors = get_string_list(j, "authors", prefix);
  if (present(j, "abstract")) ref.abstract = get_string(j, "abstract", prefix);
  if (present(j, "year")) ref.year = get_year(j, "year", prefix);
  if (present(j, "fulltext")) ref.fulltext = get_string(j, "fulltext", prefix);
  validate(ref);
  return ref;
}

json to_json(const ReferenceDocument& ref) {
  json j = json::object();
  if (ref.id) j["id"] = *ref.id;
  if (ref.doi) j["doi"] = *ref.doi;
  if (ref.title) j["title"] = *ref.title;
  if (ref.authors) j["authors"] = *ref.authors;
  if (ref.abstract) j["abstract"] = *ref.abstract;
  if (ref.year) j["year"] = *ref.year;
  if (ref.fulltext) j["fulltext"] = *ref.fulltext;
  return j;
}

CorpusStore CorpusStore::from_records(std::vector<DocumentRecord> records) {
  CorpusStore store;
  store.records_ = std::move(records);
  store.by_id_.reserve(store.records_.size());
  for (std::size_t i = 0; i < store.records_.size(); ++i) {
    const auto& r = store.records_[i];
    if (!store.by_id_.emplace(r.id, i).second)
      throw ValidationError("duplicate id \"" + r.id + "\"", "id");
    if (r.doi && !r.doi->empty()) store.by_doi_[ascii_lower(*r.doi)].push_back(i);
    auto key = normalize_title(r.title);
    if (!key.empty()) store.by_title_[std::move(key)].push_back(i);
  }
  return store;
}

const DocumentRecord* CorpusStore::find_by_id(const std::string& id) const {
  const auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &records_[it->second];
}

std::optional<std::size_t> CorpusStore::position_of(const std::string& id) const {
  const auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::vector<const DocumentRecord*> CorpusStore::find_by_doi(std::string_view doi) const {
  std::vector<const DocumentRecord*> out;
  const auto it = by_doi_.find(ascii_lower(doi));
  if (it != by_doi_.end()) {
    for (const auto pos : it->second) out.push_back(&records_[pos]);
  }
  return out;
}

std::vector<const DocumentRecord*> CorpusStore::find_by_title_key(const std::string& key) const {
  std::vector<const DocumentRecord*> out;
  const auto it = by_title_.find(key);
  if (it != by_title_.end()) {
    for (const auto pos : it->second) out.push_back(&records_[pos]);
  }
  return out;
}

LoadedCorpus read_corpus(std::istream& in, LoadOptions options) {
  LoadedCorpus result;
  std::vector<DocumentRecord> records;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    DocumentRecord record;
    try {
      record = parse_record(line, line_no, &result.report.unknown_fields);
    } catch (const ValidationError& e) {
      if (!options.skip_invalid)
        throw ValidationError("line " + std::to_string(line_no) + ": " + e.what(), e.field());
      ++result.report.skipped;
      continue;
    } catch (const ParseError&) {
      if (!options.skip_invalid) throw;
      ++result.report.skipped;
      continue;
    }
    const auto [it, inserted] = first_line.emplace(record.id, line_no);
    if (!inserted) {
      throw ValidationError("duplicate id \"" + record.id + "\" on lines " +
                                std::to_string(it->second) + " and " + std::to_string(line_no),
                            "id");
    }
    records.push_back(std::move(record));
  }
  result.report.loaded = records.size();
  result.store = CorpusStore::from_records(std::move(records));
  return result;
}

LoadedCorpus load_corpus(const std::filesystem::path& path, LoadOptions options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file " + path.string());
  return read_corpus(in, options);
}

void write_corpus(const CorpusStore& store, std::ostream& out) {
  for (const auto& record : store.records()) out << to_json(record).dump() << '\n';
}

void write_corpus(const CorpusStore& store, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write corpus file " + path.string());
  write_corpus(store, out);
  if (!out) throw IoError("write failed for " + path.string());
}

const DocumentRecord* match_reference(const ReferenceDocument& ref, const CorpusStore& store) {
  if (ref.id && !ref.id->empty()) {
    if (const auto* hit = store.find_by_id(*ref.id)) return hit;
  }
  if (ref.doi && !ref.doi->empty()) {
    const auto hits = store.find_by_doi(*ref.doi);
    if (hits.size() == 1) return hits.front();
  }
  if (ref.title) {
    const auto key = normalize_title(*ref.title);
    if (key.empty()) return nullptr;
    const DocumentRecord* match = nullptr;
    for (const auto* candidate : store.find_by_title_key(key)) {
      if (ref.year && candidate->year && *ref.year != *candidate->year) continue;
      if (match) return nullptr;  // ambiguous
      match = candidate;
    }
    return match;
  }
  return nullptr;
}

}  // namespace scholrec
