#include "scholrec/enrich.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <unordered_set>

#include "scholrec/csv.hpp"
#include "scholrec/error.hpp"
#include "scholrec/index.hpp"
#include "scholrec/text.hpp"

namespace scholrec {
namespace {

constexpr std::array<std::string_view, 6> kLanguages = {"de", "en", "es", "fr", "it", "pt"};

constexpr std::string_view kGerman[] = {
    "aber", "als",   "am",    "an",    "auch",  "auf",   "aus",   "bei",   "bis",   "das",
    "dass", "dem",   "den",   "der",   "des",   "die",   "dies",  "diese", "durch", "ein",
    "eine", "einem", "einen", "einer", "eines", "er",    "es",    "für",   "hat",   "ich",
    "ihr",  "im",    "in",    "ist",   "kann",  "mit",   "nach",  "nicht", "noch",  "nur",
    "oder", "sich",  "sie",   "sind",  "so",    "über",  "um",    "und",   "uns",   "unter",
    "vom",  "von",   "vor",   "war",   "was",   "wenn",  "werden", "wie",  "wir",   "wird",
    "wurde", "wurden", "zu",  "zum",   "zur",   "zwischen"};

constexpr std::string_view kEnglish[] = {
    "about", "after", "all",   "also",  "an",    "and",   "any",   "are",   "as",    "at",
    "be",    "been",  "but",   "by",    "can",   "could", "do",    "does",  "for",   "from",
    "had",   "has",   "have",  "he",    "her",   "his",   "how",   "if",    "in",    "into",
    "is",    "it",    "its",   "may",   "more",  "most",  "no",    "not",   "of",    "on",
    "one",   "or",    "other", "our",   "over",  "she",   "should", "so",   "some",  "such",
    "than",  "that",  "the",   "their", "them",  "then",  "there", "these", "they",  "this",
    "those", "to",    "under", "up",    "was",   "we",    "were",  "what",  "when",  "where",
    "which", "while", "who",   "will",  "with",  "would", "you",   "your"};

constexpr std::string_view kSpanish[] = {
    "al",    "como",  "con",   "de",    "del",   "el",    "en",    "entre", "es",    "esta",
    "este",  "fue",   "ha",    "han",   "la",    "las",   "le",    "les",   "lo",    "los",
    "más",   "no",    "nos",   "para",  "pero",  "por",   "que",   "se",    "sin",   "sobre",
    "son",   "su",    "sus",   "también", "un",  "una",   "uno",   "ya"};

constexpr std::string_view kFrench[] = {
    "au",    "aux",   "avec",  "ce",    "ces",   "cette", "dans",  "de",    "des",   "du",
    "elle",  "en",    "est",   "et",    "il",    "ils",   "la",    "le",    "les",   "leur",
    "mais",  "ne",    "nous",  "on",    "ou",    "par",   "pas",   "pour",  "qui",   "que",
    "sa",    "se",    "ses",   "son",   "sont",  "sur",   "un",    "une",   "vous"};

constexpr std::string_view kItalian[] = {
    "al",    "alla",  "anche", "che",   "con",   "da",    "dal",   "dei",   "del",   "della",
    "delle", "di",    "gli",   "ha",    "il",    "in",    "la",    "le",    "lo",    "ma",
    "nel",   "nella", "non",   "per",   "più",   "si",    "sono",  "su",    "sul",   "tra",
    "un",    "una",   "uno"};

constexpr std::string_view kPortuguese[] = {
    "ao",    "aos",   "as",    "com",   "como",  "da",    "das",   "de",    "do",    "dos",
    "ela",   "ele",   "em",    "entre", "essa",  "este",  "foi",   "mais",  "mas",   "na",
    "nas",   "no",    "nos",   "não",   "os",    "para",  "pela",  "pelo",  "por",   "que",
    "se",    "sem",   "seu",   "sua",   "são",   "também", "um",   "uma"};

std::span<const std::string_view> list_for(std::string_view language) {
  if (language == "de") return kGerman;
  if (language == "en") return kEnglish;
  if (language == "es") return kSpanish;
  if (language == "fr") return kFrench;
  if (language == "it") return kItalian;
  if (language == "pt") return kPortuguese;
  return {};
}

struct StopwordSets {
  std::array<std::unordered_set<std::string_view>, kLanguages.size()> per_language;
  std::unordered_set<std::string_view> any;

  StopwordSets() {
    for (std::size_t i = 0; i < kLanguages.size(); ++i) {
      for (const auto word : list_for(kLanguages[i])) {
        per_language[i].insert(word);
        any.insert(word);
      }
    }
  }
};

const StopwordSets& stopword_sets() {
  static const StopwordSets sets;
  return sets;
}

std::string key_term_text(const DocumentRecord& record) {
  std::string text = record.title;
  text.push_back(' ');
  text += record.abstract;
  if (record.has_fulltext && record.fulltext) {
    text.push_back(' ');
    text += *record.fulltext;
  }
  return text;
}

bool parse_count(const std::string& field, int64_t& out) {
  const auto text = trim(field);
  if (text.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stoll(std::string(text), &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == text.size();
}

}  // namespace

std::span<const std::string_view> supported_languages() { return kLanguages; }

std::span<const std::string_view> stopwords(std::string_view language) {
  return list_for(language);
}

bool is_stopword(std::string_view token) { return stopword_sets().any.contains(token); }

std::string infer_language(const DocumentRecord& record) {
  if (record.language && !record.language->empty()) return *record.language;

  const auto tokens = tokenize(record.title + " " + record.abstract);
  if (tokens.empty()) return "und";

  const auto& sets = stopword_sets();
  std::size_t best_hits = 0;
  std::size_t best = kLanguages.size();
  // Strict > keeps the lexicographically smallest code on ties.
  for (std::size_t i = 0; i < kLanguages.size(); ++i) {
    const auto hits = static_cast<std::size_t>(
        std::count_if(tokens.begin(), tokens.end(), [&](const std::string& t) {
          return sets.per_language[i].contains(t);
        }));
    if (hits > best_hits) {
      best_hits = hits;
      best = i;
    }
  }
  const double ratio = static_cast<double>(best_hits) / static_cast<double>(tokens.size());
  if (best == kLanguages.size() || ratio < kLanguageThreshold) return "und";
  return std::string(kLanguages[best]);
}

TermStatistics::TermStatistics(const CorpusStore& store) : doc_count_(store.size()) {
  for (const auto& record : store.records()) {
    auto tokens = tokenize(key_term_text(record));
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (auto& token : tokens) ++df_[std::move(token)];
  }
}

std::size_t TermStatistics::df(const std::string& term) const {
  const auto it = df_.find(term);
  return it == df_.end() ? 0 : it->second;
}

std::vector<std::string> extract_key_terms(const DocumentRecord& record,
                                           const TermStatistics& stats, std::size_t k) {
  if (k < 1) throw ArgumentError("k must be >= 1");

  std::unordered_map<std::string, std::size_t> tf;
  for (auto& token : tokenize(key_term_text(record))) {
    if (!is_stopword(token)) ++tf[std::move(token)];
  }

  // A record outside the statistics corpus counts itself as one extra document.
  std::vector<std::pair<double, std::string>> scored;
  for (auto& [term, count] : tf) {
    std::size_t df = stats.df(term);
    std::size_t n = stats.doc_count();
    if (df == 0) {
      df = 1;
      n += 1;
    }
    const double w = tfidf_weight(static_cast<double>(count), df, n);
    if (w > 0.0) scored.emplace_back(w, term);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (scored.size() > k) scored.resize(k);

  std::vector<std::string> terms;
  terms.reserve(scored.size());
  for (auto& entry : scored) terms.push_back(std::move(entry.second));
  return terms;
}

IndicatorFile read_indicators(std::istream& in) {
  IndicatorFile file;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("indicators file is missing its header", 1);
  const auto header = split_csv_line(line);
  const std::vector<std::string> expected = {"key", "citation_count", "download_count",
                                             "reader_count"};
  if (header != expected)
    throw ParseError("expected header key,citation_count,download_count,reader_count", 1);

  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    IndicatorRow row;
    if (fields.size() != 4 || !parse_count(fields[1], row.citation_count) ||
        !parse_count(fields[2], row.download_count) || !parse_count(fields[3], row.reader_count)) {
      ++file.malformed;
      continue;
    }
    row.key = std::string(trim(fields[0]));
    file.rows.push_back(std::move(row));
  }
  return file;
}

JoinResult join_indicators(const CorpusStore& store, std::span<const IndicatorRow> rows) {
  std::vector<DocumentRecord> records(store.records().begin(), store.records().end());
  JoinReport report;
  for (const auto& row : rows) {
    if (row.key.empty() || row.citation_count < 0 || row.download_count < 0 ||
        row.reader_count < 0) {
      ++report.rejected;
      continue;
    }
    std::vector<std::size_t> targets;
    if (const auto pos = store.position_of(row.key)) {
      targets.push_back(*pos);
    } else {
      for (const auto* hit : store.find_by_doi(row.key)) targets.push_back(*store.position_of(hit->id));
    }
    if (targets.empty()) {
      ++report.unmatched;
      continue;
    }
    ++report.matched;
    for (const auto pos : targets) {
      records[pos].citation_count = row.citation_count;
      records[pos].download_count = row.download_count;
      records[pos].reader_count = row.reader_count;
    }
  }
  return {CorpusStore::from_records(std::move(records)), report};
}

CorpusStore enrich_store(const CorpusStore& store, std::size_t key_term_count) {
  const TermStatistics stats(store);
  std::vector<DocumentRecord> records(store.records().begin(), store.records().end());
  for (auto& record : records) {
    if (!record.language || record.language->empty()) record.language = infer_language(record);
    if (!record.key_terms) record.key_terms = extract_key_terms(record, stats, key_term_count);
  }
  return CorpusStore::from_records(std::move(records));
}

}  // namespace scholrec
