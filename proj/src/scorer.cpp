#include "scholrec/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "scholrec/clock.hpp"
#include "scholrec/error.hpp"
#include "scholrec/text.hpp"

namespace scholrec {
namespace {

// Per-thread accumulators sized to the largest index seen by this thread.
struct Scratch {
  std::array<std::vector<double>, kFieldCount> dot;
  std::vector<uint8_t> seen;
  std::vector<DocPos> touched;

  void prepare(std::size_t n) {
    if (seen.size() < n) {
      for (auto& d : dot) d.assign(n, 0.0);
      seen.assign(n, 0);
    }
    touched.clear();
  }

  void reset() {
    for (const DocPos d : touched) {
      for (auto& acc : dot) acc[d] = 0.0;
      seen[d] = 0;
    }
    touched.clear();
  }
};

double dot_product(const FieldVector& a, const FieldVector& b) {
  const auto x = a.entries();
  const auto y = b.entries();
  double sum = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i].term == y[j].term) {
      sum += x[i].weight * y[j].weight;
      ++i;
      ++j;
    } else if (x[i].term < y[j].term) {
      ++i;
    } else {
      ++j;
    }
  }
  return sum;
}

}  // namespace

void validate(const ScoringConfig& config) {
  bool any_positive = false;
  for (const Field f : kAllFields) {
    const double b = config.boost(f);
    if (!(b >= 0.0) || !std::isfinite(b))
      throw ValidationError("boost must be a finite non-negative number",
                            "field_boosts." + std::string(field_name(f)));
    any_positive = any_positive || b > 0.0;
  }
  if (!any_positive) throw ValidationError("at least one field boost must be positive", "field_boosts");
  if (!(config.decay_half_life_years > 0.0) || !std::isfinite(config.decay_half_life_years))
    throw ValidationError("half-life must be positive", "decay_half_life_years");
  if (!(config.popularity_beta >= 0.0) || !std::isfinite(config.popularity_beta))
    throw ValidationError("popularity_beta must be non-negative", "popularity_beta");
  if (config.candidate_pool_size < 1)
    throw ValidationError("candidate_pool_size must be positive", "candidate_pool_size");
  if (config.cache_capacity < 1)
    throw ValidationError("cache_capacity must be positive", "cache_capacity");
}

nlohmann::json to_json(const ScoringConfig& config) {
  nlohmann::json boosts = nlohmann::json::object();
  for (const Field f : kAllFields) boosts[std::string(field_name(f))] = config.boost(f);
  return {{"field_boosts", boosts},
          {"decay_half_life_years", config.decay_half_life_years},
          {"popularity_beta", config.popularity_beta},
          {"candidate_pool_size", config.candidate_pool_size},
          {"cache_capacity", config.cache_capacity}};
}

ScoringConfig scoring_config_from_json(const nlohmann::json& j, ScoringConfig base) {
  if (!j.is_object()) throw ValidationError("scoring config must be an object");
  auto number = [&](const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw ValidationError(std::string(key) + " must be a number", key);
    return v.get<double>();
  };
  auto positive_int = [&](const char* key) {
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<int64_t>() < 1)
      throw ValidationError(std::string(key) + " must be a positive integer", key);
    return v.get<std::size_t>();
  };
  if (j.contains("field_boosts")) {
    const auto& boosts = j.at("field_boosts");
    if (!boosts.is_object()) throw ValidationError("field_boosts must be an object", "field_boosts");
    for (const auto& [name, value] : boosts.items()) {
      const auto field = parse_field(name);
      if (!field) throw ValidationError("unknown field " + name, "field_boosts." + name);
      if (!value.is_number()) throw ValidationError("boost must be a number", "field_boosts." + name);
      base.boost(*field) = value.get<double>();
    }
  }
  if (j.contains("decay_half_life_years")) base.decay_half_life_years = number("decay_half_life_years");
  if (j.contains("popularity_beta")) base.popularity_beta = number("popularity_beta");
  if (j.contains("candidate_pool_size")) base.candidate_pool_size = positive_int("candidate_pool_size");
  if (j.contains("cache_capacity")) base.cache_capacity = positive_int("cache_capacity");
  validate(base);
  return base;
}

std::string fingerprint(const ScoringConfig& config) { return fnv1a_hex(to_json(config).dump()); }

FieldedVector query_vector(const ReferenceDocument& ref, const DocumentRecord* matched,
                           const Index& index) {
  if (matched) {
    if (const auto pos = index.position_of(matched->id)) return index.document_vector(*pos);
    std::array<std::string, kFieldCount> texts;
    for (const Field f : kAllFields) texts[static_cast<std::size_t>(f)] = field_text(*matched, f);
    return index.vectorize(texts);
  }
  std::array<std::string, kFieldCount> texts;
  texts[static_cast<std::size_t>(Field::kTitle)] = ref.title.value_or("");
  if (ref.authors) {
    DocumentRecord tmp;
    tmp.authors = *ref.authors;
    texts[static_cast<std::size_t>(Field::kAuthors)] = field_text(tmp, Field::kAuthors);
  }
  texts[static_cast<std::size_t>(Field::kAbstract)] = ref.abstract.value_or("");
  texts[static_cast<std::size_t>(Field::kFulltext)] = ref.fulltext.value_or("");
  return index.vectorize(texts);
}

double fielded_cosine(const FieldedVector& q, const FieldedVector& d,
                      const std::array<double, kFieldCount>& boosts) {
  double score = 0.0;
  for (const Field f : kAllFields) {
    const auto& qf = q[f];
    const auto& df = d[f];
    if (qf.empty() || df.empty()) continue;
    const double cosine = dot_product(qf, df) / (qf.norm() * df.norm());
    score += boosts[static_cast<std::size_t>(f)] * cosine;
  }
  return score;
}

double decay_factor(std::optional<int> query_year, std::optional<int> doc_year, double half_life,
                    int fallback_year) {
  if (!(half_life > 0.0)) throw ArgumentError("half_life must be positive");
  if (!doc_year) return 0.5;
  const int anchor = query_year.value_or(fallback_year);
  const int delta = std::max(0, anchor - *doc_year);
  return std::exp2(-static_cast<double>(delta) / half_life);
}

double decay_factor(std::optional<int> query_year, std::optional<int> doc_year, double half_life) {
  return decay_factor(query_year, doc_year, half_life, current_year());
}

double popularity_factor(int64_t citations, int64_t downloads, int64_t readers, double beta) {
  if (citations < 0 || downloads < 0 || readers < 0)
    throw ArgumentError("indicator counts must be non-negative");
  if (beta < 0.0) throw ArgumentError("beta must be non-negative");
  const double total =
      static_cast<double>(citations) + static_cast<double>(downloads) + static_cast<double>(readers);
  return 1.0 + beta * std::log10(1.0 + total);
}

std::vector<ScoredCandidate> rank(const FieldedVector& query, std::optional<int> ref_year,
                                  const Index& index, const ScoringConfig& config,
                                  const std::unordered_set<std::string>& exclude) {
  if (query.empty() || index.doc_count() == 0) return {};

  thread_local Scratch scratch;
  scratch.prepare(index.doc_count());

  // Accumulate per-field dot products in ascending term order.
  for (const Field f : kAllFields) {
    const auto fi = static_cast<std::size_t>(f);
    if (config.field_boosts[fi] == 0.0) continue;
    auto& acc = scratch.dot[fi];
    for (const auto& qt : query[f].entries()) {
      for (const auto& posting : index.postings(f, qt.term)) {
        acc[posting.doc] += qt.weight * posting.weight;
        if (!scratch.seen[posting.doc]) {
          scratch.seen[posting.doc] = 1;
          scratch.touched.push_back(posting.doc);
        }
      }
    }
  }

  std::vector<DocPos> excluded;
  for (const auto& id : exclude) {
    if (const auto pos = index.position_of(id)) excluded.push_back(*pos);
  }
  std::sort(excluded.begin(), excluded.end());

  const int fallback_year = current_year();
  struct Scored {
    DocPos doc;
    double text;
    double decay;
    double popularity;
    double final_score;
  };
  std::vector<Scored> scored;
  scored.reserve(scratch.touched.size());
  for (const DocPos d : scratch.touched) {
    if (std::binary_search(excluded.begin(), excluded.end(), d)) continue;
    const auto& dv = index.document_vector(d);
    double text = 0.0;
    for (const Field f : kAllFields) {
      const auto fi = static_cast<std::size_t>(f);
      const double dot = scratch.dot[fi][d];
      if (dot == 0.0) continue;
      text += config.field_boosts[fi] * (dot / (query[f].norm() * dv[f].norm()));
    }
    if (!(text > 0.0)) continue;
    const double decay =
        decay_factor(ref_year, index.doc_year(d), config.decay_half_life_years, fallback_year);
    const double popularity =
        popularity_factor(index.popularity_total(d), 0, 0, config.popularity_beta);
    scored.push_back({d, text, decay, popularity, text * decay * popularity});
  }
  scratch.reset();

  auto better = [&](const Scored& a, const Scored& b) {
    if (a.final_score != b.final_score) return a.final_score > b.final_score;
    return index.doc_id(a.doc) < index.doc_id(b.doc);
  };
  const std::size_t keep = std::min(config.candidate_pool_size, scored.size());
  if (keep < scored.size()) {
    std::nth_element(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                     better);
    scored.resize(keep);
  }
  std::sort(scored.begin(), scored.end(), better);

  std::vector<ScoredCandidate> out;
  out.reserve(scored.size());
  for (const auto& s : scored) {
    out.push_back({s.doc, index.doc_id(s.doc), s.text, s.decay, s.popularity, s.final_score});
  }
  return out;
}

std::size_t RankKeyHash::operator()(const RankKey& key) const noexcept {
  std::size_t h = std::hash<std::string>{}(key.reference_key);
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  mix(std::hash<std::string>{}(key.scope));
  mix(std::hash<std::size_t>{}(key.limit));
  mix(std::hash<uint64_t>{}(key.index_version));
  return h;
}

RankedList cached_rank(RankCache& cache, const RankKey& key, const FieldedVector& query,
                       std::optional<int> ref_year, const Index& index,
                       const ScoringConfig& config,
                       const std::unordered_set<std::string>& exclude) {
  RankKey versioned = key;
  versioned.index_version = index.version();
  return cache.get_or_compute(versioned, [&] {
    return std::make_shared<const std::vector<ScoredCandidate>>(
        rank(query, ref_year, index, config, exclude));
  });
}

}  // namespace scholrec
