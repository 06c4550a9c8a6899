#include "oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

namespace scholrec::oracle {
namespace {

using Bag = std::map<std::string, int>;

Bag bag(const std::string& text) {
  Bag b;
  std::istringstream in(text);
  std::string w;
  while (in >> w) {
    if (w.size() >= 2) ++b[w];
  }
  return b;
}

std::string field(const DocumentRecord& d, int f) {
  switch (f) {
    case 0: return d.title;
    case 1: {
      std::string s;
      for (const auto& a : d.authors) s += a + " ";
      return s;
    }
    case 2: return d.abstract;
    default: return d.has_fulltext ? d.fulltext.value_or("") : "";
  }
}

}  // namespace

std::vector<Scored> rank(const std::vector<DocumentRecord>& docs, const DocumentRecord& query,
                         const ScoringConfig& config, int current_year) {
  const double n = static_cast<double>(docs.size());
  std::vector<Scored> out;
  std::vector<std::array<Bag, 4>> bags(docs.size());
  std::array<std::map<std::string, int>, 4> df;
  std::size_t qpos = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (docs[i].id == query.id) qpos = i;
    for (int f = 0; f < 4; ++f) {
      bags[i][f] = bag(field(docs[i], f));
      for (const auto& [w, _] : bags[i][f]) ++df[f][w];
    }
  }
  auto weight = [&](int f, const std::string& w, int tf) {
    return (1.0 + std::log(static_cast<double>(tf))) * std::log(n / df[f][w]);
  };
  auto norm = [&](std::size_t i, int f) {
    double s = 0;
    for (const auto& [w, tf] : bags[i][f]) s += weight(f, w, tf) * weight(f, w, tf);
    return std::sqrt(s);
  };
  const int anchor = query.year.value_or(current_year);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (i == qpos) continue;
    double text = 0;
    for (int f = 0; f < 4; ++f) {
      const double boost = config.field_boosts[f];
      if (boost == 0) continue;
      double dot = 0;
      for (const auto& [w, tf] : bags[qpos][f]) {
        const auto it = bags[i][f].find(w);
        if (it != bags[i][f].end()) dot += weight(f, w, tf) * weight(f, w, it->second);
      }
      const double qn = norm(qpos, f), dn = norm(i, f);
      if (qn > 0 && dn > 0) text += boost * dot / (qn * dn);
    }
    if (!(text > 0)) continue;
    double decay = 0.5;
    if (docs[i].year) decay = std::pow(2.0, -std::max(0, anchor - *docs[i].year) / config.decay_half_life_years);
    const double total = static_cast<double>(docs[i].citation_count + docs[i].download_count + docs[i].reader_count);
    const double pop = 1.0 + config.popularity_beta * std::log10(1.0 + total);
    out.push_back({docs[i].id, text * decay * pop});
  }
  std::sort(out.begin(), out.end(), [](const Scored& a, const Scored& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  });
  if (out.size() > config.candidate_pool_size) out.resize(config.candidate_pool_size);
  return out;
}

double precision_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& rel, std::size_t k) {
  double hits = 0;
  for (std::size_t i = 0; i < k && i < ranked.size(); ++i) hits += rel.count(ranked[i]);
  return hits / static_cast<double>(k);
}

double recall_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& rel, std::size_t k) {
  double hits = 0;
  for (const auto& r : rel) {
    const auto it = std::find(ranked.begin(), ranked.end(), r);
    if (it != ranked.end() && static_cast<std::size_t>(it - ranked.begin()) < k) hits += 1;
  }
  return hits / static_cast<double>(rel.size());
}

double average_precision(const std::vector<std::string>& ranked, const std::set<std::string>& rel) {
  double sum = 0;
  for (std::size_t k = 1; k <= ranked.size(); ++k) {
    if (rel.count(ranked[k - 1])) sum += precision_at_k(ranked, rel, k);
  }
  return sum / static_cast<double>(rel.size());
}

double ndcg_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& rel, std::size_t k) {
  double dcg = 0, idcg = 0;
  for (std::size_t i = 1; i <= k; ++i) {
    if (i <= ranked.size() && rel.count(ranked[i - 1])) dcg += 1.0 / std::log2(i + 1.0);
    if (i <= rel.size()) idcg += 1.0 / std::log2(i + 1.0);
  }
  return idcg == 0 ? 0.0 : dcg / idcg;
}

GroundTruth citation_gt(const std::vector<std::string>& ids, const std::vector<std::vector<bool>>& cites) {
  GroundTruth gt;
  for (std::size_t a = 0; a < ids.size(); ++a) {
    for (std::size_t b = 0; b < ids.size(); ++b) {
      if (a != b && (cites[a][b] || cites[b][a])) gt[ids[a]].insert(ids[b]);
    }
  }
  return gt;
}

GroundTruth cocitation_gt(const std::vector<std::string>& ids, const std::vector<std::vector<bool>>& cites,
                          std::size_t threshold) {
  GroundTruth gt;
  for (std::size_t a = 0; a < ids.size(); ++a) {
    for (std::size_t b = 0; b < ids.size(); ++b) {
      if (a == b) continue;
      std::size_t count = 0;
      for (std::size_t c = 0; c < ids.size(); ++c) count += cites[c][a] && cites[c][b];
      if (count >= threshold) gt[ids[a]].insert(ids[b]);
    }
  }
  return gt;
}

double two_proportion_z(double ca, double na, double cb, double nb) {
  const double p = (ca + cb) / (na + nb);
  return (cb / nb - ca / na) / std::sqrt(p * (1 - p) * (1 / na + 1 / nb));
}

}  // namespace scholrec::oracle
