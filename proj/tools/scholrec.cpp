// Command-line entry point: ingest, enrich, index, recommend, evaluate, ctr,
// abtest and serve. Exit codes: 0 success, 1 validation error, 2 I/O error.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "scholrec/config.hpp"
#include "scholrec/corpus.hpp"
#include "scholrec/enrich.hpp"
#include "scholrec/error.hpp"
#include "scholrec/evaluation.hpp"
#include "scholrec/http_server.hpp"
#include "scholrec/index.hpp"
#include "scholrec/service.hpp"

namespace {

using namespace scholrec;
using nlohmann::json;

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

scholrec::HttpServer* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

struct Options {
  std::string log_level = "warn";
  std::string corpus;
  std::string indicators;
  std::string citations;
  std::string config;
  std::string out;
  std::string events;
  std::string feedback_log;
  std::string event_log;
  std::string per_query_csv;
  bool skip_invalid = false;
  std::size_t key_terms = 10;

  // recommend
  std::string id, doi, title, abstract, repository, variant;
  std::vector<std::string> authors;
  int year = 0;
  std::string scope = "global";
  std::size_t limit = kDefaultRecommendLimit;

  // evaluate
  std::string gt = "citation";
  std::size_t cocite_threshold = kDefaultCocitationThreshold;
  std::string ks = "1,5,10";
  bool no_eligibility = false;

  // ctr / abtest
  std::string group_by = "item";
  std::string arm_a, arm_b;
  double alpha = 0.05;

  // serve
  std::string host;
  int port = 0;
};

std::vector<std::size_t> parse_k_list(const std::string& text) {
  std::vector<std::size_t> ks;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    std::size_t pos = 0;
    long long value = 0;
    try {
      value = std::stoll(piece, &pos);
    } catch (const std::exception&) {
      throw ValidationError("--k expects a comma-separated list of positive integers", "k");
    }
    if (pos != piece.size() || value < 1)
      throw ValidationError("--k expects a comma-separated list of positive integers", "k");
    ks.push_back(static_cast<std::size_t>(value));
  }
  if (ks.empty()) throw ValidationError("--k must not be empty", "k");
  return ks;
}

std::pair<int64_t, int64_t> parse_arm(const std::string& text, const char* flag) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) throw std::invalid_argument(text);
    std::size_t p1 = 0, p2 = 0;
    const auto clicks = std::stoll(text.substr(0, slash), &p1);
    const auto imps = std::stoll(text.substr(slash + 1), &p2);
    if (p1 != slash || p2 != text.size() - slash - 1) throw std::invalid_argument(text);
    return {clicks, imps};
  } catch (const std::exception&) {
    throw ValidationError(std::string(flag) + " expects CLICKS/IMPRESSIONS", flag);
  }
}

ServiceConfig resolve_config(const Options& o) {
  ServiceConfig config;
  if (!o.config.empty()) config = load_service_config(o.config, config);
  config = apply_env_overrides(config);
  if (!o.corpus.empty()) config.corpus_path = o.corpus;
  if (!o.indicators.empty()) config.indicators_path = o.indicators;
  if (!o.feedback_log.empty()) config.feedback_log = o.feedback_log;
  if (!o.event_log.empty()) config.event_log = o.event_log;
  if (!o.host.empty()) config.host = o.host;
  if (o.port != 0) config.port = o.port;
  validate(config);
  return config;
}

CorpusStore load_enriched(const Options& o, std::size_t key_terms) {
  CorpusStore store = load_corpus(o.corpus).store;
  if (!o.indicators.empty()) {
    std::ifstream in(o.indicators);
    if (!in) throw IoError("cannot open indicators file " + o.indicators);
    store = join_indicators(store, read_indicators(in).rows).store;
  }
  return enrich_store(store, key_terms);
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

int run_ingest(const Options& o) {
  LoadOptions load_options;
  load_options.skip_invalid = o.skip_invalid;
  auto loaded = load_corpus(o.corpus, load_options);
  if (!o.out.empty()) write_corpus(loaded.store, o.out);
  print({{"loaded", loaded.report.loaded},
         {"skipped", loaded.report.skipped},
         {"unknown_fields", loaded.report.unknown_fields}});
  return 0;
}

int run_enrich(const Options& o) {
  CorpusStore store = load_corpus(o.corpus).store;
  json report = {{"records", store.size()}};
  if (!o.indicators.empty()) {
    std::ifstream in(o.indicators);
    if (!in) throw IoError("cannot open indicators file " + o.indicators);
    const auto file = read_indicators(in);
    auto joined = join_indicators(store, file.rows);
    store = std::move(joined.store);
    report["indicators"] = {{"matched", joined.report.matched},
                            {"unmatched", joined.report.unmatched},
                            {"rejected", joined.report.rejected},
                            {"malformed", file.malformed}};
  }
  store = enrich_store(store, o.key_terms);
  json languages = json::object();
  for (const auto& r : store.records()) {
    auto& count = languages[r.language.value_or("und")];
    count = count.is_null() ? 1 : count.get<int>() + 1;
  }
  report["languages"] = languages;
  if (!o.out.empty()) write_corpus(store, o.out);
  print(report);
  return 0;
}

int run_index(const Options& o) {
  const auto store = load_enriched(o, o.key_terms);
  const auto index = build_index(store);
  if (!o.out.empty()) {
    std::ofstream out(o.out);
    if (!out) throw IoError("cannot write snapshot " + o.out);
    write_snapshot(index, out);
  }
  print({{"index_version", index.version()},
         {"N", index.doc_count()},
         {"vocabulary", index.vocabulary_size()}});
  return 0;
}

int run_recommend(const Options& o) {
  const auto config = resolve_config(o);
  RecommenderService service(config);
  service.publish(load_enriched(o, config.key_term_count));

  json body = {{"scope", o.scope}, {"limit", o.limit}};
  json document = json::object();
  if (!o.id.empty()) document["id"] = o.id;
  if (!o.doi.empty()) document["doi"] = o.doi;
  if (!o.title.empty()) document["title"] = o.title;
  if (!o.abstract.empty()) document["abstract"] = o.abstract;
  if (!o.authors.empty()) document["authors"] = o.authors;
  if (o.year != 0) document["year"] = o.year;
  body["document"] = document;
  if (!o.repository.empty()) body["repository_id"] = o.repository;
  if (!o.variant.empty()) body["variant"] = o.variant;

  const auto response = service.recommend(recommend_request_from_json(body));
  print(to_json(response));
  return 0;
}

int run_evaluate(const Options& o) {
  const auto config = resolve_config(o);
  const auto ks = parse_k_list(o.ks);
  const auto store = load_enriched(o, config.key_term_count);
  const auto index = build_index(store);

  std::ifstream in(o.citations);
  if (!in) throw IoError("cannot open citations file " + o.citations);
  const auto citations = read_citation_graph(in);
  GroundTruth gt;
  if (o.gt == "citation") {
    gt = build_citation_gt(citations.graph);
  } else if (o.gt == "cocitation") {
    gt = build_cocitation_gt(citations.graph, o.cocite_threshold);
  } else {
    throw ValidationError("--gt must be citation or cocitation", "gt");
  }

  OfflineEvalOptions eval_options;
  eval_options.apply_eligibility = config.apply_eligibility && !o.no_eligibility;
  const auto report = run_offline_eval(store, index, config.scoring, gt, ks, eval_options);
  json j = to_json(report);
  j["ground_truth"] = {{"kind", o.gt},
                       {"queries", gt.size()},
                       {"edges", citations.graph.size()},
                       {"self_edges_skipped", citations.self_edges},
                       {"malformed_rows", citations.malformed}};
  if (o.gt == "cocitation") j["ground_truth"]["threshold"] = o.cocite_threshold;
  if (!o.per_query_csv.empty()) {
    std::ofstream csv(o.per_query_csv);
    if (!csv) throw IoError("cannot write " + o.per_query_csv);
    write_per_query_csv(report, csv);
  }
  if (!o.out.empty()) {
    std::ofstream out(o.out);
    if (!out) throw IoError("cannot write " + o.out);
    out << j.dump(2) << '\n';
  }
  print(j);
  return 0;
}

int run_ctr(const Options& o) {
  const auto grouping = parse_ctr_grouping(o.group_by);
  if (!grouping) throw ValidationError("--group-by must be item, list or variant", "group_by");
  const auto events = read_event_log(o.events);
  print(to_json(compute_ctr(events, *grouping)));
  return 0;
}

int run_abtest(const Options& o) {
  const auto [ca, na] = parse_arm(o.arm_a, "--a");
  const auto [cb, nb] = parse_arm(o.arm_b, "--b");
  AbResult result;
  try {
    result = ab_significance(ca, na, cb, nb, o.alpha);
  } catch (const ArgumentError& e) {
    throw ValidationError(e.what());
  }
  json j = to_json(result);
  j["verdict"] = result.significant ? "B significantly better than A" : "not significant";
  print(j);
  return 0;
}

int run_serve(const Options& o) {
  const auto config = resolve_config(o);
  if (!config.corpus_path) throw ValidationError("--corpus (or corpus_path in config) is required", "corpus");
  RecommenderService service(config);
  HttpServer server(service);
  if (!server.bind(config.host, config.port))
    throw IoError("cannot bind " + config.host + ":" + std::to_string(config.port));

  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);

  std::thread loader([&] {
    try {
      const auto snapshot = load_snapshot_from_config(config);
      service.publish(snapshot);
      spdlog::info("index {} published with {} documents", snapshot->index.version(),
                   snapshot->index.doc_count());
    } catch (const std::exception& e) {
      spdlog::critical("index load failed: {}", e.what());
      server.stop();
    }
  });
  spdlog::info("listening on {}:{}", config.host, config.port);
  std::cerr << "listening on " << config.host << ":" << config.port << std::endl;
  server.listen_after_bind();
  loader.join();
  g_server = nullptr;
  return service.ready() ? 0 : kExitIo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Content-based scholarly article recommender"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--log-level", o.log_level, "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

  auto* ingest = app.add_subcommand("ingest", "Validate a JSON-Lines corpus");
  ingest->add_option("--corpus", o.corpus, "Corpus JSONL")->required();
  ingest->add_option("--out", o.out, "Write the normalized corpus here");
  ingest->add_flag("--skip-invalid", o.skip_invalid, "Count invalid rows instead of failing");

  auto* enrich = app.add_subcommand("enrich", "Infer language/key terms and join indicators");
  enrich->add_option("--corpus", o.corpus, "Corpus JSONL")->required();
  enrich->add_option("--indicators", o.indicators, "Indicators CSV");
  enrich->add_option("--out", o.out, "Write the enriched corpus here");
  enrich->add_option("--key-terms", o.key_terms, "Key terms per record")->check(CLI::PositiveNumber);

  auto* index = app.add_subcommand("index", "Build the inverted index and write a snapshot");
  index->add_option("--corpus", o.corpus, "Corpus JSONL")->required();
  index->add_option("--indicators", o.indicators, "Indicators CSV");
  index->add_option("--out", o.out, "Snapshot path");

  auto* recommend = app.add_subcommand("recommend", "Recommend for one reference document");
  recommend->add_option("--corpus", o.corpus, "Corpus JSONL")->required();
  recommend->add_option("--indicators", o.indicators, "Indicators CSV");
  recommend->add_option("--config", o.config, "Service config JSON");
  recommend->add_option("--feedback-log", o.feedback_log, "Feedback JSONL (blacklist)");
  recommend->add_option("--id", o.id, "Reference document id");
  recommend->add_option("--doi", o.doi, "Reference DOI");
  recommend->add_option("--title", o.title, "Reference title");
  recommend->add_option("--abstract", o.abstract, "Reference abstract");
  recommend->add_option("--author", o.authors, "Reference author (repeatable)");
  recommend->add_option("--year", o.year, "Reference publication year");
  recommend->add_option("--scope", o.scope, "global|repository")
      ->check(CLI::IsMember({"global", "repository"}));
  recommend->add_option("--repository", o.repository, "Repository id for --scope repository");
  recommend->add_option("--limit", o.limit, "Number of suggestions (1..50)")
      ->check(CLI::Range(std::size_t{1}, kMaxRecommendLimit));
  recommend->add_option("--variant", o.variant, "A/B variant label");

  auto* evaluate = app.add_subcommand("evaluate", "Offline evaluation against a citation ground truth");
  evaluate->add_option("--corpus", o.corpus, "Corpus JSONL")->required();
  evaluate->add_option("--indicators", o.indicators, "Indicators CSV");
  evaluate->add_option("--citations", o.citations, "Citation CSV citing_id,cited_id")->required();
  evaluate->add_option("--config", o.config, "Service config JSON");
  evaluate->add_option("--gt", o.gt, "citation|cocitation")
      ->check(CLI::IsMember({"citation", "cocitation"}));
  evaluate->add_option("--cocite-threshold", o.cocite_threshold, "Minimum co-citation count")
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--k", o.ks, "Cutoffs, e.g. 1,5,10");
  evaluate->add_flag("--no-eligibility", o.no_eligibility, "Skip the eligibility filter");
  evaluate->add_option("--per-query-csv", o.per_query_csv, "Write per-query metrics CSV");
  evaluate->add_option("--out", o.out, "Also write the report JSON here");

  auto* ctr = app.add_subcommand("ctr", "Click-through rates from an event log");
  ctr->add_option("--events", o.events, "Event JSONL")->required();
  ctr->add_option("--group-by", o.group_by, "item|list|variant")
      ->check(CLI::IsMember({"item", "list", "variant"}));

  auto* abtest = app.add_subcommand("abtest", "One-sided two-proportion z-test, B better than A");
  abtest->add_option("--a", o.arm_a, "Arm A as CLICKS/IMPRESSIONS")->required();
  abtest->add_option("--b", o.arm_b, "Arm B as CLICKS/IMPRESSIONS")->required();
  abtest->add_option("--alpha", o.alpha, "Significance level");

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--corpus", o.corpus, "Corpus JSONL");
  serve->add_option("--indicators", o.indicators, "Indicators CSV");
  serve->add_option("--config", o.config, "Service config JSON");
  serve->add_option("--feedback-log", o.feedback_log, "Feedback JSONL");
  serve->add_option("--event-log", o.event_log, "Event JSONL");
  serve->add_option("--host", o.host, "Bind address");
  serve->add_option("--port", o.port, "Port")->check(CLI::Range(1, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitValidation;
  }

  spdlog::set_level(spdlog::level::from_str(o.log_level));

  try {
    if (*ingest) return run_ingest(o);
    if (*enrich) return run_enrich(o);
    if (*index) return run_index(o);
    if (*recommend) return run_recommend(o);
    if (*evaluate) return run_evaluate(o);
    if (*ctr) return run_ctr(o);
    if (*abtest) return run_abtest(o);
    if (*serve) return run_serve(o);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ServiceError& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}
