#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "scholrec/http_server.hpp"
#include "synthetic.hpp"

using namespace scholrec;
using nlohmann::json;
using testing::make_doc;

namespace {

struct Running {
  explicit Running(ServiceConfig config) : service(std::move(config)), server(service) {
    port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~Running() {
    server.stop();
    thread.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_connection_timeout(5);
    c.set_read_timeout(10);
    return c;
  }

  RecommenderService service;
  HttpServer server;
  int port = 0;
  std::thread thread;
};

CorpusStore store() {
  return CorpusStore::from_records({
      make_doc("a", "Neural ranking for retrieval", {"Ann Lee"}, "neural ranking retrieval", 2020, "r1"),
      make_doc("b", "Lexical retrieval baselines", {"Bo Ng"}, "lexical retrieval ranking", 2018, "r2"),
      make_doc("c", "Ranking evaluation", {"Di Wu"}, "retrieval evaluation ranking", 2017, "r1"),
  });
}

json error_of(const httplib::Result& res) { return json::parse(res->body).at("error"); }

}  // namespace

TEST_CASE("http: loading state, then recommend") {
  Running srv(ServiceConfig{});
  auto cli = srv.client();
  auto res = cli.Get("/v1/health");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["status"] == "loading");
  res = cli.Post("/v1/recommend", R"({"document":{"id":"a"}})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 503);
  CHECK(error_of(res)["code"] == "INDEX_LOADING");

  srv.service.publish(store());
  res = cli.Post("/v1/recommend", R"({"document":{"id":"a"},"limit":2})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Content-Type") == "application/json");
  const auto body = json::parse(res->body);
  CHECK(body["items"].size() == 2);
  CHECK(body["reference_resolved"] == true);
  CHECK(body["stage_drops"].contains("blacklist"));
}

TEST_CASE("http: request errors") {
  Running srv(ServiceConfig{});
  srv.service.publish(store());
  auto cli = srv.client();
  auto res = cli.Post("/v1/recommend", "{not json", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  CHECK(error_of(res)["code"] == "MALFORMED_JSON");
  res = cli.Post("/v1/recommend", R"({"document":{"id":"a"},"limit":99})", "application/json");
  CHECK(res->status == 400);
  CHECK(error_of(res)["code"] == "INVALID_REQUEST");
  CHECK(error_of(res)["field"] == "limit");
  res = cli.Post("/v1/recommend", R"({"document":{"title":"qqq zzz"}})", "application/json");
  CHECK(res->status == 422);
  CHECK(error_of(res)["code"] == "EMPTY_QUERY");
  res = cli.Get("/v1/metrics/ctr?group_by=planet");
  CHECK(res->status == 400);
  CHECK(error_of(res)["field"] == "group_by");
  res = cli.Post("/v1/feedback", R"({"recommended_id":"b"})", "application/json");
  CHECK(res->status == 400);
  res = cli.Post("/v1/events", R"({"user_hash":"u","doc_id":"b","access_time":"x","kind":"click"})", "application/json");
  CHECK(res->status == 400);
  CHECK(error_of(res)["field"] == "access_time");
  res = cli.Get("/v1/nothing");
  CHECK(res->status == 404);
}

TEST_CASE("http: feedback, events and ctr") {
  Running srv(ServiceConfig{});
  srv.service.publish(store());
  auto cli = srv.client();
  auto res = cli.Post("/v1/recommend", R"({"document":{"id":"a"},"user_hash":"u1","variant":"B"})", "application/json");
  REQUIRE(res);
  const auto first = json::parse(res->body)["items"][0]["id"].get<std::string>();

  res = cli.Post("/v1/events",
                 json{{"user_hash", "u1"}, {"doc_id", first}, {"access_time", "2026-01-01T00:00:00Z"},
                      {"kind", "click"}, {"source_doc_id", "a"}, {"variant", "B"}}.dump(),
                 "application/json");
  CHECK(res->status == 204);
  res = cli.Get("/v1/metrics/ctr?group_by=variant");
  REQUIRE(res);
  const auto ctr = json::parse(res->body);
  CHECK(ctr["groups"]["B"]["clicks"] == 1);
  CHECK(ctr["groups"]["B"]["impressions"] == 2);
  CHECK(ctr["groups"]["B"]["ctr"] == 0.5);

  res = cli.Post("/v1/feedback", json{{"reference_key", "a"}, {"recommended_id", first}, {"reporter_hash", "h1"}}.dump(),
                 "application/json");
  CHECK(res->status == 204);
  res = cli.Post("/v1/recommend", R"({"document":{"id":"a"}})", "application/json");
  for (const auto& item : json::parse(res->body)["items"]) CHECK(item["id"] != first);
}

TEST_CASE("http: cors allowlist") {
  ServiceConfig config;
  config.cors_allowlist = {"https://repo.example"};
  Running srv(config);
  srv.service.publish(store());
  auto cli = srv.client();
  auto res = cli.Options("/v1/recommend", {{"Origin", "https://repo.example"},
                                           {"Access-Control-Request-Method", "POST"}});
  REQUIRE(res);
  CHECK(res->status == 204);
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "https://repo.example");
  CHECK(res->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);

  res = cli.Get("/v1/health", {{"Origin", "https://evil.example"}});
  CHECK(res->status == 200);
  CHECK_FALSE(res->has_header("Access-Control-Allow-Origin"));
  res = cli.Get("/v1/health", {{"Origin", "https://repo.example"}});
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "https://repo.example");
}
