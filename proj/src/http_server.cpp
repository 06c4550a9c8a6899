#include "scholrec/http_server.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "scholrec/clock.hpp"
#include "scholrec/error.hpp"

namespace scholrec {
namespace {

using nlohmann::json;

constexpr const char* kJson = "application/json";

void send_error(httplib::Response& res, int status, const std::string& code,
                const std::string& message, const std::string& field = {}) {
  json error = {{"code", code}, {"message", message}};
  if (!field.empty()) error["field"] = field;
  res.status = status;
  res.set_content(json{{"error", error}}.dump(), kJson);
}

// Parses the body and runs `fn`, mapping library exceptions onto HTTP codes.
template <typename Fn>
void handle_json(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
  json body;
  try {
    body = json::parse(req.body);
  } catch (const json::parse_error& e) {
    send_error(res, 400, "MALFORMED_JSON", e.what());
    return;
  }
  try {
    fn(body);
  } catch (const ServiceError& e) {
    send_error(res, e.status(), e.code(), e.what(), e.field());
  } catch (const ValidationError& e) {
    send_error(res, 400, "INVALID_REQUEST", e.what(), e.field());
  } catch (const IoError& e) {
    spdlog::error("I/O failure: {}", e.what());
    send_error(res, 500, "IO_ERROR", e.what());
  }
}

}  // namespace

struct HttpServer::Impl {
  explicit Impl(RecommenderService& s) : service(s) {}

  bool origin_allowed(const std::string& origin) const {
    const auto& allow = service.config().cors_allowlist;
    return !origin.empty() && std::any_of(allow.begin(), allow.end(), [&](const std::string& o) {
      return o == "*" || o == origin;
    });
  }

  void install_routes();

  RecommenderService& service;
  httplib::Server server;
};

void HttpServer::Impl::install_routes() {
  server.set_post_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    const auto origin = req.get_header_value("Origin");
    if (origin_allowed(origin)) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
    }
  });

  server.Options(R"(/v1/.*)", [this](const httplib::Request& req, httplib::Response& res) {
    if (origin_allowed(req.get_header_value("Origin"))) {
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.set_header("Access-Control-Max-Age", "600");
    }
    res.status = 204;
  });

  server.Post("/v1/recommend", [this](const httplib::Request& req, httplib::Response& res) {
    handle_json(req, res, [&](const json& body) {
      const auto request = recommend_request_from_json(body);
      const auto response = service.recommend(request);
      res.status = 200;
      res.set_content(to_json(response).dump(), kJson);
    });
  });

  server.Post("/v1/feedback", [this](const httplib::Request& req, httplib::Response& res) {
    handle_json(req, res, [&](json body) {
      if (body.is_object() && !body.contains("reported_at")) body["reported_at"] = now_iso8601();
      service.record_feedback(feedback_from_json(body));
      res.status = 204;
    });
  });

  server.Post("/v1/events", [this](const httplib::Request& req, httplib::Response& res) {
    handle_json(req, res, [&](const json& body) {
      service.record_event(event_from_json(body));
      res.status = 204;
    });
  });

  server.Get("/v1/metrics/ctr", [this](const httplib::Request& req, httplib::Response& res) {
    const auto name = req.has_param("group_by") ? req.get_param_value("group_by") : "item";
    const auto grouping = parse_ctr_grouping(name);
    if (!grouping) {
      send_error(res, 400, "INVALID_REQUEST", "group_by must be item, list or variant", "group_by");
      return;
    }
    res.set_content(to_json(service.ctr(*grouping)).dump(), kJson);
  });

  server.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(service.health().dump(), kJson);
  });

  server.set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
          if (ep) std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          message = e.what();
        } catch (...) {
        }
        spdlog::error("unhandled exception: {}", message);
        send_error(res, 500, "INTERNAL", message);
      });
}

HttpServer::HttpServer(RecommenderService& service) : impl_(std::make_unique<Impl>(service)) {
  impl_->install_routes();
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind_to_any_port(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool HttpServer::bind(const std::string& host, int port) {
  return impl_->server.bind_to_port(host, port);
}

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace scholrec
