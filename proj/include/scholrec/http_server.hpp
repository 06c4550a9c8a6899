#pragma once

#include <memory>
#include <string>

#include "scholrec/service.hpp"

namespace scholrec {

// HTTP/1.1 front end for RecommenderService:
//   POST /v1/recommend, POST /v1/feedback, POST /v1/events,
//   GET /v1/metrics/ctr?group_by=item|list|variant, GET /v1/health.
// Errors are {"error": {"code", "message", "field"}}. CORS headers are sent
// for origins on the configured allowlist; OPTIONS preflights answer 204.
class HttpServer {
 public:
  explicit HttpServer(RecommenderService& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Returns the bound port, or -1.
  int bind_to_any_port(const std::string& host);
  bool bind(const std::string& host, int port);
  // Blocks until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace scholrec
