#pragma once

#include <memory>
#include <string>
#include <utility>

#include "placeplan/pipeline.hpp"

namespace placeplan {

/// Splits "host:port". Throws ValidationError on malformed input.
std::pair<std::string, int> parse_bind_address(const std::string& address);

/// HTTP JSON API over a Planner:
///   POST /scenes, GET /scenes/{id}, POST /scenes/{id}/plan,
///   GET /runs/{id}, GET /runs/{id}/density?format=binary|text,
///   POST /runs/{id}/select, GET /healthz.
/// Errors are returned as {"stage", "code", "message"}.
class Service {
 public:
  explicit Service(std::shared_ptr<Planner> planner);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Port 0 binds an ephemeral port. Returns the bound port; throws Error
  /// with code "bind_failed" when the address cannot be bound.
  int bind(const std::string& host, int port);
  /// Serves on the bound socket until stop(). Blocks.
  void run();
  /// run() on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace placeplan
