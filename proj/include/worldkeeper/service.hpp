#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "worldkeeper/backend.hpp"

namespace worldkeeper {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  bool cors = false;
  bool redact_raw = false;  // hide raw model output in returned reports
  std::optional<std::filesystem::path> snapshot_dir;  // sessions saved here on stop()
};

/// Builds the backend for a new session. The default makes real backends;
/// tests substitute controllable fakes.
using BackendFactory = std::function<std::shared_ptr<Backend>(const BackendConfig&, Script)>;

std::shared_ptr<Backend> default_backend_factory(const BackendConfig& config, Script script);

/// HTTP/JSON facade over worlds and sessions.
///
///   POST   /worlds                       world document -> {world_id}
///   GET    /worlds                       -> [{world_id, player, ...}]
///   POST   /sessions                     {world_id, backend, script?} -> {session_id}
///   POST   /sessions/{id}/turn           {input} -> TurnReport
///   GET    /sessions/{id}/state          -> {rendering, scope, digest}
///   POST   /sessions/{id}/generate-item  {location, brief} -> {item}
///   DELETE /sessions/{id}
///
/// Errors carry {"error": code, "detail": text} and optionally "violations".
class Service {
 public:
  explicit Service(ServiceConfig config, BackendFactory factory = default_backend_factory);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds the listening socket and returns the bound port.
  int bind();
  /// Serves until stop(); binds first if needed.
  void run();
  /// Serves on a background thread.
  void start();
  /// Stops serving and writes snapshots when configured.
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace worldkeeper
