#pragma once

#include <chrono>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "worldkeeper/prompt.hpp"

namespace worldkeeper {

/// Invalid or incomplete backend configuration. Raised before any I/O.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A generation call failed: script exhausted, transport failure after
/// retries, or a non-success status.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class BackendKind { Scripted, Http };

struct BackendConfig {
  BackendKind kind = BackendKind::Scripted;
  std::string endpoint;
  std::string model;
  std::optional<double> temperature;  // unset: 0 for world updates, 0.7 otherwise
  double timeout_seconds = 30.0;
  int max_retries = 2;
  std::string credential_env;  // name of the variable holding the API key
  std::string provider = "generic";

  void validate() const;
  double temperature_for(PromptKind kind) const;
};

// Config file keys: backend, endpoint, model, temperature, timeout_seconds,
// max_retries, credential_env, provider.
BackendConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const BackendConfig& config);
BackendConfig load_config(const std::filesystem::path& path);

struct Completion {
  std::string text;
  int attempts = 1;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual Completion generate(const PromptBundle& prompt) = 0;
};

/// Canned responses per prompt kind.
using Script = std::map<PromptKind, std::deque<std::string>>;

/// Script file: `@@ <kind>` header lines, each followed by one response.
Script parse_script(std::string_view text);
Script load_script(const std::filesystem::path& path);
/// {"world-update": [..], "narrator": [..], "item-generation": [..]}
Script script_from_json(const nlohmann::json& doc);

/// Replays canned responses in order; deterministic stand-in for an LLM.
class ScriptedBackend final : public Backend {
 public:
  explicit ScriptedBackend(Script script = {}) : script_(std::move(script)) {}

  Completion generate(const PromptBundle& prompt) override;
  void push(PromptKind kind, std::string response);
  std::size_t remaining(PromptKind kind) const;

 private:
  Script script_;
};

struct HttpRequest {
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  std::chrono::milliseconds timeout{30000};
};

struct HttpResponse {
  int status = 0;               // 0 when the request never got a response
  std::string body;
  std::string transport_error;  // set when status == 0
};

using Transport = std::function<HttpResponse(const HttpRequest&)>;

/// Real network transport (cpp-httplib).
Transport network_transport();

/// Calls a completion endpoint through a provider adapter ("generic",
/// "openai" or "gemini"). Retries transport failures, 429 and 5xx.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(BackendConfig config, Transport transport = network_transport());

  Completion generate(const PromptBundle& prompt) override;

 private:
  BackendConfig config_;
  Transport transport_;
};

std::unique_ptr<Backend> make_backend(const BackendConfig& config, Script script = {});

}  // namespace worldkeeper
