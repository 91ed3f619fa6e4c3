#include "worldkeeper/backend.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace worldkeeper {

using nlohmann::json;

namespace {

bool transient(const HttpResponse& r) {
  return r.status == 0 || r.status == 429 || (r.status >= 500 && r.status < 600);
}

struct ProviderCall {
  HttpRequest request;
  std::function<std::string(const json&)> extract;
};

ProviderCall adapt(const BackendConfig& c, const PromptBundle& prompt, const std::string& key) {
  const double temperature = c.temperature_for(prompt.kind);
  ProviderCall call;
  call.request.timeout =
      std::chrono::milliseconds(static_cast<long long>(c.timeout_seconds * 1000.0));
  call.request.headers.emplace_back("Content-Type", "application/json");
  if (c.provider == "generic") {
    call.request.url = c.endpoint;
    call.request.headers.emplace_back("Authorization", "Bearer " + key);
    call.request.body =
        json{{"model", c.model}, {"prompt", prompt.text}, {"temperature", temperature}}.dump();
    call.extract = [](const json& r) { return r.at("text").get<std::string>(); };
  } else if (c.provider == "openai") {
    call.request.url = c.endpoint;
    call.request.headers.emplace_back("Authorization", "Bearer " + key);
    call.request.body = json{{"model", c.model},
                             {"messages", json::array({{{"role", "user"}, {"content", prompt.text}}})},
                             {"temperature", temperature}}
                            .dump();
    call.extract = [](const json& r) {
      return r.at("choices").at(0).at("message").at("content").get<std::string>();
    };
  } else {  // gemini
    auto base = c.endpoint;
    while (!base.empty() && base.back() == '/') base.pop_back();
    call.request.url = base + "/models/" + c.model + ":generateContent";
    call.request.headers.emplace_back("x-goog-api-key", key);
    call.request.body =
        json{{"contents", json::array({{{"parts", json::array({{{"text", prompt.text}}})}}})},
             {"generationConfig", {{"temperature", temperature}}}}
            .dump();
    call.extract = [](const json& r) {
      return r.at("candidates").at(0).at("content").at("parts").at(0).at("text").get<std::string>();
    };
  }
  return call;
}

std::string trim_trailing_newlines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

}  // namespace

void BackendConfig::validate() const {
  if (temperature && (*temperature < 0.0 || *temperature > 1.0))
    throw ConfigError("temperature must be within [0, 1]");
  if (timeout_seconds <= 0.0) throw ConfigError("timeout_seconds must be positive");
  if (max_retries < 0 || max_retries > 10) throw ConfigError("max_retries must be within [0, 10]");
  if (kind == BackendKind::Http) {
    if (endpoint.empty()) throw ConfigError("http backend requires an endpoint");
    if (credential_env.empty()) throw ConfigError("http backend requires credential_env");
    if (provider != "generic" && provider != "openai" && provider != "gemini")
      throw ConfigError("unknown provider '" + provider + "'");
    if (provider != "generic" && model.empty())
      throw ConfigError("provider '" + provider + "' requires a model");
  }
}

double BackendConfig::temperature_for(PromptKind kind) const {
  if (temperature) return *temperature;
  return kind == PromptKind::WorldUpdate ? 0.0 : 0.7;
}

BackendConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("backend config must be a JSON object");
  static const std::set<std::string> known = {"backend",         "endpoint",    "model",
                                              "temperature",     "timeout_seconds",
                                              "max_retries",     "credential_env", "provider"};
  for (const auto& [key, _] : doc.items())
    if (!known.contains(key)) throw ConfigError("unknown backend config key '" + key + "'");
  BackendConfig c;
  try {
    const auto kind = doc.value("backend", std::string("scripted"));
    if (kind == "scripted") c.kind = BackendKind::Scripted;
    else if (kind == "http") c.kind = BackendKind::Http;
    else throw ConfigError("backend must be 'scripted' or 'http'");
    c.endpoint = doc.value("endpoint", std::string());
    c.model = doc.value("model", std::string());
    if (doc.contains("temperature") && !doc.at("temperature").is_null())
      c.temperature = doc.at("temperature").get<double>();
    c.timeout_seconds = doc.value("timeout_seconds", c.timeout_seconds);
    c.max_retries = doc.value("max_retries", c.max_retries);
    c.credential_env = doc.value("credential_env", std::string());
    c.provider = doc.value("provider", c.provider);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad backend config: ") + e.what());
  }
  c.validate();
  return c;
}

json config_to_json(const BackendConfig& c) {
  json doc = {{"backend", c.kind == BackendKind::Http ? "http" : "scripted"},
              {"endpoint", c.endpoint},
              {"model", c.model},
              {"timeout_seconds", c.timeout_seconds},
              {"max_retries", c.max_retries},
              {"credential_env", c.credential_env},
              {"provider", c.provider}};
  doc["temperature"] = c.temperature ? json(*c.temperature) : json(nullptr);
  return doc;
}

BackendConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return config_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config file is not JSON: ") + e.what());
  }
}

Script parse_script(std::string_view text) {
  Script script;
  std::istringstream in{std::string(text)};
  std::optional<PromptKind> kind;
  std::string body;
  auto flush = [&] {
    if (kind) script[*kind].push_back(trim_trailing_newlines(std::move(body)));
    body.clear();
  };
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("@@", 0) == 0) {
      flush();
      auto name = line.substr(2);
      name.erase(0, name.find_first_not_of(' '));
      name.erase(name.find_last_not_of(' ') + 1);
      kind = kind_from_name(name);
      if (!kind) throw ConfigError("script line " + std::to_string(lineno) + ": unknown kind '" + name + "'");
      continue;
    }
    if (!kind) {
      if (line.empty() || line.front() == '#') continue;
      throw ConfigError("script line " + std::to_string(lineno) + ": text before the first @@ header");
    }
    body += line;
    body += '\n';
  }
  flush();
  return script;
}

Script load_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open script file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_script(buf.str());
}

Script script_from_json(const json& doc) {
  if (doc.is_string()) return parse_script(doc.get<std::string>());
  if (!doc.is_object()) throw ConfigError("script must be a string or an object of arrays");
  Script script;
  for (const auto& [name, responses] : doc.items()) {
    auto kind = kind_from_name(name);
    if (!kind) throw ConfigError("unknown script kind '" + name + "'");
    if (!responses.is_array()) throw ConfigError("script entries must be arrays of strings");
    for (const auto& r : responses) {
      if (!r.is_string()) throw ConfigError("script entries must be arrays of strings");
      script[*kind].push_back(r.get<std::string>());
    }
  }
  return script;
}

Completion ScriptedBackend::generate(const PromptBundle& prompt) {
  auto it = script_.find(prompt.kind);
  if (it == script_.end() || it->second.empty())
    throw BackendError("script exhausted for " + std::string(kind_name(prompt.kind)));
  Completion c{std::move(it->second.front()), 1};
  it->second.pop_front();
  return c;
}

void ScriptedBackend::push(PromptKind kind, std::string response) {
  script_[kind].push_back(std::move(response));
}

std::size_t ScriptedBackend::remaining(PromptKind kind) const {
  auto it = script_.find(kind);
  return it == script_.end() ? 0 : it->second.size();
}

HttpBackend::HttpBackend(BackendConfig config, Transport transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  config_.kind = BackendKind::Http;
  config_.validate();
}

Completion HttpBackend::generate(const PromptBundle& prompt) {
  const char* key = std::getenv(config_.credential_env.c_str());
  if (key == nullptr || *key == '\0')
    throw ConfigError("credential variable " + config_.credential_env + " is not set");

  const auto call = adapt(config_, prompt, key);
  const int max_attempts = 1 + config_.max_retries;
  std::string last_error;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    const auto response = transport_(call.request);
    if (response.status >= 200 && response.status < 300) {
      try {
        return {call.extract(json::parse(response.body)), attempt};
      } catch (const json::exception& e) {
        throw BackendError(std::string("malformed completion response: ") + e.what());
      }
    }
    last_error = response.status == 0 ? "transport failure: " + response.transport_error
                                       : "status " + std::to_string(response.status);
    if (!transient(response)) throw BackendError("completion request failed with " + last_error);
  }
  throw BackendError("completion request failed after " + std::to_string(max_attempts) +
                     " attempts: " + last_error);
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config, Script script) {
  config.validate();
  if (config.kind == BackendKind::Http) return std::make_unique<HttpBackend>(config);
  return std::make_unique<ScriptedBackend>(std::move(script));
}

}  // namespace worldkeeper
