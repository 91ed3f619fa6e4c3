#include "worldkeeper/service.hpp"

#include <map>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "worldkeeper/generation.hpp"
#include "worldkeeper/render.hpp"
#include "worldkeeper/session.hpp"
#include "worldkeeper/world_io.hpp"

namespace worldkeeper {

using nlohmann::json;

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void error(httplib::Response& res, int status, std::string_view code, std::string_view detail) {
  reply(res, status, {{"error", code}, {"detail", detail}});
}

void violations(httplib::Response& res, const std::vector<Violation>& vs) {
  json list = json::array();
  for (const auto& v : vs)
    list.push_back({{"component", v.component}, {"rule", v.rule}, {"detail", v.detail}});
  reply(res, 400, {{"error", "invalid-world"}, {"detail", "world violates invariants"},
                   {"violations", std::move(list)}});
}

std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
  try {
    auto doc = json::parse(req.body);
    if (!doc.is_object()) {
      error(res, 400, "malformed-body", "request body must be a JSON object");
      return std::nullopt;
    }
    return doc;
  } catch (const json::parse_error& e) {
    error(res, 400, "malformed-body", e.what());
    return std::nullopt;
  }
}

json scope_view(const World& world) {
  const auto scope = scope_of(world, world.player);
  const auto& here = location(world, scope.here);
  auto names = [&](const std::set<LocationId>& ids) {
    json arr = json::array();
    for (auto id : ids) arr.push_back(location(world, id).name);
    return arr;
  };
  auto items = [&](const std::set<ItemId>& ids) {
    json arr = json::array();
    for (auto id : ids) arr.push_back(item_to_json(item(world, id)));
    return arr;
  };
  json characters = json::array();
  for (auto id : scope.characters) {
    const auto& ch = character(world, id);
    characters.push_back({{"name", ch.name},
                          {"descriptions", ch.descriptions},
                          {"is_player", id == world.player},
                          {"inventory", items(ch.inventory)}});
  }
  return {{"location", {{"name", here.name},
                        {"descriptions", here.descriptions},
                        {"exits", names(here.connecting)},
                        {"blocked", names(here.blocked)}}},
          {"items", items(here.items)},
          {"characters", std::move(characters)}};
}

}  // namespace

std::shared_ptr<Backend> default_backend_factory(const BackendConfig& config, Script script) {
  return make_backend(config, std::move(script));
}

struct Service::Impl {
  ServiceConfig config;
  BackendFactory factory;
  httplib::Server server;
  std::thread worker;
  int bound_port = -1;

  std::mutex mutex;  // guards the registries below
  std::map<std::string, World> worlds;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  int next_world = 1;
  int next_session = 1;

  std::shared_ptr<Session> find_session(const std::string& id) {
    std::lock_guard lock(mutex);
    auto it = sessions.find(id);
    return it == sessions.end() ? nullptr : it->second;
  }

  void routes();
  void post_world(const httplib::Request&, httplib::Response&);
  void list_worlds(const httplib::Request&, httplib::Response&);
  void create_session(const httplib::Request&, httplib::Response&);
  void turn(const httplib::Request&, httplib::Response&);
  void state(const httplib::Request&, httplib::Response&);
  void generate(const httplib::Request&, httplib::Response&);
  void remove(const httplib::Request&, httplib::Response&);
  void snapshot();
};

void Service::Impl::routes() {
  if (config.cors) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  }
  server.Post("/worlds", [this](const auto& req, auto& res) { post_world(req, res); });
  server.Get("/worlds", [this](const auto& req, auto& res) { list_worlds(req, res); });
  server.Post("/sessions", [this](const auto& req, auto& res) { create_session(req, res); });
  server.Post(R"(/sessions/([^/]+)/turn)", [this](const auto& req, auto& res) { turn(req, res); });
  server.Get(R"(/sessions/([^/]+)/state)", [this](const auto& req, auto& res) { state(req, res); });
  server.Post(R"(/sessions/([^/]+)/generate-item)",
              [this](const auto& req, auto& res) { generate(req, res); });
  server.Delete(R"(/sessions/([^/]+))", [this](const auto& req, auto& res) { remove(req, res); });
  server.set_exception_handler([](const auto&, auto& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      error(res, 500, "internal", e.what());
    } catch (...) {
      error(res, 500, "internal", "unknown error");
    }
  });
}

void Service::Impl::post_world(const httplib::Request& req, httplib::Response& res) {
  auto body = parse_body(req, res);
  if (!body) return;
  try {
    auto world = world_from_json(*body);
    std::lock_guard lock(mutex);
    const auto id = "w" + std::to_string(next_world++);
    worlds.emplace(id, std::move(world));
    reply(res, 201, {{"world_id", id}});
  } catch (const WorldLoadError& e) {
    violations(res, e.violations());
  }
}

void Service::Impl::list_worlds(const httplib::Request&, httplib::Response& res) {
  json list = json::array();
  std::lock_guard lock(mutex);
  for (const auto& [id, w] : worlds) {
    list.push_back({{"world_id", id},
                    {"player", character(w, w.player).name},
                    {"locations", w.locations.size()},
                    {"items", w.items.size()},
                    {"characters", w.characters.size()},
                    {"digest", world_digest(w)}});
  }
  reply(res, 200, list);
}

void Service::Impl::create_session(const httplib::Request& req, httplib::Response& res) {
  auto body = parse_body(req, res);
  if (!body) return;
  if (!body->contains("world_id") || !body->at("world_id").is_string())
    return error(res, 400, "malformed-body", "missing string 'world_id'");

  BackendConfig backend_config;
  Script script;
  try {
    if (body->contains("backend")) {
      const auto& b = body->at("backend");
      backend_config = b.is_string() ? config_from_json({{"backend", b}}) : config_from_json(b);
    }
    if (body->contains("script")) script = script_from_json(body->at("script"));
  } catch (const ConfigError& e) {
    return error(res, 400, "bad-backend", e.what());
  }

  World world;
  {
    std::lock_guard lock(mutex);
    auto it = worlds.find(body->at("world_id").get<std::string>());
    if (it == worlds.end()) return error(res, 404, "not-found", "unknown world id");
    world = it->second;
  }

  std::shared_ptr<Backend> backend;
  try {
    backend = factory(backend_config, std::move(script));
  } catch (const ConfigError& e) {
    return error(res, 400, "bad-backend", e.what());
  }

  std::lock_guard lock(mutex);
  const auto id = "s" + std::to_string(next_session++);
  sessions.emplace(id, std::make_shared<Session>(id, std::move(world), backend_config, backend));
  reply(res, 201, {{"session_id", id}});
}

void Service::Impl::turn(const httplib::Request& req, httplib::Response& res) {
  auto session = find_session(req.matches[1].str());
  if (!session) return error(res, 404, "not-found", "unknown session id");
  auto body = parse_body(req, res);
  if (!body) return;
  if (!body->contains("input") || !body->at("input").is_string())
    return error(res, 400, "malformed-body", "missing string 'input'");
  try {
    const auto report = session->run_turn(body->at("input").get<std::string>());
    reply(res, 200, to_json(report, config.redact_raw));
  } catch (const SessionBusy& e) {
    error(res, 409, "busy", e.what());
  } catch (const PromptError& e) {
    error(res, 400, "empty-input", e.what());
  } catch (const ConfigError& e) {
    error(res, 502, "backend-config", e.what());
  } catch (const BackendError& e) {
    error(res, 502, "backend-failure", e.what());
  }
}

void Service::Impl::state(const httplib::Request& req, httplib::Response& res) {
  auto session = find_session(req.matches[1].str());
  if (!session) return error(res, 404, "not-found", "unknown session id");
  const auto world = session->world();
  reply(res, 200, {{"rendering", render_state(*world, world->player, session->resources().templates).text},
                   {"scope", scope_view(*world)},
                   {"digest", world_digest(*world)}});
}

void Service::Impl::generate(const httplib::Request& req, httplib::Response& res) {
  auto session = find_session(req.matches[1].str());
  if (!session) return error(res, 404, "not-found", "unknown session id");
  auto body = parse_body(req, res);
  if (!body) return;
  if (!body->contains("location") || !body->at("location").is_string())
    return error(res, 400, "malformed-body", "missing string 'location'");
  const auto brief = body->contains("brief") && body->at("brief").is_string()
                         ? body->at("brief").get<std::string>()
                         : std::string();
  try {
    const auto made = generate_item(*session, body->at("location").get<std::string>(), brief);
    reply(res, 200, {{"item", item_to_json(made.item)}, {"attempts", made.attempts}});
  } catch (const SessionBusy& e) {
    error(res, 409, "busy", e.what());
  } catch (const GenerationError& e) {
    const bool missing = e.reason() == GenerationError::Reason::UnknownLocation;
    error(res, missing ? 404 : 422, reason_code(e.reason()), e.what());
  } catch (const ConfigError& e) {
    error(res, 502, "backend-config", e.what());
  } catch (const BackendError& e) {
    error(res, 502, "backend-failure", e.what());
  }
}

void Service::Impl::remove(const httplib::Request& req, httplib::Response& res) {
  std::lock_guard lock(mutex);
  if (sessions.erase(req.matches[1].str()) == 0) return error(res, 404, "not-found", "unknown session id");
  res.status = 204;
}

void Service::Impl::snapshot() {
  if (!config.snapshot_dir) return;
  std::filesystem::create_directories(*config.snapshot_dir);
  std::lock_guard lock(mutex);
  for (const auto& [id, s] : sessions) save_session(*s, *config.snapshot_dir / (id + ".json"));
}

Service::Service(ServiceConfig config, BackendFactory factory) : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
  impl_->factory = std::move(factory);
  impl_->routes();
}

Service::~Service() {
  if (impl_->worker.joinable()) {
    impl_->server.stop();
    impl_->worker.join();
  }
}

int Service::bind() {
  if (impl_->bound_port >= 0) return impl_->bound_port;
  const auto& c = impl_->config;
  impl_->bound_port = c.port == 0 ? impl_->server.bind_to_any_port(c.host)
                                  : (impl_->server.bind_to_port(c.host, c.port) ? c.port : -1);
  if (impl_->bound_port < 0)
    throw std::runtime_error("cannot bind " + c.host + ":" + std::to_string(c.port));
  return impl_->bound_port;
}

void Service::run() {
  bind();
  impl_->server.listen_after_bind();
}

void Service::start() {
  bind();
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void Service::stop() {
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
  impl_->snapshot();
}

}  // namespace worldkeeper
