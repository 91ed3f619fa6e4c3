#include "worldkeeper/cli.hpp"

#include <csignal>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>

#include "worldkeeper/generation.hpp"
#include "worldkeeper/render.hpp"
#include "worldkeeper/service.hpp"
#include "worldkeeper/session.hpp"
#include "worldkeeper/world_io.hpp"

namespace worldkeeper {

namespace {

struct PlayOptions {
  std::string world;
  std::string backend;
  std::string script;
  std::string config;
  std::string transcript;
  std::optional<std::uint64_t> seed;
  bool quiet_rejections = false;
  std::string templates;
  std::string fewshot;
};

std::string trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return std::string(s.substr(b, s.find_last_not_of(ws) - b + 1));
}

std::string session_id(std::optional<std::uint64_t> seed) {
  std::mt19937_64 rng(seed ? *seed : std::random_device{}());
  std::ostringstream id;
  id << "cli-" << std::hex << rng();
  return id.str();
}

void print_indented(std::ostream& out, std::string_view text) {
  std::istringstream lines{std::string(text)};
  for (std::string line; std::getline(lines, line);) out << "  " << line << '\n';
}

void print_debug(std::ostream& out, const TurnReport& r) {
  out << "turn " << r.turn << ": " << r.input << '\n';
  out << "raw output:\n";
  print_indented(out, r.raw_output);
  out << "parsed:\n";
  if (r.parsed.empty()) out << "  (none)\n";
  for (const auto& c : r.parsed) out << "  " << format_change(c) << '\n';
  out << "applied:\n";
  if (r.applied.empty()) out << "  (none)\n";
  for (const auto& c : r.applied) out << "  " << format_change(c) << '\n';
  out << "rejected:\n";
  if (r.rejected.empty()) out << "  (none)\n";
  for (const auto& rej : r.rejected)
    out << "  " << rej.line << " [" << reason_code(rej.reason) << "] " << rej.detail << '\n';
  out << "digest: " << r.digest_before << " -> " << r.digest_after << '\n';
}

class Repl {
 public:
  Repl(std::unique_ptr<Session> session, const PlayOptions& options, std::ostream& out,
       std::ostream& err)
      : session_(std::move(session)), options_(options), out_(out), err_(err) {}

  /// Returns true when the loop should end.
  bool handle(const std::string& line) {
    if (line.front() != '/') {
      turn(line);
      return false;
    }
    const auto space = line.find(' ');
    const auto command = line.substr(0, space);
    const auto arg = space == std::string::npos ? std::string() : trim(line.substr(space + 1));
    if (command == "/quit") return true;
    if (command == "/state") {
      const auto world = session_->world();
      out_ << render_state(*world, world->player, session_->resources().templates).text;
    } else if (command == "/debug") {
      if (auto last = session_->last_turn()) print_debug(out_, *last);
      else out_ << "no turns yet\n";
    } else if (command == "/genitem") {
      genitem(arg);
    } else if (command == "/save") {
      save(arg);
    } else if (command == "/load") {
      load(arg);
    } else {
      err_ << "unknown command " << command
           << " (try /state, /debug, /genitem, /save, /load, /quit)\n";
    }
    return false;
  }

 private:
  void turn(const std::string& input) {
    try {
      const auto report = session_->run_turn(input);
      out_ << report.narration << '\n';
      if (!options_.quiet_rejections)
        for (const auto& r : report.rejected) out_ << "rejected: " << r.subject << " (" << r.detail << ")\n";
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << '\n';
    }
  }

  void genitem(const std::string& brief) {
    try {
      const auto world = session_->world();
      const auto& here = location(*world, character(*world, world->player).location).name;
      const auto made = generate_item(*session_, here, brief);
      out_ << "created: " << made.item.name << '\n';
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << '\n';
    }
  }

  void save(const std::string& path) {
    if (path.empty()) {
      err_ << "usage: /save <file>\n";
      return;
    }
    try {
      save_session(*session_, path);
      out_ << "saved " << path << '\n';
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << '\n';
    }
  }

  void load(const std::string& path) {
    if (path.empty()) {
      err_ << "usage: /load <file>\n";
      return;
    }
    try {
      auto next = std::make_unique<Session>(load_session(path), session_->backend(),
                                            session_->resources());
      if (!options_.transcript.empty()) next->open_transcript(options_.transcript, false, true);
      session_ = std::move(next);
      out_ << "loaded " << path << '\n';
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << '\n';
    }
  }

  std::unique_ptr<Session> session_;
  const PlayOptions& options_;
  std::ostream& out_;
  std::ostream& err_;
};

int play(const PlayOptions& o, std::istream& in, std::ostream& out, std::ostream& err) {
  std::unique_ptr<Session> session;
  try {
    auto world = load_world(o.world);
    BackendConfig config = o.config.empty() ? BackendConfig{} : load_config(o.config);
    if (o.backend == "scripted") config.kind = BackendKind::Scripted;
    else if (o.backend == "http") config.kind = BackendKind::Http;
    config.validate();

    SessionResources resources;
    if (!o.templates.empty()) resources.templates = TemplateTable::load(o.templates);
    if (!o.fewshot.empty()) resources.fewshot = FewShotTable::load(o.fewshot);

    Script script = o.script.empty() ? Script{} : load_script(o.script);
    std::shared_ptr<Backend> backend = make_backend(config, std::move(script));
    session = std::make_unique<Session>(session_id(o.seed), std::move(world), config, backend,
                                        std::move(resources));
    if (!o.transcript.empty()) session->open_transcript(o.transcript);
    for (const auto& warning : lint_world(*session->world())) err << "warning: " << warning << '\n';
  } catch (const WorldLoadError& e) {
    err << "error: cannot load world " << o.world << '\n';
    for (const auto& v : e.violations()) err << "  " << to_string(v) << '\n';
    return kExitFatal;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFatal;
  }

  Repl repl(std::move(session), o, out, err);
  out << "> " << std::flush;
  for (std::string raw; std::getline(in, raw);) {
    const auto line = trim(raw);
    if (!line.empty() && repl.handle(line)) return kExitOk;
    out << "> " << std::flush;
  }
  out << '\n';
  return kExitOk;
}

int serve(const ServiceConfig& config, std::ostream& out, std::ostream& err) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    Service service(config);
    const int port = service.bind();
    out << "listening on " << config.host << ':' << port << std::endl;
    std::thread waiter([&] {
      int sig = 0;
      sigwait(&signals, &sig);
      service.stop();
    });
    service.run();
    waiter.join();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFatal;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Grounded interactive storytelling engine", "worldkeeper"};
  app.require_subcommand(1);

  PlayOptions play_opts;
  auto* play_cmd = app.add_subcommand("play", "Play a world in the terminal");
  play_cmd->add_option("--world", play_opts.world, "World file (JSON)")->required();
  play_cmd->add_option("--backend", play_opts.backend, "Text generation backend")
      ->check(CLI::IsMember({"scripted", "http"}));
  play_cmd->add_option("--script", play_opts.script, "Canned responses for the scripted backend");
  play_cmd->add_option("--config", play_opts.config, "Backend config file (JSON)");
  play_cmd->add_option("--transcript", play_opts.transcript, "Write turn records (JSON lines)");
  play_cmd->add_option("--seed", play_opts.seed, "Seed for the session id");
  play_cmd->add_flag("--quiet-rejections", play_opts.quiet_rejections,
                     "Do not print rejected changes after each turn");
  play_cmd->add_option("--templates", play_opts.templates, "Rendering template table");
  play_cmd->add_option("--fewshot", play_opts.fewshot, "Few-shot example file");

  ServiceConfig service_opts;
  std::string snapshot_dir;
  auto* serve_cmd = app.add_subcommand("serve", "Serve sessions over HTTP");
  serve_cmd->add_option("--host", service_opts.host, "Listen address");
  serve_cmd->add_option("--port", service_opts.port, "Listen port (0 picks one)");
  serve_cmd->add_flag("--cors", service_opts.cors, "Send permissive cross-origin headers");
  serve_cmd->add_flag("--redact-raw", service_opts.redact_raw, "Hide raw model output in reports");
  serve_cmd->add_option("--snapshot-dir", snapshot_dir, "Save sessions here on shutdown");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (play_cmd->parsed()) return play(play_opts, in, out, err);
  if (!snapshot_dir.empty()) service_opts.snapshot_dir = snapshot_dir;
  return serve(service_opts, out, err);
}

}  // namespace worldkeeper
