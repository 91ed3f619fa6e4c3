#include "worldkeeper/session.hpp"

#include <algorithm>

#include "worldkeeper/render.hpp"
#include "worldkeeper/world_io.hpp"

namespace worldkeeper {

using nlohmann::json;

namespace {

json lines_of(const std::vector<WorldChange>& changes) {
  json arr = json::array();
  for (const auto& c : changes) arr.push_back(format_change(c));
  return arr;
}

std::vector<WorldChange> changes_from(const json& arr) {
  std::vector<WorldChange> out;
  for (const auto& line : arr) {
    auto parsed = parse_changes(line.get<std::string>());
    if (parsed.changes.size() != 1 || !parsed.rejections.empty())
      throw SessionFileError("bad change line in history: " + line.get<std::string>());
    out.push_back(std::move(parsed.changes.front()));
  }
  return out;
}

json rejection_to_json(const Rejection& r) {
  return {{"line", r.line},
          {"reason", std::string(reason_code(r.reason))},
          {"subject", r.subject},
          {"detail", r.detail}};
}

Rejection rejection_from_json(const json& doc) {
  Rejection r;
  r.line = doc.at("line").get<std::string>();
  const auto code = doc.at("reason").get<std::string>();
  auto reason = reason_from_code(code);
  if (!reason) throw SessionFileError("unknown rejection reason '" + code + "'");
  r.reason = *reason;
  r.subject = doc.at("subject").get<std::string>();
  r.detail = doc.at("detail").get<std::string>();
  if (r.reason != RejectReason::ParseError) {
    auto parsed = parse_changes(r.line);
    if (parsed.changes.size() == 1) r.change = parsed.changes.front();
  }
  return r;
}

std::string trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return std::string(s.substr(b, s.find_last_not_of(ws) - b + 1));
}

}  // namespace

json to_json(const TurnReport& r, bool redact_raw) {
  json rejected = json::array();
  for (const auto& rej : r.rejected) rejected.push_back(rejection_to_json(rej));
  return {{"record", "turn"},
          {"schema_version", kSchemaVersion},
          {"turn", r.turn},
          {"input", r.input},
          {"raw_output", redact_raw ? std::string("[redacted]") : r.raw_output},
          {"parsed", lines_of(r.parsed)},
          {"applied", lines_of(r.applied)},
          {"rejected", std::move(rejected)},
          {"narration", r.narration},
          {"digest_before", r.digest_before},
          {"digest_after", r.digest_after}};
}

json to_json(const ItemRecord& r) {
  return {{"record", "item"},
          {"schema_version", kSchemaVersion},
          {"location", r.location},
          {"item", item_to_json(r.item)},
          {"attempts", r.attempts},
          {"digest_before", r.digest_before},
          {"digest_after", r.digest_after}};
}

json to_json(const HistoryEntry& entry) {
  return std::visit([](const auto& e) { return to_json(e); }, entry);
}

HistoryEntry history_entry_from_json(const json& doc) {
  try {
    if (doc.at("schema_version").get<int>() != kSchemaVersion)
      throw SessionFileError("unsupported record schema version");
    const auto kind = doc.at("record").get<std::string>();
    if (kind == "turn") {
      TurnReport r;
      r.turn = doc.at("turn").get<int>();
      r.input = doc.at("input").get<std::string>();
      r.raw_output = doc.at("raw_output").get<std::string>();
      r.parsed = changes_from(doc.at("parsed"));
      r.applied = changes_from(doc.at("applied"));
      for (const auto& rej : doc.at("rejected")) r.rejected.push_back(rejection_from_json(rej));
      r.narration = doc.at("narration").get<std::string>();
      r.digest_before = doc.at("digest_before").get<std::string>();
      r.digest_after = doc.at("digest_after").get<std::string>();
      return r;
    }
    if (kind == "item") {
      ItemRecord r;
      r.location = doc.at("location").get<std::string>();
      const auto& it = doc.at("item");
      r.item.name = it.at("name").get<std::string>();
      r.item.descriptions = it.at("descriptions").get<std::vector<std::string>>();
      r.item.gettable = it.at("gettable").get<bool>();
      r.attempts = doc.at("attempts").get<int>();
      r.digest_before = doc.at("digest_before").get<std::string>();
      r.digest_after = doc.at("digest_after").get<std::string>();
      return r;
    }
    throw SessionFileError("unknown history record kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw SessionFileError(std::string("malformed history record: ") + e.what());
  }
}

World replay_history(const World& initial, const std::vector<HistoryEntry>& history) {
  World world = initial;
  for (const auto& entry : history) {
    std::visit(
        [&](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if (world_digest(world) != e.digest_before)
            throw SessionFileError("history digest chain is broken");
          if constexpr (std::is_same_v<T, TurnReport>) {
            auto result = apply_changes(world, e.applied);
            if (!result.rejected.empty())
              throw SessionFileError("turn " + std::to_string(e.turn) + " no longer applies");
            world = std::move(result.world);
          } else {
            auto where = find_location(world, e.location);
            if (!where) throw SessionFileError("generated item location '" + e.location + "' is unknown");
            try {
              world = add_item(std::move(world), e.item, *where).first;
            } catch (const WorldError& err) {
              throw SessionFileError(err.what());
            }
          }
          if (world_digest(world) != e.digest_after)
            throw SessionFileError("replayed digest does not match the recorded one");
        },
        entry);
  }
  return world;
}

Session::Session(std::string id, World world, BackendConfig config,
                 std::shared_ptr<Backend> backend, SessionResources resources)
    : id_(std::move(id)),
      config_(std::move(config)),
      backend_(std::move(backend)),
      resources_(std::move(resources)),
      initial_(world),
      world_(std::make_shared<const World>(std::move(world))) {
  if (auto violations = validate_world(initial_); !violations.empty())
    throw WorldLoadError(std::move(violations));
  if (!backend_) throw ConfigError("session requires a backend");
}

Session::Session(SessionData data, std::shared_ptr<Backend> backend, SessionResources resources)
    : Session(std::move(data.id), std::move(data.initial_world), std::move(data.config),
              std::move(backend), std::move(resources)) {
  if (auto violations = validate_world(data.world); !violations.empty())
    throw WorldLoadError(std::move(violations));
  if (world_digest(replay_history(initial_, data.history)) != world_digest(data.world))
    throw SessionFileError("history does not reproduce the saved world");
  world_ = std::make_shared<const World>(std::move(data.world));
  history_ = std::move(data.history);
}

Session::Exclusive::Exclusive(Session& s) : session_(s) {
  if (session_.busy_.exchange(true)) throw SessionBusy();
}

Session::Exclusive::~Exclusive() { session_.busy_.store(false); }

std::shared_ptr<const World> Session::world() const {
  std::lock_guard lock(mutex_);
  return world_;
}

std::vector<HistoryEntry> Session::history() const {
  std::lock_guard lock(mutex_);
  return history_;
}

std::optional<TurnReport> Session::last_turn() const {
  std::lock_guard lock(mutex_);
  for (auto it = history_.rbegin(); it != history_.rend(); ++it)
    if (const auto* r = std::get_if<TurnReport>(&*it)) return *r;
  return std::nullopt;
}

SessionData Session::data() const {
  std::lock_guard lock(mutex_);
  return {id_, config_, initial_, *world_, history_};
}

void Session::open_transcript(const std::filesystem::path& path, bool redact_raw, bool append) {
  std::lock_guard lock(mutex_);
  transcript_.emplace(path, std::ios::out | (append ? std::ios::app : std::ios::trunc));
  if (!*transcript_) {
    transcript_.reset();
    throw SessionFileError("cannot open transcript " + path.string());
  }
  redact_transcript_ = redact_raw;
}

void Session::commit(World next, HistoryEntry entry) {
  auto snapshot = std::make_shared<const World>(std::move(next));
  std::lock_guard lock(mutex_);
  world_ = std::move(snapshot);
  if (transcript_) {
    const auto* turn = std::get_if<TurnReport>(&entry);
    *transcript_ << (turn ? to_json(*turn, redact_transcript_) : to_json(entry)).dump() << '\n';
    transcript_->flush();
  }
  history_.push_back(std::move(entry));
}

TurnReport Session::run_turn(std::string_view player_input) {
  Exclusive guard(*this);
  const auto before = world();
  const auto input = trim(player_input);

  TurnReport report;
  {
    std::lock_guard lock(mutex_);
    report.turn = 1 + static_cast<int>(std::count_if(history_.begin(), history_.end(), [](const auto& e) {
                    return std::holds_alternative<TurnReport>(e);
                  }));
  }
  report.input = input;
  report.digest_before = world_digest(*before);

  const auto rendered = render_state(*before, before->player, resources_.templates);
  const auto update_prompt = build_update_prompt(rendered, input, resources_.fewshot);
  report.raw_output = backend_->generate(update_prompt).text;

  auto parsed = parse_changes(report.raw_output);
  auto outcome = apply_changes(*before, parsed.changes, resources_.rule);
  report.parsed = std::move(parsed.changes);
  report.applied = std::move(outcome.applied);
  report.rejected = std::move(parsed.rejections);
  report.rejected.insert(report.rejected.end(), outcome.rejected.begin(), outcome.rejected.end());
  report.digest_after = world_digest(outcome.world);

  const auto after_render = render_state(outcome.world, outcome.world.player, resources_.templates);
  const auto narrator_prompt = build_narrator_prompt(after_render, report.applied, report.rejected,
                                                     input, resources_.templates);
  report.narration = backend_->generate(narrator_prompt).text;

  commit(std::move(outcome.world), report);
  return report;
}

json session_to_json(const SessionData& d) {
  json history = json::array();
  for (const auto& e : d.history) history.push_back(to_json(e));
  return {{"schema_version", kSchemaVersion},
          {"session_id", d.id},
          {"config", config_to_json(d.config)},
          {"initial_world", world_to_json(d.initial_world)},
          {"world", world_to_json(d.world)},
          {"world_digest", world_digest(d.world)},
          {"history", std::move(history)}};
}

SessionData session_from_json(const json& doc) {
  SessionData d;
  try {
    if (!doc.is_object()) throw SessionFileError("session file must be a JSON object");
    if (doc.at("schema_version").get<int>() != kSchemaVersion)
      throw SessionFileError("unsupported session schema version");
    d.id = doc.at("session_id").get<std::string>();
    d.config = config_from_json(doc.at("config"));
    d.initial_world = world_from_json(doc.at("initial_world"));
    d.world = world_from_json(doc.at("world"));
    if (world_digest(d.world) != doc.at("world_digest").get<std::string>())
      throw SessionFileError("world digest does not match the saved world");
    for (const auto& rec : doc.at("history")) d.history.push_back(history_entry_from_json(rec));
  } catch (const json::exception& e) {
    throw SessionFileError(std::string("malformed session file: ") + e.what());
  }
  if (world_digest(replay_history(d.initial_world, d.history)) != world_digest(d.world))
    throw SessionFileError("history does not reproduce the saved world");
  return d;
}

void save_session(const Session& session, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::out | std::ios::trunc);
  if (!out) throw SessionFileError("cannot write session file " + path.string());
  out << session_to_json(session.data()).dump(2) << '\n';
}

SessionData load_session(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SessionFileError("cannot open session file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SessionFileError(std::string("session file is not JSON: ") + e.what());
  }
  return session_from_json(doc);
}

}  // namespace worldkeeper
