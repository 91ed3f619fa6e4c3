#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "worldkeeper/backend.hpp"
#include "worldkeeper/change.hpp"
#include "worldkeeper/prompt.hpp"
#include "worldkeeper/templates.hpp"
#include "worldkeeper/world.hpp"

namespace worldkeeper {

inline constexpr int kSchemaVersion = 1;

/// Audit record of one turn: what the model predicted and what the world
/// actually accepted.
struct TurnReport {
  int turn = 0;
  std::string input;
  std::string raw_output;
  std::vector<WorldChange> parsed;
  std::vector<WorldChange> applied;
  std::vector<Rejection> rejected;  // malformed lines first, then failed checks
  std::string narration;
  std::string digest_before;
  std::string digest_after;

  friend bool operator==(const TurnReport&, const TurnReport&) = default;
};

/// A generated item that was registered in the world.
struct ItemRecord {
  std::string location;
  Item item;
  int attempts = 1;
  std::string digest_before;
  std::string digest_after;

  friend bool operator==(const ItemRecord&, const ItemRecord&) = default;
};

using HistoryEntry = std::variant<TurnReport, ItemRecord>;

nlohmann::json to_json(const TurnReport& report, bool redact_raw = false);
nlohmann::json to_json(const ItemRecord& record);
nlohmann::json to_json(const HistoryEntry& entry);
HistoryEntry history_entry_from_json(const nlohmann::json& doc);

/// Raised when a turn or generation is requested while another is running.
class SessionBusy : public std::runtime_error {
 public:
  SessionBusy() : std::runtime_error("session is busy with another request") {}
};

class SessionFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SessionResources {
  TemplateTable templates = TemplateTable::defaults();
  FewShotTable fewshot = FewShotTable::defaults();
  ChangeRule rule;
};

/// Everything persisted for a session (credential values are never stored).
struct SessionData {
  std::string id;
  BackendConfig config;
  World initial_world;
  World world;
  std::vector<HistoryEntry> history;
};

/// Re-applies history to `initial`. Throws SessionFileError if any recorded
/// change no longer applies or a digest does not match.
World replay_history(const World& initial, const std::vector<HistoryEntry>& history);

class Session {
 public:
  Session(std::string id, World world, BackendConfig config, std::shared_ptr<Backend> backend,
          SessionResources resources = {});
  Session(SessionData data, std::shared_ptr<Backend> backend, SessionResources resources = {});

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  /// Runs one full turn: render, predict, parse, check, apply, narrate.
  /// On any error the world is left exactly as it was.
  TurnReport run_turn(std::string_view player_input);

  const std::string& id() const { return id_; }
  const BackendConfig& config() const { return config_; }
  const SessionResources& resources() const { return resources_; }
  const World& initial_world() const { return initial_; }
  std::shared_ptr<Backend> backend() const { return backend_; }

  /// Immutable snapshot of the current world; never blocks on a turn.
  std::shared_ptr<const World> world() const;
  std::vector<HistoryEntry> history() const;
  std::optional<TurnReport> last_turn() const;
  SessionData data() const;

  /// Appends each new history record to a JSON-lines file. The file is
  /// truncated first unless `append` is set.
  void open_transcript(const std::filesystem::path& path, bool redact_raw = false,
                       bool append = false);

  /// One-writer guard shared by turns and generation.
  class Exclusive {
   public:
    explicit Exclusive(Session& s);
    ~Exclusive();
    Exclusive(const Exclusive&) = delete;
    Exclusive& operator=(const Exclusive&) = delete;

   private:
    Session& session_;
  };

  /// Installs a new world and records the entry. Caller holds Exclusive.
  void commit(World next, HistoryEntry entry);

 private:
  std::string id_;
  BackendConfig config_;
  std::shared_ptr<Backend> backend_;
  SessionResources resources_;
  World initial_;

  mutable std::mutex mutex_;  // guards world_, history_, transcript_
  std::shared_ptr<const World> world_;
  std::vector<HistoryEntry> history_;
  std::optional<std::ofstream> transcript_;
  bool redact_transcript_ = false;

  std::atomic<bool> busy_{false};
};

void save_session(const Session& session, const std::filesystem::path& path);
SessionData load_session(const std::filesystem::path& path);

nlohmann::json session_to_json(const SessionData& data);
SessionData session_from_json(const nlohmann::json& doc);

}  // namespace worldkeeper
