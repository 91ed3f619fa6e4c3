#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "worldkeeper/world.hpp"

namespace worldkeeper {

// Predicted world changes, as parsed. Payloads are raw names; they are
// resolved against a world only during validation.

struct Move {
  std::string character;
  std::string destination;
  friend bool operator==(const Move&, const Move&) = default;
};

struct Take {
  std::string item;
  std::string character;
  friend bool operator==(const Take&, const Take&) = default;
};

struct Drop {
  std::string item;
  std::string character;
  friend bool operator==(const Drop&, const Drop&) = default;
};

struct Give {
  std::string item;
  std::string giver;
  std::string receiver;
  friend bool operator==(const Give&, const Give&) = default;
};

struct Unblock {
  std::string target;
  std::string from;
  friend bool operator==(const Unblock&, const Unblock&) = default;
};

struct NoChange {
  friend bool operator==(const NoChange&, const NoChange&) = default;
};

using WorldChange = std::variant<Move, Take, Drop, Give, Unblock, NoChange>;

enum class RejectReason {
  UnknownName,
  NotConnected,
  BlockedPath,
  NotGettable,
  NotPresent,
  NotInInventory,
  NotCoLocated,
  NotBlocked,
  ParseError,
};

/// Wire code, e.g. "unknown-name".
std::string_view reason_code(RejectReason reason);
std::optional<RejectReason> reason_from_code(std::string_view code);

struct Rejection {
  std::string line;                   // grammar form of the change, or the raw malformed line
  std::optional<WorldChange> change;  // empty for parse errors
  RejectReason reason = RejectReason::ParseError;
  std::string subject;                // the offending name (or the raw line)
  std::string detail;                 // short human phrase, e.g. "unknown item"

  friend bool operator==(const Rejection&, const Rejection&) = default;
};

struct ParseResult {
  std::vector<WorldChange> changes;
  std::vector<Rejection> rejections;
};

/// Extracts change lines from free LLM output. Lines whose first token is
/// not a keyword are skipped as prose; keyword lines must parse fully.
ParseResult parse_changes(std::string_view text);

/// Canonical grammar line for a change (no trailing newline).
std::string format_change(const WorldChange& change);

// Resolved changes reference world ids.
struct ResolvedMove { CharacterId character; LocationId destination; };
struct ResolvedTake { ItemId item; CharacterId character; };
struct ResolvedDrop { ItemId item; CharacterId character; };
struct ResolvedGive { ItemId item; CharacterId giver; CharacterId receiver; };
struct ResolvedUnblock { LocationId target; LocationId from; };
struct ResolvedNone {};

using ResolvedChange = std::variant<ResolvedMove, ResolvedTake, ResolvedDrop, ResolvedGive,
                                    ResolvedUnblock, ResolvedNone>;

/// Extra gameplay rule consulted after the structural checks pass; return a
/// rejection to veto. Unset by default.
using ChangeRule = std::function<std::optional<Rejection>(const World&, const ResolvedChange&)>;

using Validation = std::variant<ResolvedChange, Rejection>;

/// The consistency check for one change against the given world.
Validation validate_change(const World& world, const WorldChange& change,
                           const ChangeRule& extra_rule = {});

/// Applies a resolved change through the primitive mutators.
World apply_resolved(World world, const ResolvedChange& change);

/// Restates a resolved change with the world's canonical names.
WorldChange canonical_change(const World& world, const ResolvedChange& change);

struct ApplyResult {
  World world;
  std::vector<WorldChange> applied;  // canonical names, NoChange omitted
  std::vector<Rejection> rejected;
};

/// Validates each change against the evolving world and applies the valid
/// ones in order. Rejected changes leave the world untouched.
ApplyResult apply_changes(World world, const std::vector<WorldChange>& changes,
                          const ChangeRule& extra_rule = {});

}  // namespace worldkeeper
