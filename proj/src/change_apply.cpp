#include "worldkeeper/change.hpp"
#include <array>

namespace worldkeeper {

namespace {

constexpr std::array<std::pair<RejectReason, std::string_view>, 9> kReasonCodes = {{
    {RejectReason::UnknownName, "unknown-name"},
    {RejectReason::NotConnected, "not-connected"},
    {RejectReason::BlockedPath, "blocked-path"},
    {RejectReason::NotGettable, "not-gettable"},
    {RejectReason::NotPresent, "not-present"},
    {RejectReason::NotInInventory, "not-in-inventory"},
    {RejectReason::NotCoLocated, "not-co-located"},
    {RejectReason::NotBlocked, "not-blocked"},
    {RejectReason::ParseError, "parse-error"},
}};

struct Reject {
  RejectReason reason;
  std::string subject;
  std::string detail;
};

template <class IdT>
IdT need(std::optional<IdT> id, const std::string& name, const char* kind) {
  if (!id) throw Reject{RejectReason::UnknownName, name, std::string("unknown ") + kind};
  return *id;
}

ItemId need_item(const World& w, const std::string& n) { return need(find_item(w, n), n, "item"); }
LocationId need_location(const World& w, const std::string& n) {
  return need(find_location(w, n), n, "location");
}
CharacterId need_character(const World& w, const std::string& n) {
  return need(find_character(w, n), n, "character");
}

struct Resolver {
  const World& world;

  ResolvedChange operator()(const Move& m) const {
    const auto who = need_character(world, m.character);
    const auto dest = need_location(world, m.destination);
    const auto& here = location(world, character(world, who).location);
    if (here.blocked.contains(dest)) throw Reject{RejectReason::BlockedPath, m.destination, "blocked path"};
    if (!here.connecting.contains(dest))
      throw Reject{RejectReason::NotConnected, m.destination, "not connected"};
    return ResolvedMove{who, dest};
  }

  ResolvedChange operator()(const Take& t) const {
    const auto it = need_item(world, t.item);
    const auto who = need_character(world, t.character);
    if (!location(world, character(world, who).location).items.contains(it))
      throw Reject{RejectReason::NotPresent, t.item, "not present here"};
    if (!item(world, it).gettable) throw Reject{RejectReason::NotGettable, t.item, "not gettable"};
    return ResolvedTake{it, who};
  }

  ResolvedChange operator()(const Drop& d) const {
    const auto it = need_item(world, d.item);
    const auto who = need_character(world, d.character);
    if (!character(world, who).inventory.contains(it))
      throw Reject{RejectReason::NotInInventory, d.item, "not in inventory"};
    return ResolvedDrop{it, who};
  }

  ResolvedChange operator()(const Give& g) const {
    const auto it = need_item(world, g.item);
    const auto giver = need_character(world, g.giver);
    const auto receiver = need_character(world, g.receiver);
    if (!character(world, giver).inventory.contains(it))
      throw Reject{RejectReason::NotInInventory, g.item, "not in inventory"};
    if (character(world, giver).location != character(world, receiver).location)
      throw Reject{RejectReason::NotCoLocated, g.receiver, "not co-located"};
    return ResolvedGive{it, giver, receiver};
  }

  ResolvedChange operator()(const Unblock& u) const {
    const auto target = need_location(world, u.target);
    const auto from = need_location(world, u.from);
    if (!location(world, from).blocked.contains(target))
      throw Reject{RejectReason::NotBlocked, u.target, "not blocked"};
    if (character(world, world.player).location != from)
      throw Reject{RejectReason::NotBlocked, u.from, "not the player's location"};
    return ResolvedUnblock{target, from};
  }

  ResolvedChange operator()(const NoChange&) const { return ResolvedNone{}; }
};

}  // namespace

std::string_view reason_code(RejectReason reason) {
  for (const auto& [r, code] : kReasonCodes)
    if (r == reason) return code;
  return "parse-error";
}

std::optional<RejectReason> reason_from_code(std::string_view code) {
  for (const auto& [r, c] : kReasonCodes)
    if (c == code) return r;
  return std::nullopt;
}

Validation validate_change(const World& world, const WorldChange& change,
                           const ChangeRule& extra_rule) {
  try {
    auto resolved = std::visit(Resolver{world}, change);
    if (extra_rule) {
      if (auto veto = extra_rule(world, resolved)) {
        veto->line = format_change(change);
        veto->change = change;
        return *veto;
      }
    }
    return resolved;
  } catch (const Reject& r) {
    return Rejection{format_change(change), change, r.reason, r.subject, r.detail};
  }
}

World apply_resolved(World world, const ResolvedChange& change) {
  struct Applier {
    World& w;
    World operator()(const ResolvedMove& m) { return move_character(std::move(w), m.character, m.destination); }
    World operator()(const ResolvedTake& t) { return take(std::move(w), t.item, t.character); }
    World operator()(const ResolvedDrop& d) { return drop(std::move(w), d.item, d.character); }
    World operator()(const ResolvedGive& g) { return give(std::move(w), g.item, g.giver, g.receiver); }
    World operator()(const ResolvedUnblock& u) { return unblock(std::move(w), u.from, u.target); }
    World operator()(const ResolvedNone&) { return std::move(w); }
  };
  return std::visit(Applier{world}, change);
}

WorldChange canonical_change(const World& world, const ResolvedChange& change) {
  struct Namer {
    const World& w;
    WorldChange operator()(const ResolvedMove& m) const {
      return Move{character(w, m.character).name, location(w, m.destination).name};
    }
    WorldChange operator()(const ResolvedTake& t) const {
      return Take{item(w, t.item).name, character(w, t.character).name};
    }
    WorldChange operator()(const ResolvedDrop& d) const {
      return Drop{item(w, d.item).name, character(w, d.character).name};
    }
    WorldChange operator()(const ResolvedGive& g) const {
      return Give{item(w, g.item).name, character(w, g.giver).name, character(w, g.receiver).name};
    }
    WorldChange operator()(const ResolvedUnblock& u) const {
      return Unblock{location(w, u.target).name, location(w, u.from).name};
    }
    WorldChange operator()(const ResolvedNone&) const { return NoChange{}; }
  };
  return std::visit(Namer{world}, change);
}

ApplyResult apply_changes(World world, const std::vector<WorldChange>& changes,
                          const ChangeRule& extra_rule) {
  ApplyResult result{std::move(world), {}, {}};
  for (const auto& change : changes) {
    auto outcome = validate_change(result.world, change, extra_rule);
    if (auto* rej = std::get_if<Rejection>(&outcome)) {
      result.rejected.push_back(std::move(*rej));
      continue;
    }
    const auto& resolved = std::get<ResolvedChange>(outcome);
    if (std::holds_alternative<ResolvedNone>(resolved)) continue;
    result.applied.push_back(canonical_change(result.world, resolved));
    result.world = apply_resolved(std::move(result.world), resolved);
  }
  return result;
}

}  // namespace worldkeeper
