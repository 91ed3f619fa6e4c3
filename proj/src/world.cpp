#include "worldkeeper/world.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

namespace worldkeeper {

namespace {

std::string quoted(std::string_view kind, std::string_view name) {
  return std::string(kind) + " '" + std::string(name) + "'";
}

template <class Registry>
void check_names(const Registry& registry, std::string_view kind,
                 std::vector<Violation>& out) {
  std::unordered_map<std::string, std::string> seen;
  for (const auto& [id, component] : registry) {
    if (component.name.empty()) {
      out.push_back({std::string(kind) + " #" + std::to_string(id.value),
                     "name-non-empty", "display name is empty"});
      continue;
    }
    auto [it, fresh] = seen.emplace(fold_name(component.name), component.name);
    if (!fresh) {
      out.push_back({quoted(kind, component.name), "name-unique",
                     "collides with '" + it->second + "'"});
    }
  }
}

template <class Registry>
void check_descriptions(const Registry& registry, std::string_view kind,
                        std::vector<Violation>& out) {
  for (const auto& [id, component] : registry) {
    for (std::size_t i = 0; i < component.descriptions.size(); ++i) {
      if (component.descriptions[i].empty()) {
        out.push_back({quoted(kind, component.name), "description-non-empty",
                       "description " + std::to_string(i) + " is empty"});
      }
    }
  }
}

template <class Registry, class Key>
auto& must_find(Registry& registry, Key id, std::string_view kind) {
  auto it = registry.find(id);
  if (it == registry.end()) {
    throw WorldError("unknown " + std::string(kind) + " id " + std::to_string(id.value));
  }
  return it->second;
}

void remove_from_containers(World& world, ItemId id) {
  for (auto& [_, loc] : world.locations) loc.items.erase(id);
  for (auto& [_, ch] : world.characters) ch.inventory.erase(id);
}

}  // namespace

std::string to_string(const Violation& v) {
  return v.component + ": " + v.rule + " (" + v.detail + ")";
}

std::string fold_name(std::string_view name) {
  std::string out(name);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool names_equal(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

std::optional<ItemId> find_item(const World& world, std::string_view name) {
  for (const auto& [id, it] : world.items)
    if (names_equal(it.name, name)) return id;
  return std::nullopt;
}

std::optional<LocationId> find_location(const World& world, std::string_view name) {
  for (const auto& [id, loc] : world.locations)
    if (names_equal(loc.name, name)) return id;
  return std::nullopt;
}

std::optional<CharacterId> find_character(const World& world, std::string_view name) {
  for (const auto& [id, ch] : world.characters)
    if (names_equal(ch.name, name)) return id;
  return std::nullopt;
}

const Item& item(const World& world, ItemId id) { return must_find(world.items, id, "item"); }

const Location& location(const World& world, LocationId id) {
  return must_find(world.locations, id, "location");
}

const Character& character(const World& world, CharacterId id) {
  return must_find(world.characters, id, "character");
}

std::vector<Container> containers_of(const World& world, ItemId id) {
  std::vector<Container> out;
  for (const auto& [lid, loc] : world.locations)
    if (loc.items.contains(id)) out.emplace_back(lid);
  for (const auto& [cid, ch] : world.characters)
    if (ch.inventory.contains(id)) out.emplace_back(cid);
  return out;
}

std::vector<Violation> validate_world(const World& world) {
  std::vector<Violation> out;
  check_names(world.items, "item", out);
  check_names(world.locations, "location", out);
  check_names(world.characters, "character", out);
  check_descriptions(world.items, "item", out);
  check_descriptions(world.locations, "location", out);
  check_descriptions(world.characters, "character", out);

  std::map<ItemId, int> placements;
  for (const auto& [lid, loc] : world.locations) {
    const auto who = quoted("location", loc.name);
    for (auto other : loc.connecting) {
      if (other == lid) out.push_back({who, "no-self-reference", "lists itself in connecting"});
      if (!world.locations.contains(other))
        out.push_back({who, "referential-closure",
                       "connecting location #" + std::to_string(other.value) + " does not exist"});
      if (loc.blocked.contains(other))
        out.push_back({who, "connecting-blocked-disjoint",
                       "location #" + std::to_string(other.value) + " is both connecting and blocked"});
    }
    for (auto other : loc.blocked) {
      if (other == lid) out.push_back({who, "no-self-reference", "lists itself in blocked"});
      if (!world.locations.contains(other))
        out.push_back({who, "referential-closure",
                       "blocked location #" + std::to_string(other.value) + " does not exist"});
    }
    for (auto id : loc.items) {
      if (!world.items.contains(id))
        out.push_back({who, "referential-closure",
                       "item #" + std::to_string(id.value) + " does not exist"});
      ++placements[id];
    }
  }
  for (const auto& [cid, ch] : world.characters) {
    const auto who = quoted("character", ch.name);
    if (!world.locations.contains(ch.location))
      out.push_back({who, "referential-closure",
                     "location #" + std::to_string(ch.location.value) + " does not exist"});
    for (auto id : ch.inventory) {
      if (!world.items.contains(id))
        out.push_back({who, "referential-closure",
                       "inventory item #" + std::to_string(id.value) + " does not exist"});
      ++placements[id];
    }
  }
  for (const auto& [id, it] : world.items) {
    const int n = placements.contains(id) ? placements.at(id) : 0;
    if (n != 1)
      out.push_back({quoted("item", it.name), "placement-uniqueness",
                     "held by " + std::to_string(n) + " containers"});
  }
  if (!world.characters.contains(world.player))
    out.push_back({"world", "player-exists",
                   "player character #" + std::to_string(world.player.value) + " does not exist"});
  return out;
}

std::vector<std::string> lint_world(const World& world) {
  std::vector<std::string> out;
  for (const auto& [lid, loc] : world.locations) {
    for (auto other : loc.connecting) {
      auto it = world.locations.find(other);
      if (it == world.locations.end() || other == lid) continue;
      if (!it->second.connecting.contains(lid) && !it->second.blocked.contains(lid))
        out.push_back("one-way connection: '" + loc.name + "' -> '" + it->second.name + "'");
    }
  }
  return out;
}

ScopeSet scope_of(const World& world, CharacterId viewpoint) {
  const auto& who = character(world, viewpoint);
  const auto& here = location(world, who.location);
  ScopeSet scope;
  scope.here = who.location;
  scope.items = here.items;
  for (const auto& [cid, ch] : world.characters) {
    if (ch.location != who.location) continue;
    scope.characters.insert(cid);
    scope.items.insert(ch.inventory.begin(), ch.inventory.end());
  }
  scope.name_only.insert(here.connecting.begin(), here.connecting.end());
  scope.name_only.insert(here.blocked.begin(), here.blocked.end());
  return scope;
}

World move_item(World world, ItemId id, Container destination) {
  must_find(world.items, id, "item");
  std::visit([&](auto dest) {
    if constexpr (std::is_same_v<decltype(dest), LocationId>) {
      auto& loc = must_find(world.locations, dest, "location");
      remove_from_containers(world, id);
      loc.items.insert(id);
    } else {
      auto& ch = must_find(world.characters, dest, "character");
      remove_from_containers(world, id);
      ch.inventory.insert(id);
    }
  }, destination);
  return world;
}

World move_character(World world, CharacterId who, LocationId destination) {
  must_find(world.locations, destination, "location");
  must_find(world.characters, who, "character").location = destination;
  return world;
}

World take(World world, ItemId id, CharacterId taker) {
  return move_item(std::move(world), id, taker);
}

World drop(World world, ItemId id, CharacterId holder) {
  const auto where = character(world, holder).location;
  return move_item(std::move(world), id, where);
}

World give(World world, ItemId id, CharacterId giver, CharacterId receiver) {
  must_find(world.characters, giver, "character");
  return move_item(std::move(world), id, receiver);
}

World unblock(World world, LocationId from, LocationId target) {
  if (from == target) throw WorldError("a location cannot unblock itself");
  must_find(world.locations, target, "location");
  auto& loc = must_find(world.locations, from, "location");
  loc.blocked.erase(target);
  loc.connecting.insert(target);
  return world;
}

std::pair<World, ItemId> add_item(World world, Item fresh, LocationId where) {
  auto& loc = must_find(world.locations, where, "location");
  if (find_item(world, fresh.name))
    throw WorldError("item name '" + fresh.name + "' already exists");
  const ItemId id{world.items.empty() ? 1 : world.items.rbegin()->first.value + 1};
  world.items.emplace(id, std::move(fresh));
  loc.items.insert(id);
  return {std::move(world), id};
}

}  // namespace worldkeeper
