#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace worldkeeper {

/// Opaque key for one component kind. Ids from different kinds never compare.
template <class Tag>
struct Id {
  std::uint32_t value = 0;
  friend auto operator<=>(const Id&, const Id&) = default;
};

using ItemId = Id<struct ItemTag>;
using LocationId = Id<struct LocationTag>;
using CharacterId = Id<struct CharacterTag>;

struct Item {
  std::string name;
  std::vector<std::string> descriptions;
  bool gettable = false;

  friend bool operator==(const Item&, const Item&) = default;
};

struct Location {
  std::string name;
  std::vector<std::string> descriptions;
  std::set<ItemId> items;
  std::set<LocationId> connecting;
  std::set<LocationId> blocked;

  friend bool operator==(const Location&, const Location&) = default;
};

struct Character {
  std::string name;
  std::vector<std::string> descriptions;
  LocationId location;
  std::set<ItemId> inventory;

  friend bool operator==(const Character&, const Character&) = default;
};

/// The complete fictional state. Containers hold item ids; the items
/// themselves live once, in the registry.
struct World {
  std::map<ItemId, Item> items;
  std::map<LocationId, Location> locations;
  std::map<CharacterId, Character> characters;
  CharacterId player;

  friend bool operator==(const World&, const World&) = default;
};

/// Where an item currently sits: a location floor or a character inventory.
using Container = std::variant<LocationId, CharacterId>;

/// Raised for structural misuse (dangling ids, self references). Gameplay
/// rejections never surface as WorldError.
class WorldError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Violation {
  std::string component;  // e.g. "item 'Sword'"
  std::string rule;       // e.g. "placement-uniqueness"
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

std::string to_string(const Violation& v);

/// Empty iff every structural invariant holds.
std::vector<Violation> validate_world(const World& world);

/// Advisory findings that are not invariant violations (currently: one-way
/// connections).
std::vector<std::string> lint_world(const World& world);

// Case-insensitive name comparison (ASCII folding) on the full name.
bool names_equal(std::string_view a, std::string_view b);
std::string fold_name(std::string_view name);

std::optional<ItemId> find_item(const World& world, std::string_view name);
std::optional<LocationId> find_location(const World& world, std::string_view name);
std::optional<CharacterId> find_character(const World& world, std::string_view name);

const Item& item(const World& world, ItemId id);
const Location& location(const World& world, LocationId id);
const Character& character(const World& world, CharacterId id);

/// Every container currently holding the item (exactly one in a valid world).
std::vector<Container> containers_of(const World& world, ItemId id);

/// The ids a scoped rendering is allowed to show for one viewpoint.
struct ScopeSet {
  LocationId here;
  std::set<ItemId> items;
  std::set<CharacterId> characters;
  std::set<LocationId> name_only;  // adjacent locations, names only

  bool contains(ItemId id) const { return items.contains(id); }
  bool contains(CharacterId id) const { return characters.contains(id); }
  bool contains(LocationId id) const { return id == here || name_only.contains(id); }

  friend bool operator==(const ScopeSet&, const ScopeSet&) = default;
};

ScopeSet scope_of(const World& world, CharacterId viewpoint);

// Primitive mutators. Each takes the world by value and returns the edited
// copy. They assume gameplay validation already happened and throw
// WorldError only for dangling ids or self references.
World move_item(World world, ItemId id, Container destination);
World move_character(World world, CharacterId who, LocationId destination);
World take(World world, ItemId id, CharacterId taker);
World drop(World world, ItemId id, CharacterId holder);
World give(World world, ItemId id, CharacterId giver, CharacterId receiver);
/// Turns `target` from a blocked into a connecting location of `from`.
World unblock(World world, LocationId from, LocationId target);

/// Registers a new item at `where`. Throws WorldError on a name collision.
std::pair<World, ItemId> add_item(World world, Item fresh, LocationId where);

}  // namespace worldkeeper
