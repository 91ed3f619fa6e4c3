#include "worldkeeper/world_io.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

namespace worldkeeper {

using nlohmann::json;

namespace {

std::string join_violations(const std::vector<Violation>& vs) {
  std::string msg = "invalid world:";
  for (const auto& v : vs) msg += "\n  " + to_string(v);
  return msg;
}

std::vector<std::string> string_list(const json& obj, const char* key, const std::string& who,
                                     std::vector<Violation>& out) {
  std::vector<std::string> list;
  if (!obj.contains(key)) return list;
  const auto& arr = obj.at(key);
  if (!arr.is_array()) {
    out.push_back({who, "schema", std::string("'") + key + "' must be an array of strings"});
    return list;
  }
  for (const auto& e : arr) {
    if (!e.is_string()) {
      out.push_back({who, "schema", std::string("'") + key + "' must be an array of strings"});
      continue;
    }
    list.push_back(e.get<std::string>());
  }
  return list;
}

std::string required_name(const json& obj, const std::string& who, std::vector<Violation>& out) {
  if (!obj.is_object() || !obj.contains("name") || !obj.at("name").is_string()) {
    out.push_back({who, "schema", "missing string 'name'"});
    return {};
  }
  return obj.at("name").get<std::string>();
}

const json& array_field(const json& doc, const char* key, std::vector<Violation>& out) {
  static const json empty = json::array();
  if (!doc.contains(key)) return empty;
  if (!doc.at(key).is_array()) {
    out.push_back({"world", "schema", std::string("'") + key + "' must be an array"});
    return empty;
  }
  return doc.at(key);
}

template <class IdT, class Finder>
std::set<IdT> resolve_all(const std::vector<std::string>& names, Finder find,
                          const std::string& who, const char* what, std::vector<Violation>& out) {
  std::set<IdT> ids;
  for (const auto& n : names) {
    if (auto id = find(n)) {
      ids.insert(*id);
    } else {
      out.push_back({who, "referential-closure", std::string(what) + " '" + n + "' does not exist"});
    }
  }
  return ids;
}

json names_of(const World& world, const std::set<ItemId>& ids) {
  json arr = json::array();
  for (auto id : ids) arr.push_back(item(world, id).name);
  return arr;
}

json names_of(const World& world, const std::set<LocationId>& ids) {
  json arr = json::array();
  for (auto id : ids) arr.push_back(location(world, id).name);
  return arr;
}

}  // namespace

WorldLoadError::WorldLoadError(std::vector<Violation> violations)
    : std::runtime_error(join_violations(violations)), violations_(std::move(violations)) {}

World world_from_json(const json& doc) {
  std::vector<Violation> errors;
  if (!doc.is_object()) throw WorldLoadError({{"world", "schema", "document must be a JSON object"}});

  World world;
  const auto& items = array_field(doc, "items", errors);
  const auto& locations = array_field(doc, "locations", errors);
  const auto& characters = array_field(doc, "characters", errors);

  // Pass 1: register every component so cross references can resolve.
  std::uint32_t next = 1;
  for (const auto& obj : items) {
    const auto who = "items[" + std::to_string(next - 1) + "]";
    Item it;
    it.name = required_name(obj, who, errors);
    it.descriptions = string_list(obj, "descriptions", who, errors);
    if (obj.is_object() && obj.contains("gettable")) {
      if (obj.at("gettable").is_boolean()) it.gettable = obj.at("gettable").get<bool>();
      else errors.push_back({who, "schema", "'gettable' must be a boolean"});
    }
    world.items.emplace(ItemId{next++}, std::move(it));
  }
  next = 1;
  for (const auto& obj : locations) {
    Location loc;
    loc.name = required_name(obj, "locations[" + std::to_string(next - 1) + "]", errors);
    world.locations.emplace(LocationId{next++}, std::move(loc));
  }
  next = 1;
  for (const auto& obj : characters) {
    Character ch;
    ch.name = required_name(obj, "characters[" + std::to_string(next - 1) + "]", errors);
    world.characters.emplace(CharacterId{next++}, std::move(ch));
  }

  auto by_item = [&](const std::string& n) { return find_item(world, n); };
  auto by_location = [&](const std::string& n) { return find_location(world, n); };

  // Pass 2: resolve references.
  next = 1;
  for (const auto& obj : locations) {
    auto& loc = world.locations.at(LocationId{next++});
    const auto who = "location '" + loc.name + "'";
    if (!obj.is_object()) continue;
    loc.descriptions = string_list(obj, "descriptions", who, errors);
    loc.items = resolve_all<ItemId>(string_list(obj, "items", who, errors), by_item, who, "item", errors);
    loc.connecting = resolve_all<LocationId>(string_list(obj, "connecting", who, errors), by_location,
                                             who, "location", errors);
    loc.blocked = resolve_all<LocationId>(string_list(obj, "blocked", who, errors), by_location, who,
                                          "location", errors);
  }
  next = 1;
  for (const auto& obj : characters) {
    const CharacterId cid{next++};
    auto& ch = world.characters.at(cid);
    const auto who = "character '" + ch.name + "'";
    if (!obj.is_object()) continue;
    ch.descriptions = string_list(obj, "descriptions", who, errors);
    ch.inventory = resolve_all<ItemId>(string_list(obj, "inventory", who, errors), by_item, who,
                                       "item", errors);
    if (!obj.contains("location") || !obj.at("location").is_string()) {
      errors.push_back({who, "schema", "missing string 'location'"});
    } else if (auto lid = find_location(world, obj.at("location").get<std::string>())) {
      ch.location = *lid;
    } else {
      errors.push_back({who, "referential-closure",
                        "location '" + obj.at("location").get<std::string>() + "' does not exist"});
    }
  }

  if (!doc.contains("player") || !doc.at("player").is_string()) {
    errors.push_back({"world", "schema", "missing string 'player'"});
  } else if (auto pid = find_character(world, doc.at("player").get<std::string>())) {
    world.player = *pid;
  } else {
    errors.push_back({"world", "player-exists",
                      "player '" + doc.at("player").get<std::string>() + "' is not a character"});
  }

  if (errors.empty()) errors = validate_world(world);
  if (!errors.empty()) throw WorldLoadError(std::move(errors));
  return world;
}

json item_to_json(const Item& it) {
  return {{"name", it.name}, {"descriptions", it.descriptions}, {"gettable", it.gettable}};
}

json world_to_json(const World& world) {
  json items = json::array();
  for (const auto& [_, it] : world.items) items.push_back(item_to_json(it));
  json locations = json::array();
  for (const auto& [_, loc] : world.locations) {
    locations.push_back({{"name", loc.name},
                         {"descriptions", loc.descriptions},
                         {"items", names_of(world, loc.items)},
                         {"connecting", names_of(world, loc.connecting)},
                         {"blocked", names_of(world, loc.blocked)}});
  }
  json characters = json::array();
  for (const auto& [_, ch] : world.characters) {
    characters.push_back({{"name", ch.name},
                          {"descriptions", ch.descriptions},
                          {"location", location(world, ch.location).name},
                          {"inventory", names_of(world, ch.inventory)}});
  }
  return {{"items", std::move(items)},
          {"locations", std::move(locations)},
          {"characters", std::move(characters)},
          {"player", character(world, world.player).name}};
}

World load_world(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open world file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw WorldLoadError({{"world", "syntax", e.what()}});
  }
  return world_from_json(doc);
}

void save_world(const World& world, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write world file " + path.string());
  out << world_to_json(world).dump(2) << '\n';
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

std::string world_digest(const World& world) {
  // nlohmann::json objects are std::map backed, so dump() is key-sorted.
  return sha256_hex(world_to_json(world).dump());
}

}  // namespace worldkeeper
