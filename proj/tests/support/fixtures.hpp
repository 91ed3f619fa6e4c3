#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "worldkeeper/change.hpp"
#include "worldkeeper/world.hpp"
#include "worldkeeper/world_io.hpp"

namespace wk_test {

using namespace worldkeeper;

inline std::filesystem::path data_dir() { return WK_DATA_DIR; }

inline World mansion() { return load_world(data_dir() / "worlds" / "mansion.json"); }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Mary on the hill with a sword and an apple, observed by a second character.
inline World mary_world() {
  return world_from_json(nlohmann::json::parse(R"({
    "items": [
      {"name": "Sword", "descriptions": ["It is a long steel sword"], "gettable": true},
      {"name": "Apple", "descriptions": ["It is red and shiny"], "gettable": true}
    ],
    "locations": [
      {"name": "Hill", "descriptions": ["The wind blows hard up here"], "items": [],
       "connecting": ["Valley"], "blocked": []},
      {"name": "Valley", "descriptions": ["A quiet green valley"], "items": [],
       "connecting": ["Hill"], "blocked": []},
      {"name": "Cave", "descriptions": ["It is pitch dark"], "items": [], "connecting": [], "blocked": []}
    ],
    "characters": [
      {"name": "Observer", "descriptions": ["A wandering bard"], "location": "Hill", "inventory": []},
      {"name": "Mary", "location": "Hill", "inventory": ["Sword", "Apple"],
       "descriptions": ["She is a mage", "She is tall", "She knows how to cast lightning bolts",
                        "Since she was a little girl, she always loved climbing mountains"]}
    ],
    "player": "Observer"
  })"));
}

/// Random structurally valid worlds. Names and descriptions are unique
/// tokens so substring checks on renderings are unambiguous.
inline World random_world(std::mt19937& rng) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  World w;
  const int n_loc = pick(1, 6), n_item = pick(0, 12), n_char = pick(1, 4);
  auto descriptions = [&](const std::string& stem) {
    std::vector<std::string> out;
    const int n = pick(0, 2);
    for (int j = 0; j < n; ++j) out.push_back(stem + "-d" + std::to_string(j) + (pick(0, 1) ? "." : ""));
    return out;
  };
  for (int i = 1; i <= n_loc; ++i) {
    Location loc;
    loc.name = "Loc" + std::to_string(i);
    loc.descriptions = descriptions("zl" + std::to_string(i));
    w.locations.emplace(LocationId{static_cast<std::uint32_t>(i)}, loc);
  }
  for (auto& [a, loc] : w.locations) {
    for (const auto& [b, _] : w.locations) {
      if (a == b) continue;
      switch (pick(0, 3)) {
        case 0: loc.connecting.insert(b); break;
        case 1: loc.blocked.insert(b); break;
        default: break;
      }
    }
  }
  for (int i = 1; i <= n_char; ++i) {
    Character ch;
    ch.name = "Char" + std::to_string(i);
    ch.descriptions = descriptions("zc" + std::to_string(i));
    ch.location = LocationId{static_cast<std::uint32_t>(pick(1, n_loc))};
    w.characters.emplace(CharacterId{static_cast<std::uint32_t>(i)}, ch);
  }
  for (int i = 1; i <= n_item; ++i) {
    Item it;
    it.name = "Item" + std::to_string(i);
    it.descriptions = descriptions("zi" + std::to_string(i));
    it.gettable = pick(0, 3) != 0;
    const ItemId id{static_cast<std::uint32_t>(i)};
    w.items.emplace(id, it);
    if (pick(0, 2) == 0) {
      w.characters.at(CharacterId{static_cast<std::uint32_t>(pick(1, n_char))}).inventory.insert(id);
    } else {
      w.locations.at(LocationId{static_cast<std::uint32_t>(pick(1, n_loc))}).items.insert(id);
    }
  }
  w.player = CharacterId{static_cast<std::uint32_t>(pick(1, n_char))};
  return w;
}

/// Random-case spelling of a name, to exercise case-insensitive matching.
inline std::string scramble_case(const std::string& name, std::mt19937& rng) {
  std::string out = name;
  for (auto& c : out)
    if (std::uniform_int_distribution<int>(0, 1)(rng)) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

/// Mix of plausible and bogus changes against `w`.
inline std::vector<WorldChange> random_changes(const World& w, std::mt19937& rng, int count) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto any_item = [&]() -> std::string {
    if (w.items.empty() || pick(0, 9) == 0) return "phantom" + std::to_string(pick(0, 9));
    auto it = std::next(w.items.begin(), pick(0, static_cast<int>(w.items.size()) - 1));
    return scramble_case(it->second.name, rng);
  };
  auto any_loc = [&]() -> std::string {
    if (pick(0, 9) == 0) return "Nowhere";
    auto it = std::next(w.locations.begin(), pick(0, static_cast<int>(w.locations.size()) - 1));
    return scramble_case(it->second.name, rng);
  };
  auto any_char = [&]() -> std::string {
    if (pick(0, 9) == 0) return "Ghost";
    if (pick(0, 1)) return character(w, w.player).name;
    auto it = std::next(w.characters.begin(), pick(0, static_cast<int>(w.characters.size()) - 1));
    return scramble_case(it->second.name, rng);
  };
  std::vector<WorldChange> out;
  for (int i = 0; i < count; ++i) {
    switch (pick(0, 5)) {
      case 0: out.push_back(Move{any_char(), any_loc()}); break;
      case 1: out.push_back(Take{any_item(), any_char()}); break;
      case 2: out.push_back(Drop{any_item(), any_char()}); break;
      case 3: out.push_back(Give{any_item(), any_char(), any_char()}); break;
      case 4: out.push_back(Unblock{any_loc(), any_loc()}); break;
      default: out.push_back(NoChange{}); break;
    }
  }
  return out;
}

}  // namespace wk_test
