#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "worldkeeper/world.hpp"

namespace worldkeeper {

/// A world document that failed to load. Carries every violation found.
class WorldLoadError : public std::runtime_error {
 public:
  explicit WorldLoadError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// World file: {"items":[...], "locations":[...], "characters":[...], "player": name}.
// Components reference each other by name; ids are assigned in document order.
World world_from_json(const nlohmann::json& doc);
nlohmann::json world_to_json(const World& world);

World load_world(const std::filesystem::path& path);
void save_world(const World& world, const std::filesystem::path& path);

nlohmann::json item_to_json(const Item& it);

/// SHA-256 hex digest of the canonical (key-sorted, compact) serialization.
std::string world_digest(const World& world);

std::string sha256_hex(std::string_view bytes);

}  // namespace worldkeeper
