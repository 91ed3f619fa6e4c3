#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "worldkeeper/session.hpp"

namespace worldkeeper {

class GenerationError : public std::runtime_error {
 public:
  enum class Reason { UnknownLocation, SchemaInvalid, NameCollision };

  GenerationError(Reason reason, const std::string& what)
      : std::runtime_error(what), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

std::string_view reason_code(GenerationError::Reason reason);

struct GeneratedItem {
  Item item;
  ItemId id;
  int attempts = 1;
};

/// Checks a model reply against the item schema: a JSON object with exactly
/// `name`, `descriptions` and `gettable`. A surrounding code fence is allowed.
/// Returns the item or a description of the first problem.
std::variant<Item, std::string> parse_generated_item(std::string_view reply);

/// Asks the session's backend for a new item at `location_name`, retrying
/// invalid or colliding replies up to `retries` times. All-or-nothing: on
/// error the session world is unchanged.
GeneratedItem generate_item(Session& session, std::string_view location_name,
                            std::string_view brief, int retries = 2);

}  // namespace worldkeeper
