#include "worldkeeper/generation.hpp"

#include <algorithm>

#include "worldkeeper/render.hpp"
#include "worldkeeper/world_io.hpp"

namespace worldkeeper {

using nlohmann::json;

namespace {

std::string_view strip_fence(std::string_view text) {
  constexpr std::string_view ws = " \t\r\n";
  const auto b = text.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  text = text.substr(b, text.find_last_not_of(ws) - b + 1);
  if (text.substr(0, 3) != "```") return text;
  const auto first_nl = text.find('\n');
  const auto last_fence = text.rfind("```");
  if (first_nl == std::string_view::npos || last_fence <= first_nl) return text;
  return text.substr(first_nl + 1, last_fence - first_nl - 1);
}

}  // namespace

std::string_view reason_code(GenerationError::Reason reason) {
  switch (reason) {
    case GenerationError::Reason::UnknownLocation: return "unknown-location";
    case GenerationError::Reason::SchemaInvalid: return "schema-invalid";
    case GenerationError::Reason::NameCollision: return "name-collision";
  }
  return "schema-invalid";
}

std::variant<Item, std::string> parse_generated_item(std::string_view reply) {
  json doc;
  try {
    doc = json::parse(strip_fence(reply));
  } catch (const json::parse_error&) {
    return std::string("reply is not JSON");
  }
  if (!doc.is_object()) return std::string("reply is not a JSON object");
  if (doc.size() != 3 || !doc.contains("name") || !doc.contains("descriptions") ||
      !doc.contains("gettable"))
    return std::string("object must have exactly the keys name, descriptions, gettable");

  Item it;
  const auto& name = doc.at("name");
  if (!name.is_string() || name.get<std::string>().empty())
    return std::string("name must be a non-empty string");
  it.name = name.get<std::string>();

  const auto& descriptions = doc.at("descriptions");
  if (!descriptions.is_array() || descriptions.empty())
    return std::string("descriptions must be a non-empty array");
  for (const auto& d : descriptions) {
    if (!d.is_string() || d.get<std::string>().empty())
      return std::string("descriptions must be non-empty strings");
    it.descriptions.push_back(d.get<std::string>());
  }

  if (!doc.at("gettable").is_boolean()) return std::string("gettable must be a boolean");
  it.gettable = doc.at("gettable").get<bool>();
  return it;
}

GeneratedItem generate_item(Session& session, std::string_view location_name,
                            std::string_view brief, int retries) {
  Session::Exclusive guard(session);
  const auto before = session.world();
  const auto where = find_location(*before, location_name);
  if (!where)
    throw GenerationError(GenerationError::Reason::UnknownLocation,
                          "unknown location '" + std::string(location_name) + "'");

  std::vector<std::string> taken;
  for (const auto& [_, it] : before->items) taken.push_back(it.name);
  const auto prompt =
      build_item_prompt(render_location(*before, *where, session.resources().templates), taken, brief);

  GenerationError last(GenerationError::Reason::SchemaInvalid, "no attempts made");
  const int attempts = 1 + std::max(0, retries);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    const auto reply = session.backend()->generate(prompt).text;
    auto parsed = parse_generated_item(reply);
    if (auto* problem = std::get_if<std::string>(&parsed)) {
      last = GenerationError(GenerationError::Reason::SchemaInvalid,
                             "generated item is invalid: " + *problem);
      continue;
    }
    auto& it = std::get<Item>(parsed);
    if (find_item(*before, it.name)) {
      last = GenerationError(GenerationError::Reason::NameCollision,
                             "generated item name '" + it.name + "' is already taken");
      continue;
    }

    auto [next, id] = add_item(*before, it, *where);
    ItemRecord record{location(next, *where).name, it, attempt, world_digest(*before),
                      world_digest(next)};
    session.commit(std::move(next), record);
    return {std::move(it), id, attempt};
  }
  throw GenerationError(last.reason(), std::string(last.what()) + " (after " +
                                           std::to_string(attempts) + " attempts)");
}

}  // namespace worldkeeper
