#include <doctest.h>

#include "support/fixtures.hpp"
#include "worldkeeper/generation.hpp"

using namespace worldkeeper;

namespace {

constexpr std::string_view kRustyKey =
    R"({"name": "Rusty Key", "descriptions": ["It is covered in rust", "It might open an old lock"], "gettable": true})";

std::shared_ptr<ScriptedBackend> replies(std::vector<std::string> items) {
  auto b = std::make_shared<ScriptedBackend>();
  for (auto& r : items) b->push(PromptKind::ItemGeneration, std::move(r));
  return b;
}

}  // namespace

TEST_CASE("parse_generated_item accepts the schema, fenced or not") {
  const auto plain = parse_generated_item(kRustyKey);
  REQUIRE(std::holds_alternative<Item>(plain));
  CHECK(std::get<Item>(plain) == Item{"Rusty Key", {"It is covered in rust", "It might open an old lock"}, true});
  const auto fenced = parse_generated_item("```json\n" + std::string(kRustyKey) + "\n```");
  CHECK(std::holds_alternative<Item>(fenced));
}

TEST_CASE("parse_generated_item rejects everything else") {
  for (const char* bad : {
           "a rusty key",
           "[1, 2]",
           R"({"name": "Key", "descriptions": ["x"]})",
           R"({"name": "Key", "descriptions": ["x"], "gettable": true, "weight": 3})",
           R"({"name": "", "descriptions": ["x"], "gettable": true})",
           R"({"name": "Key", "descriptions": [], "gettable": true})",
           R"({"name": "Key", "descriptions": [""], "gettable": true})",
           R"({"name": "Key", "descriptions": "x", "gettable": true})",
           R"({"name": "Key", "descriptions": ["x"], "gettable": "yes"})",
           R"({"name": 5, "descriptions": ["x"], "gettable": true})",
       }) {
    CAPTURE(bad);
    CHECK(std::holds_alternative<std::string>(parse_generated_item(bad)));
  }
}

TEST_CASE("a valid item is registered at the location") {
  Session s("g", wk_test::mansion(), BackendConfig{}, replies({std::string(kRustyKey)}));
  const auto made = generate_item(s, "kitchen", "something old");
  CHECK(made.attempts == 1);
  CHECK(made.item.name == "Rusty Key");
  const auto w = s.world();
  CHECK(location(*w, *find_location(*w, "Kitchen")).items.contains(made.id));
  CHECK(item(*w, made.id).gettable);
  CHECK(validate_world(*w).empty());
  const auto history = s.history();
  REQUIRE(history.size() == 1);
  const auto& rec = std::get<ItemRecord>(history.front());
  CHECK(rec.location == "Kitchen");
  CHECK(rec.digest_after == world_digest(*w));
}

TEST_CASE("three invalid replies fail and leave the world unchanged") {
  Session s("g", wk_test::mansion(), BackendConfig{}, replies({"nope", "{}", R"({"name": "x"})"}));
  const auto before = world_digest(*s.world());
  try {
    generate_item(s, "Kitchen", "");
    FAIL("expected failure");
  } catch (const GenerationError& e) {
    CHECK(e.reason() == GenerationError::Reason::SchemaInvalid);
    CHECK(std::string(e.what()).find("3 attempts") != std::string::npos);
  }
  CHECK(world_digest(*s.world()) == before);
  CHECK(s.history().empty());
}

TEST_CASE("an invalid reply followed by a valid one succeeds on the retry") {
  Session s("g", wk_test::mansion(), BackendConfig{}, replies({"not json", std::string(kRustyKey)}));
  CHECK(generate_item(s, "Kitchen", "").attempts == 2);
}

TEST_CASE("a name collision is rejected in any case") {
  const std::string hammer = R"({"name": "Green Hammer", "descriptions": ["Another one"], "gettable": true})";
  Session s("g", wk_test::mansion(), BackendConfig{}, replies({hammer}));
  const auto before = world_digest(*s.world());
  try {
    generate_item(s, "Mansion hall", "", 0);
    FAIL("expected failure");
  } catch (const GenerationError& e) {
    CHECK(e.reason() == GenerationError::Reason::NameCollision);
  }
  CHECK(world_digest(*s.world()) == before);
}

TEST_CASE("unknown locations are refused before calling the backend") {
  auto backend = replies({std::string(kRustyKey)});
  Session s("g", wk_test::mansion(), BackendConfig{}, backend);
  try {
    generate_item(s, "Attic", "");
    FAIL("expected failure");
  } catch (const GenerationError& e) {
    CHECK(e.reason() == GenerationError::Reason::UnknownLocation);
    CHECK(reason_code(e.reason()) == "unknown-location");
  }
  CHECK(backend->remaining(PromptKind::ItemGeneration) == 1);
}
