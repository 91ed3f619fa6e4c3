// Acceptance suite: one PASS/FAIL line per criterion. Scripted backend only.

#include <chrono>
#include <functional>
#include <iostream>

#include <httplib.h>

#include "support/fixtures.hpp"
#include "worldkeeper/cli.hpp"
#include "worldkeeper/generation.hpp"
#include "worldkeeper/service.hpp"
#include "worldkeeper/session.hpp"

using namespace worldkeeper;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Failed {
  std::string why;
};

void expect(bool ok, const std::string& why) {
  if (!ok) throw Failed{why};
}

std::shared_ptr<ScriptedBackend> scripted(std::string_view text) {
  return std::make_shared<ScriptedBackend>(parse_script(text));
}

std::string bazooka_script() { return wk_test::slurp(wk_test::data_dir() / "scripts" / "bazooka.script"); }

std::filesystem::path temp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("wk_acceptance_" + name);
}

std::vector<std::string> lines_of(const std::filesystem::path& p) {
  std::istringstream in(wk_test::slurp(p));
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

void bazooka() {
  const auto start = Clock::now();
  Session s("a1", wk_test::mansion(), BackendConfig{}, scripted(bazooka_script()));
  const auto r = s.run_turn("I take the bazooka out of my pocket");
  const auto elapsed = Clock::now() - start;
  expect(r.rejected.size() == 1, "expected exactly one rejection");
  expect(r.rejected[0].reason == RejectReason::UnknownName, "rejection is not unknown-name");
  expect(r.applied.empty(), "something was applied");
  expect(r.digest_before == r.digest_after, "digest changed");
  expect(elapsed < std::chrono::seconds(1), "took longer than 1 s");
}

void two_takes() {
  Session s("a2", wk_test::mansion(), BackendConfig{},
            scripted("@@ world-update\nTAKE \"green hammer\" BY \"player\"\nTAKE \"silver coin\" BY \"player\"\n"
                     "@@ narrator\nYou pocket both.\n"));
  const auto r = s.run_turn("I take the hammer and the coin");
  expect(r.applied.size() == 2 && r.rejected.empty(), "both takes should apply");
  const auto w = s.world();
  const auto hammer = *find_item(*w, "green hammer"), coin = *find_item(*w, "silver coin");
  const auto& inv = character(*w, w->player).inventory;
  expect(inv.contains(hammer) && inv.contains(coin), "inventory is missing an item");
  const auto& floor = location(*w, *find_location(*w, "Mansion hall")).items;
  expect(!floor.contains(hammer) && !floor.contains(coin), "items still on the floor");
  expect(validate_world(*w).empty(), "world invalid after takes");
}

void blocked_kitchen() {
  Session s("a3", wk_test::mansion(), BackendConfig{},
            scripted("@@ world-update\nMOVE \"player\" TO \"Kitchen\"\n@@ narrator\nThe door will not budge.\n"));
  const auto before = character(*s.world(), s.world()->player).location;
  const auto r = s.run_turn("I walk into the kitchen");
  expect(r.rejected.size() == 1 && r.rejected[0].reason == RejectReason::BlockedPath, "expected blocked-path");
  expect(r.applied.empty(), "move was applied");
  expect(character(*s.world(), s.world()->player).location == before, "player moved");
}

void unblock_order() {
  Session ok("a4", wk_test::mansion(), BackendConfig{},
             scripted("@@ world-update\nUNBLOCK \"Kitchen\" FROM \"Mansion hall\"\nMOVE \"player\" TO \"Kitchen\"\n"
                      "@@ narrator\nIn you go.\n"));
  const auto r = ok.run_turn("I force the door and go in");
  expect(r.applied.size() == 2 && r.rejected.empty(), "unblock then move should both apply");
  const auto w = ok.world();
  expect(location(*w, character(*w, w->player).location).name == "Kitchen", "player not in the kitchen");

  Session reversed("a4r", wk_test::mansion(), BackendConfig{},
                   scripted("@@ world-update\nMOVE \"player\" TO \"Kitchen\"\nUNBLOCK \"Kitchen\" FROM \"Mansion hall\"\n"
                            "@@ narrator\nThe door opens too late.\n"));
  const auto rr = reversed.run_turn("I go in and then force the door");
  expect(rr.rejected.size() == 1 && rr.rejected[0].reason == RejectReason::BlockedPath, "reversed MOVE not rejected");
  expect(rr.applied.size() == 1 && std::holds_alternative<Unblock>(rr.applied[0]), "reversed UNBLOCK not applied");
}

void invariant_fuzz() {
  const auto start = Clock::now();
  std::mt19937 rng(20240901);
  std::size_t rejected = 0, applied = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto w0 = wk_test::random_world(rng);
    expect(validate_world(w0).empty(), "generator produced an invalid world");
    const auto changes = wk_test::random_changes(w0, rng, 20);
    World w = w0;
    for (const auto& c : changes) {
      const auto before = world_digest(w);
      auto step = apply_changes(w, {c});
      expect(validate_world(step.world).empty(), "invariant broken after " + format_change(c));
      if (!step.rejected.empty()) {
        ++rejected;
        expect(world_digest(step.world) == before, "rejected change altered the world: " + format_change(c));
      } else if (!step.applied.empty()) {
        ++applied;
      }
      w = std::move(step.world);
    }
    const auto whole = apply_changes(w0, changes);
    expect(validate_world(whole.world).empty(), "invariant broken after a full sequence");
    expect(world_digest(whole.world) == world_digest(w), "batch and stepwise application disagree");
  }
  expect(rejected > 0 && applied > 0, "fuzz mix did not exercise both outcomes");
  expect(Clock::now() - start < std::chrono::seconds(60), "took longer than 60 s");
}

void prompt_locality() {
  const auto base = wk_test::mansion();
  auto padded = base;
  const auto first_loc = static_cast<std::uint32_t>(padded.locations.rbegin()->first.value);
  for (std::uint32_t k = 1; k <= 100; ++k) {
    const LocationId lid{first_loc + k};
    padded.locations.emplace(lid, Location{"Far wing " + std::to_string(k), {"Dust everywhere"}, {}, {}, {}});
    padded = add_item(padded, Item{"relic " + std::to_string(k), {"It is ancient"}, true}, lid).first;
  }
  expect(validate_world(padded).empty(), "padded world invalid");
  const auto a = build_update_prompt(render_state(base, base.player), "I look around").text;
  const auto b = build_update_prompt(render_state(padded, padded.player), "I look around").text;
  expect(a == b, "prompts differ");
}

constexpr std::string_view kTenTurns =
    "@@ world-update\nTAKE \"green hammer\" BY \"player\"\n@@ narrator\nYou take the hammer.\n"
    "@@ world-update\nTAKE \"bazooka\" BY \"player\"\n@@ narrator\nNo bazooka.\n"
    "@@ world-update\nMOVE \"player\" TO \"Kitchen\"\n@@ narrator\nBlocked.\n"
    "@@ world-update\nUNBLOCK \"Kitchen\" FROM \"Mansion hall\"\n@@ narrator\nThe door opens.\n"
    "@@ world-update\nTAKE \"silver coin\" BY \"player\"\nDROP \"green hammer\" BY \"player\"\n"
    "@@ narrator\nCoin in, hammer down.\n"
    "@@ world-update\nNONE\n@@ narrator\nYou wait.\n"
    "@@ world-update\nMOVE \"player\" TO \"Kitchen\"\n@@ narrator\nYou enter the kitchen.\n"
    "@@ world-update\nTAKE \"kitchen knife\" BY \"player\"\nTAKE \"knife\" BY \"player\"\n@@ narrator\nGot the knife.\n"
    "@@ world-update\nDROP \"silver coin\" BY \"player\"\nMOVE player\n@@ narrator\nThe coin rolls away.\n"
    "@@ world-update\nMOVE \"player\" TO \"Mansion hall\"\n@@ narrator\nBack in the hall.\n";

void determinism() {
  const auto script = temp("ten.script");
  std::ofstream(script) << kTenTurns;
  std::string input;
  for (int i = 1; i <= 10; ++i) input += "turn number " + std::to_string(i) + "\n";

  std::vector<std::string> transcripts;
  for (int run = 0; run < 2; ++run) {
    const auto path = temp("ten_" + std::to_string(run) + ".jsonl");
    std::istringstream in(input);
    std::ostringstream out, err;
    const int code = run_cli({"play", "--world", (wk_test::data_dir() / "worlds" / "mansion.json").string(),
                              "--script", script.string(), "--transcript", path.string(), "--seed", "42"},
                             in, out, err);
    expect(code == kExitOk, "CLI exited with " + std::to_string(code) + ": " + err.str());
    transcripts.push_back(wk_test::slurp(path));
    std::filesystem::remove(path);
  }
  std::filesystem::remove(script);
  expect(transcripts[0] == transcripts[1], "transcripts differ between runs");

  std::istringstream records(transcripts[0]);
  std::vector<HistoryEntry> history;
  for (std::string line; std::getline(records, line);) history.push_back(history_entry_from_json(json::parse(line)));
  expect(history.size() == 10, "expected 10 records, got " + std::to_string(history.size()));
  const auto initial = wk_test::mansion();
  const auto final_world = replay_history(initial, history);
  expect(world_digest(final_world) == std::get<TurnReport>(history.back()).digest_after,
         "replay does not reach the final digest");
}

void item_gate() {
  Session good("a8", wk_test::mansion(), BackendConfig{},
               scripted("@@ item-generation\n{\"name\": \"Rusty Key\", \"descriptions\": [\"It is old and rusty\"], "
                        "\"gettable\": true}\n"));
  const auto made = generate_item(good, "Kitchen", "a key");
  const auto w = good.world();
  expect(location(*w, *find_location(*w, "Kitchen")).items.contains(made.id), "item not placed");
  expect(validate_world(*w).empty(), "world invalid after generation");

  Session bad("a8b", wk_test::mansion(), BackendConfig{},
              scripted("@@ item-generation\nnot json\n@@ item-generation\n{\"name\": \"Key\"}\n"
                       "@@ item-generation\n[\"Key\"]\n"));
  const auto before = world_digest(*bad.world());
  bool failed = false;
  try {
    generate_item(bad, "Kitchen", "a key");
  } catch (const GenerationError&) {
    failed = true;
  }
  expect(failed, "invalid replies did not fail");
  expect(world_digest(*bad.world()) == before, "digest changed after failed generation");
}

void grammar() {
  const std::vector<WorldChange> all{Move{"player", "Kitchen"}, Take{"green \"big\" hammer", "player"},
                                     Drop{"back\\slash", "player"}, Give{"coin", "Player", "Old fisherman"},
                                     Unblock{"Kitchen", "Mansion hall"}, NoChange{}};
  for (const auto& c : all) {
    const auto r = parse_changes(format_change(c));
    expect(r.rejections.empty() && r.changes.size() == 1 && r.changes[0] == c,
           "round trip failed for " + format_change(c));
  }
  const auto bad = parse_changes("TAKE hammer BY \"player\"\nMOVE \"player\" \"Kitchen\"\nGIVE \"coin\" FROM \"a\" TO\n");
  expect(bad.changes.empty(), "malformed lines produced changes");
  expect(bad.rejections.size() == 3, "expected 3 parse errors");
  for (const auto& r : bad.rejections) expect(r.reason == RejectReason::ParseError, "not a parse-error");
}

void service_equivalence() {
  const auto path = temp("cli_bazooka.jsonl");
  const auto script = temp("bazooka.script");
  std::ofstream(script) << bazooka_script();
  const std::string input = "I take the bazooka out of my pocket";
  {
    std::istringstream in(input + "\n");
    std::ostringstream out, err;
    const int code = run_cli({"play", "--world", (wk_test::data_dir() / "worlds" / "mansion.json").string(),
                              "--script", script.string(), "--transcript", path.string()},
                             in, out, err);
    expect(code == kExitOk, "CLI failed: " + err.str());
  }
  const auto cli_lines = lines_of(path);
  std::filesystem::remove(path);
  std::filesystem::remove(script);
  expect(cli_lines.size() == 1, "CLI transcript should have one record");

  ServiceConfig config;
  config.port = 0;
  Service service(config);
  const int port = service.bind();
  service.start();
  httplib::Client client("127.0.0.1", port);
  auto world = client.Post("/worlds", world_to_json(wk_test::mansion()).dump(), "application/json");
  expect(world && world->status == 201, "POST /worlds failed");
  const auto wid = json::parse(world->body).at("world_id").get<std::string>();
  auto session = client.Post("/sessions",
                             json{{"world_id", wid}, {"backend", "scripted"}, {"script", bazooka_script()}}.dump(),
                             "application/json");
  expect(session && session->status == 201, "POST /sessions failed");
  const auto sid = json::parse(session->body).at("session_id").get<std::string>();
  auto turn = client.Post("/sessions/" + sid + "/turn", json{{"input", input}}.dump(), "application/json");
  service.stop();
  expect(turn && turn->status == 200, "turn request failed");
  expect(json::parse(turn->body) == json::parse(cli_lines[0]), "HTTP report differs from the CLI record");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void()>>> criteria{
      {"bazooka consistency check", bazooka},
      {"two takes in one turn", two_takes},
      {"blocked kitchen guard", blocked_kitchen},
      {"unblock then move ordering", unblock_order},
      {"invariant fuzz (1000 worlds x 20 changes)", invariant_fuzz},
      {"prompt locality under padding", prompt_locality},
      {"determinism and replay", determinism},
      {"item generation schema gate", item_gate},
      {"grammar round trip", grammar},
      {"service and CLI equivalence", service_equivalence},
  };
  int failures = 0;
  int n = 0;
  for (const auto& [name, check] : criteria) {
    ++n;
    const auto start = Clock::now();
    std::string why;
    try {
      check();
    } catch (const Failed& f) {
      why = f.why;
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
    std::cout << (why.empty() ? "PASS" : "FAIL") << "  " << n << ". " << name << " (" << ms << " ms)";
    if (!why.empty()) std::cout << ": " << why;
    std::cout << '\n';
    if (!why.empty()) ++failures;
  }
  std::cout << (n - failures) << "/" << n << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
