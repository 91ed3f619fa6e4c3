#include "worldkeeper/prompt.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "embedded.hpp"

namespace worldkeeper {

namespace {

constexpr std::string_view kUpdateInstructions =
    "You are the game master of an interactive story. The world state below lists "
    "everything the player can currently see or reach. Read the player's input and "
    "predict how the world changes as an outcome of the actions it describes.\n"
    "Report each change on its own line, using only these forms:\n"
    "MOVE \"<character>\" TO \"<location>\"\n"
    "TAKE \"<item>\" BY \"<character>\"\n"
    "DROP \"<item>\" BY \"<character>\"\n"
    "GIVE \"<item>\" FROM \"<character>\" TO \"<character>\"\n"
    "UNBLOCK \"<location>\" FROM \"<location>\"\n"
    "NONE\n"
    "Use the exact names from the world state. Never invent items, characters or "
    "locations. Items that cannot be picked up stay where they are. Blocked exits "
    "must be unblocked before anyone moves through them. If nothing changes, answer NONE.";

constexpr std::string_view kUpdateDirective =
    "Answer only with change lines in the forms above, one per line, and nothing else.";

constexpr std::string_view kNarratorInstructions =
    "You are the narrator of an interactive story. Describe what happens after the "
    "player's input, in the second person and present tense. The outcomes below are "
    "authoritative: narrate every applied change as having happened, and never narrate "
    "a rejected change as having happened. Do not contradict the world state.";

constexpr std::string_view kNarratorDirective = "Narrate the outcome in one short paragraph.";

constexpr std::string_view kNoOutcomes = "No changes.\n";

constexpr std::string_view kItemInstructions =
    "You create new items for an interactive story. Invent one item that fits the "
    "location described below and could be found there. Reply with a single JSON "
    "object and nothing else, following this schema:";

constexpr std::string_view kItemSchema =
    "{\"name\": string, \"descriptions\": [string, ...], \"gettable\": boolean}\n"
    "- name: non-empty, and different from every name listed as taken.\n"
    "- descriptions: at least one short, independent, non-empty sentence about the item.\n"
    "- gettable: true if a person could pick the item up and carry it.\n"
    "No other keys are allowed.";

/// Appends text while recording section offsets.
class PromptWriter {
 public:
  explicit PromptWriter(PromptKind kind) { bundle_.kind = kind; }

  void plain(std::string_view text) { bundle_.text += text; }

  void section(Section which, std::string_view text) {
    const auto begin = bundle_.text.size();
    bundle_.text += text;
    bundle_.sections.push_back({which, begin, bundle_.text.size()});
  }

  PromptBundle finish() { return std::move(bundle_); }

 private:
  PromptBundle bundle_;
};

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::string with_newline(std::string_view text) {
  std::string out(text);
  if (!out.empty() && out.back() != '\n') out += '\n';
  return out;
}

std::string require_input(std::string_view user_input) {
  const auto trimmed = trim(user_input);
  if (trimmed.empty()) throw PromptError("player input is empty");
  return std::string(trimmed);
}

std::string format_examples(const FewShotTable& fewshot) {
  std::string out;
  int n = 1;
  for (const auto& ex : fewshot.examples()) {
    if (n > 1) out += '\n';
    out += "Example " + std::to_string(n++) + "\n";
    out += "World state:\n" + with_newline(ex.rendering);
    out += "Player input: " + ex.input + "\n";
    out += "Changes:\n" + with_newline(ex.output);
  }
  return out;
}

}  // namespace

std::string_view kind_name(PromptKind kind) {
  switch (kind) {
    case PromptKind::WorldUpdate: return "world-update";
    case PromptKind::Narrator: return "narrator";
    case PromptKind::ItemGeneration: return "item-generation";
  }
  return "world-update";
}

std::optional<PromptKind> kind_from_name(std::string_view name) {
  for (auto k : {PromptKind::WorldUpdate, PromptKind::Narrator, PromptKind::ItemGeneration})
    if (kind_name(k) == name) return k;
  return std::nullopt;
}

std::string_view section_name(Section section) {
  switch (section) {
    case Section::Instructions: return "instructions";
    case Section::WorldState: return "world-state";
    case Section::Examples: return "examples";
    case Section::Outcomes: return "outcomes";
    case Section::Schema: return "schema";
    case Section::Brief: return "brief";
    case Section::UserInput: return "user-input";
  }
  return "instructions";
}

bool PromptBundle::has(Section which) const {
  return std::any_of(sections.begin(), sections.end(),
                     [&](const SectionRange& r) { return r.section == which; });
}

std::string_view PromptBundle::section(Section which) const {
  for (const auto& r : sections)
    if (r.section == which) return std::string_view(text).substr(r.begin, r.end - r.begin);
  throw std::out_of_range("prompt has no " + std::string(section_name(which)) + " section");
}

FewShotTable FewShotTable::parse(std::string_view text) {
  FewShotTable table;
  std::vector<std::string> lines;
  {
    std::string buf(text);
    std::istringstream in(buf);
    for (std::string line; std::getline(in, line);) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(std::move(line));
    }
  }

  FewShotExample current;
  std::string* target = nullptr;
  bool seen[3] = {false, false, false};
  int block = 1;

  auto close_block = [&] {
    if (!seen[0] && !seen[1] && !seen[2] && trim(current.rendering).empty()) return;
    if (!seen[0] || !seen[1] || !seen[2])
      throw PromptError("few-shot block " + std::to_string(block) +
                        " needs RENDERING:, INPUT: and OUTPUT: sections");
    current.rendering = std::string(trim(current.rendering));
    current.input = std::string(trim(current.input));
    current.output = std::string(trim(current.output));
    if (current.rendering.empty() || current.input.empty() || current.output.empty())
      throw PromptError("few-shot block " + std::to_string(block) + " has an empty section");
    const auto parsed = parse_changes(current.output);
    if (!parsed.rejections.empty() || parsed.changes.empty())
      throw PromptError("few-shot block " + std::to_string(block) +
                        " OUTPUT is not valid change grammar");
    table.examples_.push_back(std::move(current));
    current = {};
    target = nullptr;
    seen[0] = seen[1] = seen[2] = false;
    ++block;
  };

  for (const auto& line : lines) {
    if (line == "---") {
      close_block();
      continue;
    }
    if (line == "RENDERING:") { target = &current.rendering; seen[0] = true; continue; }
    if (line == "INPUT:") { target = &current.input; seen[1] = true; continue; }
    if (line == "OUTPUT:") { target = &current.output; seen[2] = true; continue; }
    if (!target) {
      if (trim(line).empty() || line.front() == '#') continue;
      throw PromptError("few-shot block " + std::to_string(block) +
                        ": text outside a section: " + line);
    }
    *target += line;
    *target += '\n';
  }
  close_block();
  if (table.examples_.empty()) throw PromptError("few-shot table has no examples");
  return table;
}

FewShotTable FewShotTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PromptError("cannot open few-shot file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const FewShotTable& FewShotTable::defaults() {
  static const FewShotTable table = parse(embedded::fewshot_examples());
  return table;
}

PromptBundle build_update_prompt(const RenderedState& rendered, std::string_view user_input,
                                 const FewShotTable& fewshot) {
  const auto input = require_input(user_input);
  PromptWriter w(PromptKind::WorldUpdate);
  w.section(Section::Instructions, kUpdateInstructions);
  w.plain("\n\nWORLD STATE:\n");
  w.section(Section::WorldState, rendered.text);
  w.plain("\nEXAMPLES:\n");
  w.section(Section::Examples, format_examples(fewshot));
  w.plain("\nPLAYER INPUT:\n");
  w.section(Section::UserInput, input);
  w.plain("\n\n");
  w.plain(kUpdateDirective);
  w.plain("\n");
  return w.finish();
}

PromptBundle build_narrator_prompt(const RenderedState& rendered,
                                   std::span<const WorldChange> applied,
                                   std::span<const Rejection> rejected,
                                   std::string_view user_input, const TemplateTable& templates) {
  const auto input = require_input(user_input);
  auto outcomes = render_changes(applied, rejected, templates);
  if (outcomes.empty()) outcomes = kNoOutcomes;
  PromptWriter w(PromptKind::Narrator);
  w.section(Section::Instructions, kNarratorInstructions);
  w.plain("\n\nWORLD STATE:\n");
  w.section(Section::WorldState, rendered.text);
  w.plain("\nOUTCOMES:\n");
  w.section(Section::Outcomes, outcomes);
  w.plain("\nPLAYER INPUT:\n");
  w.section(Section::UserInput, input);
  w.plain("\n\n");
  w.plain(kNarratorDirective);
  w.plain("\n");
  return w.finish();
}

PromptBundle build_item_prompt(const RenderedState& rendered,
                               std::span<const std::string> taken_names, std::string_view brief) {
  std::string taken;
  for (const auto& n : taken_names) {
    if (!taken.empty()) taken += ", ";
    taken += n;
  }
  PromptWriter w(PromptKind::ItemGeneration);
  w.section(Section::Instructions, kItemInstructions);
  w.plain("\n");
  w.section(Section::Schema, kItemSchema);
  w.plain("\n\nWORLD STATE:\n");
  w.section(Section::WorldState, rendered.text);
  w.plain("\nTAKEN NAMES: ");
  w.plain(taken.empty() ? "none" : taken);
  w.plain("\n\nTHEME:\n");
  w.section(Section::Brief, brief);
  w.plain("\n");
  return w.finish();
}

std::string_view item_schema_text() { return kItemSchema; }

}  // namespace worldkeeper
