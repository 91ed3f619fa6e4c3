#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "worldkeeper/change.hpp"
#include "worldkeeper/render.hpp"

namespace worldkeeper {

enum class PromptKind { WorldUpdate, Narrator, ItemGeneration };

std::string_view kind_name(PromptKind kind);  // "world-update", "narrator", "item-generation"
std::optional<PromptKind> kind_from_name(std::string_view name);

enum class Section { Instructions, WorldState, Examples, Outcomes, Schema, Brief, UserInput };

std::string_view section_name(Section section);

struct SectionRange {
  Section section;
  std::size_t begin = 0;  // byte offsets into PromptBundle::text
  std::size_t end = 0;
};

struct PromptBundle {
  PromptKind kind = PromptKind::WorldUpdate;
  std::string text;
  std::vector<SectionRange> sections;

  /// Text of one section; throws std::out_of_range if absent.
  std::string_view section(Section which) const;
  bool has(Section which) const;
};

class PromptError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FewShotExample {
  std::string rendering;
  std::string input;
  std::string output;  // change-grammar lines
};

/// Worked examples taught to the world-update call.
class FewShotTable {
 public:
  /// Throws PromptError if a block is malformed or its OUTPUT does not parse.
  static FewShotTable parse(std::string_view text);
  static FewShotTable load(const std::filesystem::path& path);
  /// The examples shipped in data/fewshot.txt.
  static const FewShotTable& defaults();

  const std::vector<FewShotExample>& examples() const { return examples_; }

 private:
  std::vector<FewShotExample> examples_;
};

PromptBundle build_update_prompt(const RenderedState& rendered, std::string_view user_input,
                                 const FewShotTable& fewshot = FewShotTable::defaults());

PromptBundle build_narrator_prompt(const RenderedState& rendered,
                                   std::span<const WorldChange> applied,
                                   std::span<const Rejection> rejected,
                                   std::string_view user_input,
                                   const TemplateTable& templates = TemplateTable::defaults());

/// `taken_names` lists every item name already in the world.
PromptBundle build_item_prompt(const RenderedState& rendered,
                               std::span<const std::string> taken_names, std::string_view brief);

/// The JSON shape generated items must follow, as embedded in the prompt.
std::string_view item_schema_text();

}  // namespace worldkeeper
