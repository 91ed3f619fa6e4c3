#pragma once

#include <set>
#include <span>
#include <string>

#include "worldkeeper/change.hpp"
#include "worldkeeper/templates.hpp"
#include "worldkeeper/world.hpp"

namespace worldkeeper {

/// Component ids referenced by a rendering.
struct ComponentSet {
  std::set<ItemId> items;
  std::set<LocationId> locations;
  std::set<CharacterId> characters;

  bool subset_of(const ScopeSet& scope) const;
};

struct RenderedState {
  std::string text;
  ComponentSet mentioned;
};

/// Standardized sentences describing what `viewpoint` can see or reach.
/// Only components in scope_of(world, viewpoint) are rendered.
RenderedState render_state(const World& world, CharacterId viewpoint,
                           const TemplateTable& templates = TemplateTable::defaults());

/// The same scene without a viewpoint: every character present is rendered
/// in the third person.
RenderedState render_location(const World& world, LocationId where,
                              const TemplateTable& templates = TemplateTable::defaults());

/// One line per outcome: applied changes as facts, rejections with reasons.
std::string render_changes(std::span<const WorldChange> applied,
                           std::span<const Rejection> rejected,
                           const TemplateTable& templates = TemplateTable::defaults());

/// Appends a period unless the text already ends in sentence punctuation.
std::string as_sentence(std::string_view text);

}  // namespace worldkeeper
