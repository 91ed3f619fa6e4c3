#include "worldkeeper/render.hpp"

#include <optional>

namespace worldkeeper {

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

std::string descriptions_of(const std::vector<std::string>& descriptions) {
  std::vector<std::string> sentences;
  sentences.reserve(descriptions.size());
  for (const auto& d : descriptions) sentences.push_back(as_sentence(d));
  return join(sentences, " ");
}

struct StateWriter {
  const World& world;
  const TemplateTable& t;
  std::string text;
  ComponentSet mentioned;

  void line(std::vector<std::string> parts) {
    text += join(parts, " ");
    text += '\n';
  }

  void inventory(const Character& ch, bool is_viewpoint) {
    if (ch.inventory.empty()) {
      line({is_viewpoint ? t.fill("viewpoint_inventory_empty")
                         : t.fill("character_inventory_empty", {{"name", ch.name}})});
      return;
    }
    line({is_viewpoint ? t.fill("viewpoint_inventory")
                       : t.fill("character_inventory", {{"name", ch.name}})});
    for (auto id : ch.inventory) {
      const auto& it = item(world, id);
      mentioned.items.insert(id);
      line({t.fill("inventory_item", {{"name", it.name}}), descriptions_of(it.descriptions)});
    }
  }

  void character_block(CharacterId id, bool is_viewpoint) {
    const auto& ch = character(world, id);
    mentioned.characters.insert(id);
    line({t.fill(is_viewpoint ? "viewpoint" : "character", {{"name", ch.name}}),
          descriptions_of(ch.descriptions)});
    inventory(ch, is_viewpoint);
  }

  std::string names(const std::set<LocationId>& ids, bool mark_blocked) {
    std::vector<std::string> out;
    for (auto id : ids) {
      mentioned.locations.insert(id);
      const auto& name = location(world, id).name;
      out.push_back(mark_blocked ? t.fill("blocked_name", {{"name", name}}) : name);
    }
    return join(out, ", ");
  }

  RenderedState finish() { return {std::move(text), std::move(mentioned)}; }
};

}  // namespace

bool ComponentSet::subset_of(const ScopeSet& scope) const {
  for (auto id : items)
    if (!scope.contains(id)) return false;
  for (auto id : locations)
    if (!scope.contains(id)) return false;
  for (auto id : characters)
    if (!scope.contains(id)) return false;
  return true;
}

std::string as_sentence(std::string_view text) {
  std::string out(text);
  if (out.empty()) return out;
  const char last = out.back();
  if (last != '.' && last != '!' && last != '?') out += '.';
  return out;
}

namespace {

RenderedState render_scene(const World& world, LocationId where,
                           std::optional<CharacterId> viewpoint, const TemplateTable& templates) {
  const auto& here = location(world, where);
  StateWriter w{world, templates, {}, {}};

  w.mentioned.locations.insert(where);
  w.line({templates.fill("location", {{"name", here.name}}), descriptions_of(here.descriptions)});

  if (here.connecting.empty()) w.line({templates.fill("exits_none")});
  else w.line({templates.fill("exits", {{"names", w.names(here.connecting, false)}})});
  if (here.blocked.empty()) w.line({templates.fill("blocked_none")});
  else w.line({templates.fill("blocked", {{"names", w.names(here.blocked, true)}})});

  for (auto id : here.items) {
    const auto& it = item(world, id);
    w.mentioned.items.insert(id);
    w.line({templates.fill("item", {{"name", it.name}}), descriptions_of(it.descriptions),
            templates.fill(it.gettable ? "item_gettable" : "item_fixed")});
  }

  if (viewpoint) w.character_block(*viewpoint, true);
  for (const auto& [id, ch] : world.characters)
    if (ch.location == where && id != viewpoint) w.character_block(id, false);
  return w.finish();
}

}  // namespace

RenderedState render_state(const World& world, CharacterId viewpoint,
                           const TemplateTable& templates) {
  return render_scene(world, character(world, viewpoint).location, viewpoint, templates);
}

RenderedState render_location(const World& world, LocationId where,
                              const TemplateTable& templates) {
  return render_scene(world, where, std::nullopt, templates);
}

std::string render_changes(std::span<const WorldChange> applied,
                           std::span<const Rejection> rejected, const TemplateTable& t) {
  struct Applied {
    const TemplateTable& t;
    std::string operator()(const Move& m) const {
      return t.fill("applied_move", {{"character", m.character}, {"destination", m.destination}});
    }
    std::string operator()(const Take& x) const {
      return t.fill("applied_take", {{"character", x.character}, {"item", x.item}});
    }
    std::string operator()(const Drop& x) const {
      return t.fill("applied_drop", {{"character", x.character}, {"item", x.item}});
    }
    std::string operator()(const Give& g) const {
      return t.fill("applied_give", {{"giver", g.giver}, {"item", g.item}, {"receiver", g.receiver}});
    }
    std::string operator()(const Unblock& u) const {
      return t.fill("applied_unblock", {{"from", u.from}, {"target", u.target}});
    }
    std::string operator()(const NoChange&) const { return t.fill("applied_none"); }
  };

  std::string out;
  for (const auto& change : applied) {
    out += std::visit(Applied{t}, change);
    out += '\n';
  }
  for (const auto& r : rejected) {
    out += t.fill("rejected", {{"change", r.line},
                               {"reason", reason_code(r.reason)},
                               {"subject", r.subject},
                               {"detail", r.detail}});
    out += '\n';
  }
  return out;
}

}  // namespace worldkeeper
