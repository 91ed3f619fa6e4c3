#include "worldkeeper/templates.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "embedded.hpp"

namespace worldkeeper {

namespace {

constexpr std::array<std::string_view, 23> kRequiredKeys = {
    "location",         "exits",           "exits_none",
    "blocked",          "blocked_name",    "blocked_none",
    "item",             "item_gettable",   "item_fixed",
    "viewpoint",        "viewpoint_inventory", "viewpoint_inventory_empty",
    "character",        "character_inventory", "character_inventory_empty",
    "inventory_item",   "applied_move",    "applied_take",
    "applied_drop",     "applied_give",    "applied_unblock",
    "applied_none",     "rejected",
};

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

}  // namespace

TemplateTable TemplateTable::parse(std::string_view text) {
  TemplateTable table;
  int lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw TemplateError("template line " + std::to_string(lineno) + ": missing '='");
    const auto key = std::string(trim(line.substr(0, eq)));
    if (key.empty()) throw TemplateError("template line " + std::to_string(lineno) + ": empty key");
    if (!table.entries_.emplace(key, std::string(trim(line.substr(eq + 1)))).second)
      throw TemplateError("duplicate template key '" + key + "'");
  }
  for (auto key : kRequiredKeys)
    if (!table.entries_.contains(key))
      throw TemplateError("missing template key '" + std::string(key) + "'");
  return table;
}

TemplateTable TemplateTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TemplateError("cannot open template file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const TemplateTable& TemplateTable::defaults() {
  static const TemplateTable table = parse(embedded::render_templates());
  return table;
}

const std::string& TemplateTable::raw(std::string_view key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw TemplateError("unknown template key '" + std::string(key) + "'");
  return it->second;
}

std::string TemplateTable::fill(std::string_view key, const Args& args) const {
  const auto& tmpl = raw(key);
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find('{', pos);
    if (open == std::string::npos) {
      out.append(tmpl, pos);
      break;
    }
    const auto close = tmpl.find('}', open);
    if (close == std::string::npos)
      throw TemplateError("unterminated placeholder in '" + std::string(key) + "'");
    out.append(tmpl, pos, open - pos);
    const std::string_view name(tmpl.data() + open + 1, close - open - 1);
    auto arg = std::find_if(args.begin(), args.end(), [&](const auto& a) { return a.first == name; });
    if (arg == args.end())
      throw TemplateError("template '" + std::string(key) + "' has unbound placeholder {" +
                          std::string(name) + "}");
    out.append(arg->second);
    pos = close + 1;
  }
  return out;
}

}  // namespace worldkeeper
