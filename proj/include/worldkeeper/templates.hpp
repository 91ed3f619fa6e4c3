#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace worldkeeper {

class TemplateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Keyed sentence templates with {named} placeholders.
class TemplateTable {
 public:
  using Args = std::vector<std::pair<std::string_view, std::string_view>>;

  /// Parses `key = value` lines; throws TemplateError on malformed lines,
  /// duplicate keys or missing required keys.
  static TemplateTable parse(std::string_view text);
  static TemplateTable load(const std::filesystem::path& path);
  /// The table shipped in data/render_templates.txt.
  static const TemplateTable& defaults();

  /// Substitutes every {placeholder}; unknown keys or placeholders throw.
  std::string fill(std::string_view key, const Args& args = {}) const;

  const std::string& raw(std::string_view key) const;

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

}  // namespace worldkeeper
