#include <algorithm>
#include <array>

#include "worldkeeper/change.hpp"

namespace worldkeeper {

namespace {

constexpr std::array<std::string_view, 6> kKeywords = {"MOVE", "TAKE", "DROP",
                                                       "GIVE", "UNBLOCK", "NONE"};

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_blank(s.back())) s.remove_suffix(1);
  return s;
}

struct LineError {
  std::string message;
};

/// Cursor over one trimmed change line.
class LineReader {
 public:
  explicit LineReader(std::string_view line) : rest_(line) {}

  void keyword(std::string_view kw) {
    separator();
    if (rest_.substr(0, kw.size()) != kw ||
        (rest_.size() > kw.size() && !is_blank(rest_[kw.size()])))
      throw LineError{"expected " + std::string(kw)};
    rest_.remove_prefix(kw.size());
  }

  std::string quoted() {
    separator();
    if (rest_.empty() || rest_.front() != '"') throw LineError{"expected a double-quoted name"};
    rest_.remove_prefix(1);
    std::string out;
    while (true) {
      if (rest_.empty()) throw LineError{"unterminated quoted name"};
      const char c = rest_.front();
      rest_.remove_prefix(1);
      if (c == '"') break;
      if (c == '\\') {
        if (rest_.empty() || (rest_.front() != '"' && rest_.front() != '\\'))
          throw LineError{"bad escape in quoted name"};
        out += rest_.front();
        rest_.remove_prefix(1);
        continue;
      }
      out += c;
    }
    if (out.empty()) throw LineError{"empty quoted name"};
    return out;
  }

  void end() const {
    if (!rest_.empty()) throw LineError{"unexpected trailing text"};
  }

 private:
  // Tokens after the first must be preceded by at least one blank.
  void separator() {
    std::size_t n = 0;
    while (!rest_.empty() && is_blank(rest_.front())) {
      rest_.remove_prefix(1);
      ++n;
    }
    if (n == 0 && !first_) throw LineError{"expected a space between tokens"};
    first_ = false;
  }

  std::string_view rest_;
  bool first_ = true;
};

WorldChange parse_line(std::string_view keyword, LineReader& r) {
  r.keyword(keyword);
  WorldChange change;
  if (keyword == "MOVE") {
    Move m;
    m.character = r.quoted();
    r.keyword("TO");
    m.destination = r.quoted();
    change = m;
  } else if (keyword == "TAKE" || keyword == "DROP") {
    auto it = r.quoted();
    r.keyword("BY");
    auto who = r.quoted();
    if (keyword == "TAKE") change = Take{it, who};
    else change = Drop{it, who};
  } else if (keyword == "GIVE") {
    Give g;
    g.item = r.quoted();
    r.keyword("FROM");
    g.giver = r.quoted();
    r.keyword("TO");
    g.receiver = r.quoted();
    change = g;
  } else if (keyword == "UNBLOCK") {
    Unblock u;
    u.target = r.quoted();
    r.keyword("FROM");
    u.from = r.quoted();
    change = u;
  } else {
    change = NoChange{};
  }
  r.end();
  return change;
}

std::string quote(std::string_view name) {
  std::string out = "\"";
  for (char c : name) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

ParseResult parse_changes(std::string_view text) {
  ParseResult result;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const auto raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    const auto line = trim(raw);
    auto first = line.substr(0, std::min(line.size(), line.find_first_of(" \t")));
    const auto* kw = std::find(kKeywords.begin(), kKeywords.end(), first);
    if (kw == kKeywords.end()) continue;  // prose, fences, blank lines

    LineReader reader(line);
    try {
      result.changes.push_back(parse_line(*kw, reader));
    } catch (const LineError& e) {
      Rejection rej;
      rej.line = std::string(line);
      rej.reason = RejectReason::ParseError;
      rej.subject = std::string(line);
      rej.detail = "malformed " + std::string(*kw) + " line: " + e.message;
      result.rejections.push_back(std::move(rej));
    }
  }
  return result;
}

std::string format_change(const WorldChange& change) {
  struct Formatter {
    std::string operator()(const Move& m) const {
      return "MOVE " + quote(m.character) + " TO " + quote(m.destination);
    }
    std::string operator()(const Take& t) const {
      return "TAKE " + quote(t.item) + " BY " + quote(t.character);
    }
    std::string operator()(const Drop& d) const {
      return "DROP " + quote(d.item) + " BY " + quote(d.character);
    }
    std::string operator()(const Give& g) const {
      return "GIVE " + quote(g.item) + " FROM " + quote(g.giver) + " TO " + quote(g.receiver);
    }
    std::string operator()(const Unblock& u) const {
      return "UNBLOCK " + quote(u.target) + " FROM " + quote(u.from);
    }
    std::string operator()(const NoChange&) const { return "NONE"; }
  };
  return std::visit(Formatter{}, change);
}

}  // namespace worldkeeper
