#include "aid/config.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "aid/error.hpp"
#include "aid/io.hpp"

namespace aid::config {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct Cursor {
  std::string_view s;
  std::size_t i = 0;
  const std::string& where;

  [[noreturn]] void fail(const std::string& msg) const { throw Error(where + ": " + msg); }
  void skip_ws() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
  }
  bool done() {
    skip_ws();
    return i >= s.size() || s[i] == '#';
  }

  std::string quoted() {
    char q = s[i++];
    std::string out;
    while (i < s.size() && s[i] != q) {
      char c = s[i++];
      if (c == '\\' && q == '"') {
        if (i >= s.size()) fail("unterminated escape");
        char e = s[i++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unknown escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    if (i >= s.size()) fail("unterminated string");
    ++i;
    return out;
  }

  std::string bare(bool in_array) {
    auto start = i;
    while (i < s.size() && s[i] != '#' && !(in_array && (s[i] == ',' || s[i] == ']'))) ++i;
    return std::string(trim(s.substr(start, i - start)));
  }
};

}  // namespace

Document Document::parse(std::string_view text, const std::string& source) {
  Document doc;
  doc.source_ = source;
  std::string section;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '[') {
      auto close = line.find(']');
      if (close == std::string_view::npos) throw Error(where + ": unterminated section header");
      section = std::string(trim(line.substr(1, close - 1)));
      if (section.empty()) throw Error(where + ": empty section name");
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(where + ": expected key = value");
    auto key = std::string(trim(line.substr(0, eq)));
    if (key.empty()) throw Error(where + ": missing key");
    if (!section.empty()) key = section + "." + key;

    Cursor c{line.substr(eq + 1), 0, where};
    Value v;
    v.line = lineno;
    c.skip_ws();
    if (c.i < c.s.size() && c.s[c.i] == '[') {
      v.array = true;
      ++c.i;
      for (;;) {
        c.skip_ws();
        if (c.i >= c.s.size()) c.fail("unterminated array");
        if (c.s[c.i] == ']') {
          ++c.i;
          break;
        }
        if (c.s[c.i] == '"' || c.s[c.i] == '\'') {
          v.items.push_back(c.quoted());
          v.quoted = true;
        } else {
          auto item = c.bare(true);
          if (item.empty()) c.fail("empty array element");
          v.items.push_back(item);
        }
        c.skip_ws();
        if (c.i < c.s.size() && c.s[c.i] == ',') ++c.i;
      }
    } else if (c.i < c.s.size() && (c.s[c.i] == '"' || c.s[c.i] == '\'')) {
      v.items.push_back(c.quoted());
      v.quoted = true;
    } else {
      v.items.push_back(c.bare(false));
      if (v.items.back().empty()) c.fail("missing value for " + key);
    }
    if (!c.done()) c.fail("unexpected text after value of " + key);
    if (!doc.values_.emplace(key, std::move(v)).second) throw Error(where + ": duplicate key " + key);
  }
  return doc;
}

Document Document::load(const std::filesystem::path& path) {
  auto doc = parse(io::read_text(path), path.string());
  doc.base_dir_ = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return doc;
}

std::vector<std::string> Document::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

const Document::Value& Document::at(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(source_ + ": missing required key " + key);
  return it->second;
}

void Document::bad(const std::string& key, const std::string& what) const {
  throw Error(source_ + ":" + std::to_string(at(key).line) + ": " + key + " " + what);
}

std::string Document::get_string(const std::string& key) const {
  const auto& v = at(key);
  if (v.array) bad(key, "must be a single value");
  return v.items.front();
}

std::string Document::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

static bool to_int(const std::string& s, std::int64_t& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

std::int64_t Document::get_int(const std::string& key) const {
  std::int64_t out = 0;
  if (!to_int(get_string(key), out)) bad(key, "must be an integer");
  return out;
}

std::int64_t Document::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t Document::get_uint(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  auto s = get_string(key);
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size()) bad(key, "must be a non-negative integer");
  return out;
}

double Document::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  auto s = get_string(key);
  try {
    std::size_t used = 0;
    double d = std::stod(s, &used);
    if (used != s.size()) bad(key, "must be a number");
    return d;
  } catch (const std::logic_error&) {
    bad(key, "must be a number");
  }
}

bool Document::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  auto s = get_string(key);
  if (s == "true") return true;
  if (s == "false") return false;
  bad(key, "must be true or false");
}

std::vector<std::int64_t> Document::get_int_list(const std::string& key) const {
  const auto& v = at(key);
  std::vector<std::int64_t> out;
  for (const auto& item : v.items) {
    std::int64_t x = 0;
    if (!to_int(item, x)) bad(key, "must hold integers");
    out.push_back(x);
  }
  return out;
}

std::vector<std::string> Document::get_string_list(const std::string& key) const { return at(key).items; }

std::filesystem::path Document::get_path(const std::string& key) const {
  std::filesystem::path p = get_string(key);
  return p.is_absolute() ? p : base_dir_ / p;
}

void Document::require_known(const std::vector<std::string>& known) const {
  for (const auto& [k, v] : values_)
    if (std::find(known.begin(), known.end(), k) == known.end())
      throw Error(source_ + ":" + std::to_string(v.line) + ": unknown key " + k);
}

}  // namespace aid::config
