#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace aid::config {

/// Flat view of a small TOML-like file: `[section]` headers, `key = value`
/// lines and `#` comments. Values are strings (quoted or bare), integers,
/// floats, booleans, or one-line arrays of those. Keys inside a section are
/// stored as "section.key".
class Document {
 public:
  static Document parse(std::string_view text, const std::string& source = "<config>");
  static Document load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::vector<std::string> keys() const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::int64_t> get_int_list(const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& key) const;

  /// Resolves a path value relative to the file's directory.
  std::filesystem::path get_path(const std::string& key) const;

  /// Throws Error naming any key not in `known`.
  void require_known(const std::vector<std::string>& known) const;

  const std::filesystem::path& base_dir() const { return base_dir_; }

 private:
  struct Value {
    std::vector<std::string> items;  // one entry unless it was an array
    bool array = false;
    bool quoted = false;
    int line = 0;
  };
  const Value& at(const std::string& key) const;
  [[noreturn]] void bad(const std::string& key, const std::string& what) const;

  std::map<std::string, Value> values_;
  std::filesystem::path base_dir_{"."};
  std::string source_;
};

}  // namespace aid::config
