#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ard {

/// Flat `key = value` settings grouped in `[section]`s (INI). Keys are
/// addressed as "section.key"; keys before any section header live at the
/// top level.
class Config {
 public:
  Config() = default;

  /// Throws ErrorCode::Config on malformed text.
  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> raw(const std::string& key) const;
  /// Typed lookups; ErrorCode::Config when the value does not parse in full.
  std::optional<double> number(const std::string& key) const;
  std::optional<int> integer(const std::string& key) const;
  std::optional<bool> boolean(const std::string& key) const;
  /// Comma-separated numbers.
  std::optional<std::vector<double>> numbers(const std::string& key) const;

  std::vector<std::string> keys() const;
  /// Throws ErrorCode::Config naming the first key outside `allowed`
  /// within `section` (or any section when `section` is empty).
  void require_known(const std::string& section, const std::set<std::string>& allowed) const;

 private:
  std::map<std::string, std::string> values_;
};

/// Strict full-string numeric parsing shared by the config and the CLI.
double parse_double(std::string_view text, std::string_view what);
int parse_int(std::string_view text, std::string_view what);
/// true/1/yes/on or false/0/no/off.
bool parse_bool(std::string_view text, std::string_view what);

/// Flag value if given, else config value if present, else the default.
template <class T>
T resolve(const std::optional<T>& flag, const std::optional<T>& config, const T& fallback) {
  if (flag) return *flag;
  if (config) return *config;
  return fallback;
}

}  // namespace ard
