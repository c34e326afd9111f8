#include "ard/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "ard/error.hpp"
#include "ard/io.hpp"

namespace ard {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

double parse_double(std::string_view text, std::string_view what) {
  const std::string s = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    fail(ErrorCode::Config, std::string(what) + ": '" + s + "' is not a finite number");
  return v;
}

int parse_int(std::string_view text, std::string_view what) {
  const std::string s = trim(text);
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || v < -2147483647L ||
      v > 2147483647L)
    fail(ErrorCode::Config, std::string(what) + ": '" + s + "' is not an integer");
  return static_cast<int>(v);
}

bool parse_bool(std::string_view text, std::string_view what) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  fail(ErrorCode::Config, std::string(what) + ": '" + s + "' is not a boolean");
}

Config Config::parse(std::string_view text) {
  boost::property_tree::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    fail(ErrorCode::Config, "config line " + std::to_string(e.line()) + ": " + e.message());
  }
  Config c;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      c.values_[name] = trim(node.data());
      continue;
    }
    for (const auto& [key, leaf] : node) c.values_[name + "." + key] = trim(leaf.data());
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) fail(ErrorCode::Config, "config file " + path.string() + " not found");
  return parse(read_text(path));
}

std::optional<std::string> Config::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> Config::number(const std::string& key) const {
  const auto r = raw(key);
  if (!r) return std::nullopt;
  return parse_double(*r, key);
}

std::optional<int> Config::integer(const std::string& key) const {
  const auto r = raw(key);
  if (!r) return std::nullopt;
  return parse_int(*r, key);
}

std::optional<bool> Config::boolean(const std::string& key) const {
  const auto r = raw(key);
  if (!r) return std::nullopt;
  return parse_bool(*r, key);
}

std::optional<std::vector<double>> Config::numbers(const std::string& key) const {
  const auto r = raw(key);
  if (!r) return std::nullopt;
  std::vector<double> out;
  std::stringstream ss(*r);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, key));
  if (out.empty()) fail(ErrorCode::Config, key + ": empty list");
  return out;
}

std::vector<std::string> Config::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

void Config::require_known(const std::string& section, const std::set<std::string>& allowed) const {
  for (const auto& [k, v] : values_) {
    const auto dot = k.find('.');
    const std::string sec = dot == std::string::npos ? "" : k.substr(0, dot);
    const std::string name = dot == std::string::npos ? k : k.substr(dot + 1);
    if (sec != section) continue;
    if (!allowed.count(name)) fail(ErrorCode::Config, "unknown config key '" + k + "'");
  }
}

}  // namespace ard
