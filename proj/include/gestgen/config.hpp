#pragma once

// Reader for the small TOML subset used by limits files:
//
//   # comment
//   [section]
//   key = 1.5
//   range = [-2.0857, 2.0857]
//
// Keys are addressed as "section.key". Values stay as text until a typed
// accessor converts them.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "gestgen/error.hpp"

namespace gestgen {

class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
      ++line;
      std::string s = strip(raw.substr(0, raw.find('#')));
      if (s.empty()) continue;
      if (s.front() == '[' && s.find('=') == std::string::npos) {
        if (s.back() != ']') throw ParseError(line, "unterminated section header");
        section = strip(s.substr(1, s.size() - 2));
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ParseError(line, "expected 'key = value'");
      std::string key = strip(s.substr(0, eq));
      std::string value = strip(s.substr(eq + 1));
      if (key.empty() || value.empty()) throw ParseError(line, "empty key or value");
      if (!section.empty()) key = section + "." + key;
      if (!cfg.values_.emplace(key, Entry{value, line}).second) {
        throw ParseError(line, "duplicate key '" + key + "'");
      }
    }
    return cfg;
  }

  static KeyValueConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
      return parse(ss.str());
    } catch (const ParseError& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  double get_double(const std::string& key, double fallback) const {
    const auto* e = find(key);
    return e ? to_double(*e, e->text, key) : fallback;
  }

  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const {
    const auto* e = find(key);
    if (!e) return fallback;
    std::uint64_t v = 0;
    const auto* end = e->text.data() + e->text.size();
    const auto res = std::from_chars(e->text.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
      throw ConfigError("line " + std::to_string(e->line) + ": '" + key +
                        "' must be a non-negative integer");
    }
    return v;
  }

  std::pair<double, double> get_range(const std::string& key,
                                      std::pair<double, double> fallback) const {
    const auto* e = find(key);
    if (!e) return fallback;
    const std::string& t = e->text;
    const auto comma = t.find(',');
    if (t.front() != '[' || t.back() != ']' || comma == std::string::npos) {
      throw ConfigError("line " + std::to_string(e->line) + ": '" + key +
                        "' must be [min, max]");
    }
    return {to_double(*e, strip(t.substr(1, comma - 1)), key),
            to_double(*e, strip(t.substr(comma + 1, t.size() - comma - 2)), key)};
  }

  /// Rejects keys outside `known`, which catches misspelled settings.
  void require_known(const std::set<std::string>& known) const {
    for (const auto& [key, entry] : values_) {
      if (!known.count(key)) {
        throw ConfigError("line " + std::to_string(entry.line) + ": unknown key '" + key + "'");
      }
    }
  }

 private:
  struct Entry {
    std::string text;
    std::size_t line;
  };

  const Entry* find(const std::string& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
  }

  static std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  static double to_double(const Entry& e, const std::string& text, const std::string& key) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("line " + std::to_string(e.line) + ": '" + key + "' must be a number");
  }

  std::map<std::string, Entry> values_;
};

}  // namespace gestgen
