#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace hypoflow {

/// One `key = value` line; keys inside `[section]` are stored as `section.key`.
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

/// Flat sectioned key=value text. `#` and `;` start comments; later duplicates are errors.
class Config {
 public:
  static Config parse(std::string_view text, const std::string& origin = "<string>");
  static Config load(const std::filesystem::path& path);

  const std::string* find(const std::string& key) const;
  /// Adds or replaces a key (command-line overrides such as --seed).
  void set(const std::string& key, const std::string& value);

  const std::vector<ConfigEntry>& entries() const { return entries_; }
  const std::string& origin() const { return origin_; }
  /// Canonical text form: top-level keys first, then one block per section, in first-seen order.
  std::string text() const;

 private:
  std::string origin_;
  std::vector<ConfigEntry> entries_;
};

/// OptReal accepts a finite real or the word `auto`.
enum class ParamType { Int, Real, OptReal, Bool, String, Choice, IntList, RealList };

struct ParamSpec {
  std::string key;
  ParamType type = ParamType::Real;
  std::string default_value;
  double min = -1e300;
  double max = 1e300;
  std::vector<std::string> choices;
  std::string help;
};

/// A configuration validated against a parameter table; every key has a typed value.
class Params {
 public:
  int get_int(const std::string& key) const;
  double get_real(const std::string& key) const;
  std::optional<double> get_opt_real(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  const std::string& get_string(const std::string& key) const;
  std::vector<int> get_int_list(const std::string& key) const;
  std::vector<double> get_real_list(const std::string& key) const;
  bool explicitly_set(const std::string& key) const;

  /// Resolved values (defaults included) with their types.
  nlohmann::ordered_json to_json() const;

 private:
  friend Params validate(const Config&, const std::vector<ParamSpec>&, const std::vector<std::string>&);
  struct Value {
    ParamType type;
    std::string raw;
    std::vector<double> numbers;
    bool set = false;
  };
  const Value& at(const std::string& key) const;
  std::map<std::string, Value> values_;
  std::vector<std::string> order_;
};

/// Checks every entry against the table (unknown keys, types, ranges, choices) before any
/// computation; `ignored` keys are accepted and not typed. Throws ConfigError with the line number.
Params validate(const Config& cfg, const std::vector<ParamSpec>& specs, const std::vector<std::string>& ignored = {});

std::uint64_t parse_seed(const std::string& text);

}  // namespace hypoflow
