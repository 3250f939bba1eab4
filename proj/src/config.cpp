#include "hypoflow/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hypoflow/errors.hpp"

namespace hypoflow {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  return std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size() && std::isfinite(out);
}

bool parse_int(const std::string& s, long long& out) {
  const char* b = s.c_str();
  const char* e = b + s.size();
  if (b != e && *b == '+') ++b;
  const auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e && b != e;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

Config Config::parse(std::string_view text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::string section;
  std::istringstream is{std::string(text)};
  std::string raw;
  int line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!valid_key(section) || section.find('.') != std::string::npos) fail("invalid section name '" + section + "'");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!valid_key(key) || key.find('.') != std::string::npos) fail("invalid key '" + key + "'");
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.find(full)) fail("duplicate key '" + full + "'");
    cfg.entries_.push_back({full, value, line_no});
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

const std::string* Config::find(const std::string& key) const {
  for (const auto& e : entries_)
    if (e.key == key) return &e.value;
  return nullptr;
}

void Config::set(const std::string& key, const std::string& value) {
  for (auto& e : entries_)
    if (e.key == key) {
      e.value = value;
      return;
    }
  entries_.push_back({key, value, 0});
}

std::string Config::text() const {
  std::ostringstream os;
  std::vector<std::string> sections;
  for (const auto& e : entries_) {
    const auto dot = e.key.find('.');
    if (dot == std::string::npos) {
      os << e.key << " = " << e.value << "\n";
    } else {
      const std::string s = e.key.substr(0, dot);
      if (std::find(sections.begin(), sections.end(), s) == sections.end()) sections.push_back(s);
    }
  }
  for (const auto& s : sections) {
    os << "\n[" << s << "]\n";
    for (const auto& e : entries_)
      if (e.key.rfind(s + ".", 0) == 0) os << e.key.substr(s.size() + 1) << " = " << e.value << "\n";
  }
  return os.str();
}

Params validate(const Config& cfg, const std::vector<ParamSpec>& specs, const std::vector<std::string>& ignored) {
  Params p;
  for (const auto& e : cfg.entries()) {
    const bool known = std::any_of(specs.begin(), specs.end(), [&](const ParamSpec& s) { return s.key == e.key; });
    const bool skip = std::find(ignored.begin(), ignored.end(), e.key) != ignored.end();
    if (!known && !skip) {
      std::string allowed;
      for (const auto& s : specs) allowed += (allowed.empty() ? "" : ", ") + s.key;
      throw ConfigError(cfg.origin() + ":" + std::to_string(e.line) + ": unknown key '" + e.key +
                        "' (allowed: " + allowed + ")");
    }
  }
  for (const auto& s : specs) {
    const std::string* given = cfg.find(s.key);
    int line = 0;
    for (const auto& e : cfg.entries())
      if (e.key == s.key) line = e.line;
    Params::Value v{s.type, given ? *given : s.default_value, {}, given != nullptr};
    auto bad = [&](const std::string& why) {
      throw ConfigError(cfg.origin() + ":" + std::to_string(line) + ": " + s.key + " = '" + v.raw + "': " + why);
    };
    auto check_range = [&](double x) {
      if (x < s.min || x > s.max) {
        std::ostringstream os;
        os << "out of range [" << s.min << ", " << s.max << "]";
        bad(os.str());
      }
    };
    switch (s.type) {
      case ParamType::Int: {
        long long x = 0;
        if (!parse_int(v.raw, x)) bad("expected an integer");
        check_range(static_cast<double>(x));
        v.numbers = {static_cast<double>(x)};
        break;
      }
      case ParamType::Real: {
        double x = 0;
        if (!parse_real(v.raw, x)) bad("expected a finite real number");
        check_range(x);
        v.numbers = {x};
        break;
      }
      case ParamType::OptReal: {
        if (v.raw == "auto") break;
        double x = 0;
        if (!parse_real(v.raw, x)) bad("expected a finite real number or auto");
        check_range(x);
        v.numbers = {x};
        break;
      }
      case ParamType::Bool: {
        if (v.raw == "true" || v.raw == "1" || v.raw == "yes") v.numbers = {1.0};
        else if (v.raw == "false" || v.raw == "0" || v.raw == "no") v.numbers = {0.0};
        else bad("expected true or false");
        break;
      }
      case ParamType::String:
        break;
      case ParamType::Choice:
        if (std::find(s.choices.begin(), s.choices.end(), v.raw) == s.choices.end()) {
          std::string allowed;
          for (const auto& c : s.choices) allowed += (allowed.empty() ? "" : ", ") + c;
          bad("expected one of " + allowed);
        }
        break;
      case ParamType::IntList:
      case ParamType::RealList: {
        const auto items = split_list(v.raw);
        if (items.empty() || (items.size() == 1 && items[0].empty())) bad("expected a non-empty list");
        for (const auto& it : items) {
          double x = 0;
          if (s.type == ParamType::IntList) {
            long long n = 0;
            if (!parse_int(it, n)) bad("expected a comma-separated list of integers");
            x = static_cast<double>(n);
          } else if (!parse_real(it, x)) {
            bad("expected a comma-separated list of reals");
          }
          check_range(x);
          v.numbers.push_back(x);
        }
        break;
      }
    }
    p.values_[s.key] = std::move(v);
    p.order_.push_back(s.key);
  }
  return p;
}

const Params::Value& Params::at(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("parameter '" + key + "' is not defined for this experiment");
  return it->second;
}

int Params::get_int(const std::string& key) const { return static_cast<int>(at(key).numbers.at(0)); }
double Params::get_real(const std::string& key) const { return at(key).numbers.at(0); }

std::optional<double> Params::get_opt_real(const std::string& key) const {
  const Value& v = at(key);
  if (v.numbers.empty()) return std::nullopt;
  return v.numbers[0];
}
bool Params::get_bool(const std::string& key) const { return at(key).numbers.at(0) != 0.0; }
const std::string& Params::get_string(const std::string& key) const { return at(key).raw; }

std::vector<int> Params::get_int_list(const std::string& key) const {
  std::vector<int> out;
  for (double x : at(key).numbers) out.push_back(static_cast<int>(x));
  return out;
}

std::vector<double> Params::get_real_list(const std::string& key) const { return at(key).numbers; }

bool Params::explicitly_set(const std::string& key) const { return at(key).set; }

nlohmann::ordered_json Params::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& k : order_) {
    const Value& v = values_.at(k);
    switch (v.type) {
      case ParamType::Int: j[k] = static_cast<long long>(v.numbers[0]); break;
      case ParamType::Real: j[k] = v.numbers[0]; break;
      case ParamType::OptReal:
        if (v.numbers.empty()) j[k] = "auto";
        else j[k] = v.numbers[0];
        break;
      case ParamType::Bool: j[k] = v.numbers[0] != 0.0; break;
      case ParamType::String:
      case ParamType::Choice: j[k] = v.raw; break;
      case ParamType::IntList: {
        auto arr = nlohmann::ordered_json::array();
        for (double x : v.numbers) arr.push_back(static_cast<long long>(x));
        j[k] = arr;
        break;
      }
      case ParamType::RealList: j[k] = v.numbers; break;
    }
  }
  return j;
}

std::uint64_t parse_seed(const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size() || t.empty())
    throw ConfigError("seed must be a non-negative 64-bit integer, got '" + text + "'");
  return v;
}

}  // namespace hypoflow
