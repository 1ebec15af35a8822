#include "config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hjbtk {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
  if (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

[[noreturn]] void bad_value(const std::string& section, const std::string& key,
                            const std::string& what) {
  throw Error(errc::config, "config: [" + section + "] " + key + ": " + what);
}

}  // namespace

ConfigMap ConfigMap::parse(const std::string& text) {
  ConfigMap cfg;
  std::string section = "global";
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']' || t.size() < 3)
        throw Error(errc::config,
                    "config: malformed section header on line " + std::to_string(lineno));
      section = trim(t.substr(1, t.size() - 2));
      cfg.sections_[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(errc::config, "config: expected 'key = value' on line " + std::to_string(lineno));
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw Error(errc::config, "config: empty key on line " + std::to_string(lineno));
    cfg.sections_[section][key] = value;
  }
  return cfg;
}

ConfigMap ConfigMap::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io, "config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool ConfigMap::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

void ConfigMap::set(const std::string& section, const std::string& key,
                    const std::string& value) {
  sections_[section][key] = value;
}

std::string ConfigMap::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return fallback;
  const auto k = s->second.find(key);
  return k == s->second.end() ? fallback : k->second;
}

std::string ConfigMap::require_string(const std::string& section, const std::string& key) const {
  if (!has(section, key)) bad_value(section, key, "required key is missing");
  return get_string(section, key, "");
}

double ConfigMap::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
  if (!has(section, key)) return fallback;
  return require_double(section, key);
}

double ConfigMap::require_double(const std::string& section, const std::string& key) const {
  const std::string raw = require_string(section, key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (pos != raw.size()) bad_value(section, key, "trailing characters in number '" + raw + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    bad_value(section, key, "not a number: '" + raw + "'");
  }
}

std::int64_t ConfigMap::get_int(const std::string& section, const std::string& key,
                                std::int64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string raw = require_string(section, key);
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(raw, &pos);
    if (pos != raw.size()) bad_value(section, key, "trailing characters in integer '" + raw + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    bad_value(section, key, "not an integer: '" + raw + "'");
  }
}

std::uint64_t ConfigMap::get_u64(const std::string& section, const std::string& key,
                                 std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  const std::string raw = require_string(section, key);
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(raw, &pos);
    if (pos != raw.size()) bad_value(section, key, "trailing characters in integer '" + raw + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    bad_value(section, key, "not an unsigned integer: '" + raw + "'");
  }
}

bool ConfigMap::get_bool(const std::string& section, const std::string& key,
                         bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string raw = require_string(section, key);
  if (raw == "true" || raw == "1" || raw == "yes" || raw == "on") return true;
  if (raw == "false" || raw == "0" || raw == "no" || raw == "off") return false;
  bad_value(section, key, "not a boolean: '" + raw + "'");
}

std::vector<double> ConfigMap::get_doubles(const std::string& section, const std::string& key,
                                           const std::vector<double>& fallback) const {
  if (!has(section, key)) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(require_string(section, key))) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) bad_value(section, key, "bad list entry '" + item + "'");
    } catch (const Error&) {
      throw;
    } catch (...) {
      bad_value(section, key, "bad list entry '" + item + "'");
    }
  }
  return out;
}

std::vector<std::string> ConfigMap::get_strings(const std::string& section,
                                                const std::string& key,
                                                const std::vector<std::string>& fallback) const {
  if (!has(section, key)) return fallback;
  return split_list(require_string(section, key));
}

std::string ConfigMap::canonical() const {
  std::string out;
  for (const auto& [sec, kv] : sections_) {
    if (kv.empty()) continue;
    out += "[" + sec + "]\n";
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  }
  return out;
}

std::uint64_t ConfigMap::hash() const { return fnv1a64(canonical()); }

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace hjbtk
