#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "errors.hpp"

namespace hjbtk {

// Flat key/value configuration with [section] grouping, '#'/';' comments and
// 'key = value' lines. Sections and keys are stored sorted so the canonical
// serialization (and hence the config hash) is order-independent.
class ConfigMap {
 public:
  static ConfigMap parse(const std::string& text);
  static ConfigMap load_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  std::string require_string(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  double require_double(const std::string& section, const std::string& key) const;
  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        std::uint64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  // Comma-separated doubles / strings.
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  const std::vector<double>& fallback) const;
  std::vector<std::string> get_strings(const std::string& section, const std::string& key,
                                       const std::vector<std::string>& fallback) const;

  std::string canonical() const;
  std::uint64_t hash() const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

}  // namespace hjbtk
