#pragma once

/**
 * @file config.hpp
 * @brief Key-value run configuration for the command-line tool.
 *
 * Format: one `key = value` per line, `#` starts a comment, lists are
 * comma-separated. Profile parameters use the `profile.` prefix, e.g.
 *
 *     profile = mathieu
 *     profile.eta = 0.5
 *     t_max = 30
 */

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tdho/frequency.hpp"

namespace tdho {

class RunConfig {
 public:
  RunConfig() = default;

  /// Throws ParameterError naming the offending line.
  static RunConfig parse(std::istream& in, const std::string& source = "<config>");
  static RunConfig from_file(const std::string& path);

  /// "key=value" override; later calls win.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
  [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const;
  [[nodiscard]] double get_double(const std::string& key, double fallback) const;
  [[nodiscard]] long get_int(const std::string& key, long fallback) const;
  [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;
  [[nodiscard]] std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  /// Parameters under `prefix.`, with the prefix stripped; all must be numeric.
  [[nodiscard]] std::map<std::string, double> numeric_group(const std::string& prefix) const;

  /// Rejects keys outside `allowed` (entries ending in '.' admit any key with that prefix).
  void validate(const std::set<std::string>& allowed) const;

  [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// builtin_profile(profile, profile.*)
[[nodiscard]] FrequencyProfile profile_from_config(const RunConfig& cfg);
/// builtin_family(family, family.*)
[[nodiscard]] SlowTimeFamily family_from_config(const RunConfig& cfg);

}  // namespace tdho
