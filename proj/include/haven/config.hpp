#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace haven {

// Flat key = value configuration. Lines starting with '#' and blank lines are
// ignored. Later assignments (and set()) override earlier ones.
class Config {
 public:
  Config();  // populated with defaults

  void load_file(const std::filesystem::path& path);  // throws Error(ConfigError/IoError)
  void set(const std::string& key, const std::string& value);
  // "key=value" form used by command-line overrides.
  void set_assignment(const std::string& assignment);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback = "") const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

  // SHA-256 over the sorted "key=value" lines.
  std::string hash() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace haven
