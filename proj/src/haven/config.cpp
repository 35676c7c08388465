#include "haven/config.hpp"

#include <sstream>

#include "haven/error.hpp"
#include "haven/util.hpp"

namespace haven {

Config::Config() {
  values_ = {
      {"compiler.cmd", "minivl check {src}"},
      {"compiler.timeout_s", "10"},
      {"sim.cmd", "minivl sim {tb} {ref} {src}"},
      {"sim.timeout_s", "30"},
      {"llm.endpoint", "https://api.openai.com/v1/chat/completions"},
      {"llm.model", "gpt-4o-mini"},
      {"llm.api_key_env", "HAVEN_API_KEY"},
      {"llm.max_inflight", "4"},
      {"llm.max_attempts", "4"},
      {"llm.timeout_s", "60"},
      {"llm.temperature", "0.2"},
      {"llm.audit_log", ""},
      {"workers", "4"},
      {"seed", "0"},
      {"eval.fail_tokens", "MISMATCH,Error"},
  };
}

void Config::load_file(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ConfigError, path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw Error(ErrorCode::ConfigError, path.string() + ":" + std::to_string(lineno) + ": empty key");
    values_[key] = trim(t.substr(eq + 1));
  }
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

void Config::set_assignment(const std::string& assignment) {
  size_t eq = assignment.find('=');
  if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty())
    throw Error(ErrorCode::ConfigError, "expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end() || it->second.empty()) return fallback;
  try {
    size_t used = 0;
    double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, key + ": not a number: '" + it->second + "'");
  }
}

long long Config::get_int(const std::string& key, long long fallback) const {
  auto it = values_.find(key);
  if (it == values_.end() || it->second.empty()) return fallback;
  try {
    size_t used = 0;
    long long v = std::stoll(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, key + ": not an integer: '" + it->second + "'");
  }
}

std::string Config::hash() const {
  std::string canon;
  for (const auto& [k, v] : values_) canon += k + "=" + v + "\n";
  return sha256_hex(canon);
}

}  // namespace haven
