#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace haven {

struct ProcessResult {
  int exit_code = -1;     // -1 when killed or never started
  std::string output;     // stdout and stderr, interleaved
  bool timed_out = false;
};

// Runs argv[0] (an absolute or relative path, not searched on PATH) with a
// wall-clock limit. The child runs in its own process group, which is killed
// on timeout. Throws std::runtime_error when the process cannot be spawned.
ProcessResult run_process(const std::vector<std::string>& argv, const std::filesystem::path& cwd,
                          double timeout_s);

// Locates an executable: names containing '/' are taken as paths; bare names
// are looked up next to the running executable first, then on PATH.
// Returns an empty path when nothing executable is found.
std::filesystem::path find_executable(const std::string& name);

// External tool invocation such as "minivl sim {tb} {ref} {src}".
// Placeholders are substituted per argument; an argument that expands to the
// empty string is dropped, so optional inputs can stay in the template.
class CommandTemplate {
 public:
  CommandTemplate() = default;
  explicit CommandTemplate(std::string text) : text_(std::move(text)) {}

  const std::string& text() const { return text_; }
  bool empty() const { return text_.empty(); }

  // Splits on whitespace; single and double quotes group words.
  std::vector<std::string> expand(const std::map<std::string, std::string>& values) const;

 private:
  std::string text_;
};

// Temporary directory removed (recursively) on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "haven");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace haven
