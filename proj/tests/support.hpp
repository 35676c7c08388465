#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "haven/config.hpp"

namespace test {

std::filesystem::path data_dir();
std::filesystem::path bin_dir();

// Defaults, with the compiler and simulator pointed at the in-tree minivl.
haven::Config tool_config();

// Fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag);
  ~ScratchDir();
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the haven command line in-process with separate output streams.
RunResult run_haven(const std::vector<std::string>& args);

struct LabelScore {
  int tp = 0, fp = 0, fn = 0;
  double precision() const { return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp); }
  double recall() const { return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / (tp + fn); }
};

// Scores haven::analyze against a labels file ({file, topics, attributes} per
// line, files relative to `snippets`). Keys are topic and attribute names.
// Disagreements are appended to `misses` as "FP Topic file" / "FN Topic file".
std::map<std::string, LabelScore> score_labels(const std::filesystem::path& snippets,
                                               const std::filesystem::path& labels,
                                               std::vector<std::string>* misses = nullptr, int* count = nullptr);

}  // namespace test
