#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace minivl {

struct Diagnostic {
  std::string file;
  int line = 0;
  std::string message;

  // "file:line: error: message"
  std::string str() const;
};

struct NamedSource {
  std::string name;
  std::string text;
};

struct CheckResult {
  bool ok = false;
  std::vector<Diagnostic> diagnostics;
  std::vector<std::string> tops;
};

struct SimOptions {
  std::string top;
  uint64_t max_time = 100'000'000;
  uint64_t max_steps = 50'000'000;
  uint64_t max_deltas = 1'000'000;
  size_t max_output = 8u << 20;
};

struct SimResult {
  // 0: ran to completion or $finish; 1: compile error or $fatal; 2: runtime error.
  int exit_code = 0;
  std::string output;
  std::vector<Diagnostic> diagnostics;
  uint64_t end_time = 0;
  bool finished = false;  // $finish reached
};

// Parses and elaborates; every file is parsed even when an earlier one fails.
CheckResult check_sources(const std::vector<NamedSource>& sources, const std::string& top = "");
CheckResult check_files(const std::vector<std::string>& paths, const std::string& top = "");

SimResult simulate_sources(const std::vector<NamedSource>& sources, const SimOptions& options = {});
SimResult simulate_files(const std::vector<std::string>& paths, const SimOptions& options = {});

}  // namespace minivl
