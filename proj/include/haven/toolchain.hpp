#pragma once

#include <string>
#include <vector>

#include "haven/process.hpp"

namespace haven {

class Config;

struct VerificationResult {
  bool ok = false;  // exit_code == 0
  std::string diagnostics;
  int exit_code = -1;
};

struct SimulationResult {
  bool pass = false;  // exit 0 and no fail token in the output
  int exit_code = -1;
  std::string output;
  bool timed_out = false;
};

// External compiler and simulator driven through command templates
// (compiler.cmd with {src}; sim.cmd with {tb}, {ref}, {src}; both may use {work}).
class Toolchain {
 public:
  explicit Toolchain(const Config& config);

  // Syntax-checks `code` in a fresh temp directory. Throws
  // Error(CompilerNotFound); a timeout is reported as a failed result.
  VerificationResult compile(const std::string& code) const;

  // Simulates testbench + optional reference + design. Throws
  // Error(SimulatorNotFound) when sim.cmd is empty or its program is missing.
  SimulationResult simulate(const std::string& testbench, const std::string& reference,
                            const std::string& design) const;

  bool has_simulator() const { return !sim_.empty(); }
  const std::vector<std::string>& fail_tokens() const { return fail_tokens_; }

 private:
  CommandTemplate compiler_;
  CommandTemplate sim_;
  double compile_timeout_s_;
  double sim_timeout_s_;
  std::vector<std::string> fail_tokens_;
};

}  // namespace haven
