#include "haven/toolchain.hpp"

#include "haven/config.hpp"
#include "haven/error.hpp"
#include "haven/util.hpp"

namespace haven {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> resolve(std::vector<std::string> argv, ErrorCode missing, const std::string& what) {
  if (argv.empty()) throw Error(missing, what + " command is empty");
  fs::path exe = find_executable(argv[0]);
  if (exe.empty()) throw Error(missing, what + " '" + argv[0] + "' not found");
  argv[0] = exe.string();
  return argv;
}

}  // namespace

Toolchain::Toolchain(const Config& config)
    : compiler_(config.get("compiler.cmd")),
      sim_(config.get("sim.cmd")),
      compile_timeout_s_(config.get_double("compiler.timeout_s", 10)),
      sim_timeout_s_(config.get_double("sim.timeout_s", 30)) {
  std::string tokens = config.get("eval.fail_tokens", "MISMATCH,Error");
  size_t start = 0;
  while (start <= tokens.size()) {
    size_t comma = tokens.find(',', start);
    std::string t = trim(tokens.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!t.empty()) fail_tokens_.push_back(t);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
}

VerificationResult Toolchain::compile(const std::string& code) const {
  TempDir dir("haven-compile");
  fs::path src = dir.path() / "design.v";
  write_file(src, code);
  auto argv = resolve(compiler_.expand({{"src", src.string()}, {"work", dir.path().string()}}),
                      ErrorCode::CompilerNotFound, "compiler");
  ProcessResult p;
  try {
    p = run_process(argv, dir.path(), compile_timeout_s_);
  } catch (const std::runtime_error& e) {
    throw Error(ErrorCode::CompilerNotFound, e.what());
  }
  VerificationResult r;
  r.exit_code = p.exit_code;
  r.diagnostics = p.output;
  if (p.timed_out) {
    r.exit_code = -1;
    r.diagnostics += "\ncompiler timed out after " + std::to_string(compile_timeout_s_) + " s";
  }
  r.ok = r.exit_code == 0;
  return r;
}

SimulationResult Toolchain::simulate(const std::string& testbench, const std::string& reference,
                                     const std::string& design) const {
  if (sim_.empty()) throw Error(ErrorCode::SimulatorNotFound, "sim.cmd is not configured");
  TempDir dir("haven-sim");
  fs::path tb = dir.path() / "tb.v", ref = dir.path() / "ref.v", src = dir.path() / "design.v";
  write_file(tb, testbench);
  write_file(src, design);
  std::map<std::string, std::string> values{
      {"tb", tb.string()}, {"src", src.string()}, {"work", dir.path().string()}, {"ref", ""}};
  if (!reference.empty()) {
    write_file(ref, reference);
    values["ref"] = ref.string();
  }
  auto argv = resolve(sim_.expand(values), ErrorCode::SimulatorNotFound, "simulator");
  ProcessResult p;
  try {
    p = run_process(argv, dir.path(), sim_timeout_s_);
  } catch (const std::runtime_error& e) {
    throw Error(ErrorCode::SimulatorNotFound, e.what());
  }
  SimulationResult r;
  r.exit_code = p.exit_code;
  r.output = p.output;
  r.timed_out = p.timed_out;
  r.pass = !p.timed_out && p.exit_code == 0;
  for (const auto& t : fail_tokens_)
    if (r.output.find(t) != std::string::npos) r.pass = false;
  return r;
}

}  // namespace haven
