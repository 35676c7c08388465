#include <iostream>

#include "CLI11.hpp"
#include "minivl/minivl.hpp"

int main(int argc, char** argv) {
  CLI::App app{"minivl: Verilog subset checker and simulator"};
  app.require_subcommand(1);

  std::vector<std::string> files;
  std::string top;
  uint64_t max_time = minivl::SimOptions{}.max_time;
  uint64_t max_steps = minivl::SimOptions{}.max_steps;

  auto* check = app.add_subcommand("check", "parse and elaborate");
  check->add_option("files", files, "Verilog sources")->required();
  check->add_option("--top", top, "top-level module");

  auto* sim = app.add_subcommand("sim", "compile and simulate");
  sim->add_option("files", files, "Verilog sources")->required();
  sim->add_option("--top", top, "top-level module");
  sim->add_option("--max-time", max_time, "stop after this simulation time");
  sim->add_option("--max-steps", max_steps, "stop after this many executed statements");

  CLI11_PARSE(app, argc, argv);

  if (*check) {
    auto r = minivl::check_files(files, top);
    for (const auto& d : r.diagnostics) std::cerr << d.str() << "\n";
    return r.ok ? 0 : 1;
  }
  minivl::SimOptions opt;
  opt.top = top;
  opt.max_time = max_time;
  opt.max_steps = max_steps;
  auto r = minivl::simulate_files(files, opt);
  std::cout << r.output << std::flush;
  for (const auto& d : r.diagnostics) std::cerr << d.str() << "\n";
  return r.exit_code;
}
