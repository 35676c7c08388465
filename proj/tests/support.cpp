#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <sstream>

#include "haven/cli.hpp"
#include "haven/topics.hpp"
#include "haven/util.hpp"

namespace test {

namespace fs = std::filesystem;

fs::path data_dir() { return HAVEN_DATA_DIR; }
fs::path bin_dir() { return HAVEN_BIN_DIR; }

haven::Config tool_config() {
  haven::Config c;
  c.set("compiler.cmd", (bin_dir() / "minivl").string() + " check {src}");
  c.set("sim.cmd", (bin_dir() / "minivl").string() + " sim {tb} {ref} {src}");
  return c;
}

ScratchDir::ScratchDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("haven-test-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  fs::create_directories(path_);
}

ScratchDir::~ScratchDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

RunResult run_haven(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"haven"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int rc = haven::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return RunResult{rc, out.str(), err.str()};
}

std::map<std::string, LabelScore> score_labels(const fs::path& snippets, const fs::path& labels,
                                               std::vector<std::string>* misses, int* count) {
  const std::vector<std::string> names = {"Fsm",       "Counter",    "ShiftRegister",    "ClockDivider",
                                          "Alu",       "SyncReset",  "AsyncReset",       "PosEdge",
                                          "NegEdge",   "ActiveHighEnable", "ActiveLowEnable"};
  std::map<std::string, LabelScore> out;
  for (const auto& n : names) out[n];
  int seen = 0;
  for (const auto& j : haven::read_jsonl(labels)) {
    ++seen;
    std::string file = j.at("file").get<std::string>();
    auto profile = haven::analyze(haven::read_file(snippets / file));
    auto got = profile.tags();
    std::vector<std::string> want;
    for (const auto& t : j.at("topics")) want.push_back(t.get<std::string>());
    for (const auto& a : j.at("attributes")) want.push_back(a.get<std::string>());
    auto has = [](const std::vector<std::string>& v, const std::string& x) {
      return std::find(v.begin(), v.end(), x) != v.end();
    };
    for (const auto& n : names) {
      bool g = has(got, n), w = has(want, n);
      if (g && w) ++out[n].tp;
      if (g && !w) {
        ++out[n].fp;
        if (misses) misses->push_back("FP " + n + " " + file);
      }
      if (!g && w) {
        ++out[n].fn;
        if (misses) misses->push_back("FN " + n + " " + file);
      }
    }
  }
  if (count) *count = seen;
  return out;
}

}  // namespace test
