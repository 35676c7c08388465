#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "haven/toolchain.hpp"
#include "haven/util.hpp"

namespace haven {

// 1 - C(n-c, k) / C(n, k) in product form. Throws Error(InvalidCounts) unless
// 0 <= c <= n and 1 <= k <= n.
double pass_at_k(int n, int c, int k);

enum class TaskKind { SyntaxOnly, Functional };

struct BenchTask {
  std::string id;
  std::string prompt;
  std::string testbench;  // empty for SyntaxOnly
  std::string reference;  // optional reference module compiled with the testbench
  TaskKind kind = TaskKind::SyntaxOnly;
};

struct CandidateLog {
  int trial_index = 0;
  bool compiled = false;
  bool passed = false;
  std::string log;
};

struct TaskResult {
  std::string task_id;
  int n = 0;
  int c = 0;
  std::vector<CandidateLog> candidates;
};

// Strips markdown fences; prepends the prompt's module header when the
// completion has no `module` keyword (completions that continue the header).
std::string normalize_completion(const std::string& completion, const std::string& prompt);

// Candidates are compiled, and Functional tasks also simulated; timeouts and
// failures count as not passing.
TaskResult run_task(const BenchTask& task, const std::vector<std::string>& candidates, const Toolchain& toolchain,
                    int workers = 1);

struct TaskScore {
  std::string task_id;
  int n = 0;
  int c = 0;
  std::map<int, double> pass_at;
};

struct PassAtKReport {
  std::vector<TaskScore> tasks;
  std::map<int, double> mean;  // per k
  Json metadata = Json::object();

  Json to_json() const;
  std::string to_csv() const;
};

// Throws Error(MixedN) for an empty list or tasks with different n.
PassAtKReport aggregate(const std::vector<TaskResult>& results, const std::vector<int>& ks);

// <dir>/<id>_prompt.txt with optional <id>_test.sv / <id>_test.v and <id>_ref.sv / <id>_ref.v.
std::vector<BenchTask> load_verilogeval_tasks(const std::filesystem::path& dir);
// <dir>/<id>/design_description.txt with optional testbench.v and reference.v.
std::vector<BenchTask> load_rtllm_tasks(const std::filesystem::path& dir);

struct Candidate {
  int trial_index = 0;
  std::string completion;
};

// JSON Lines {task_id, completion, trial_index}, grouped by task and sorted by trial_index.
std::map<std::string, std::vector<Candidate>> load_candidates(const std::filesystem::path& path);

}  // namespace haven
