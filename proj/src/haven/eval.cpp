#include "haven/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <regex>
#include <set>

#include "haven/error.hpp"
#include "haven/symbolic.hpp"

namespace haven {

namespace fs = std::filesystem;

double pass_at_k(int n, int c, int k) {
  if (n < 1 || c < 0 || c > n || k < 1 || k > n)
    throw Error(ErrorCode::InvalidCounts,
                "need 0 <= c <= n and 1 <= k <= n, got n=" + std::to_string(n) + " c=" + std::to_string(c) +
                    " k=" + std::to_string(k));
  if (n - c < k) return 1.0;
  double fail = 1.0;
  for (int i = n - c + 1; i <= n; ++i) fail *= 1.0 - static_cast<double>(k) / i;
  return 1.0 - fail;
}

std::string normalize_completion(const std::string& completion, const std::string& prompt) {
  std::string code = completion;
  size_t fence = code.find("```");
  if (fence != std::string::npos) {
    size_t body = code.find('\n', fence);
    size_t close = body == std::string::npos ? std::string::npos : code.find("```", body);
    if (body != std::string::npos) code = code.substr(body + 1, close == std::string::npos ? std::string::npos : close - body - 1);
  }
  static const std::regex module_kw(R"(\bmodule\b)");
  if (!std::regex_search(code, module_kw)) {
    if (auto header = extract_module_header(prompt)) code = *header + "\n" + code;
  }
  return code;
}

TaskResult run_task(const BenchTask& task, const std::vector<std::string>& candidates, const Toolchain& toolchain,
                    int workers) {
  if (task.kind == TaskKind::Functional && task.testbench.empty())
    throw Error(ErrorCode::PreconditionViolation, "functional task " + task.id + " has no testbench");
  TaskResult r;
  r.task_id = task.id;
  r.n = static_cast<int>(candidates.size());
  r.candidates = parallel_map<CandidateLog>(candidates.size(), workers, [&](size_t i) {
    CandidateLog log;
    log.trial_index = static_cast<int>(i);
    std::string code = normalize_completion(candidates[i], task.prompt);
    auto v = toolchain.compile(code);
    log.compiled = v.ok;
    log.log = v.diagnostics;
    if (!v.ok) return log;
    if (task.kind == TaskKind::SyntaxOnly) {
      log.passed = true;
      return log;
    }
    auto s = toolchain.simulate(task.testbench, task.reference, code);
    log.passed = s.pass;
    log.log += s.output;
    if (s.timed_out) log.log += "\nsimulation timed out";
    return log;
  });
  for (const auto& c : r.candidates) r.c += c.passed ? 1 : 0;
  return r;
}

PassAtKReport aggregate(const std::vector<TaskResult>& results, const std::vector<int>& ks) {
  if (results.empty()) throw Error(ErrorCode::MixedN, "no task results to aggregate");
  int n = results[0].n;
  for (const auto& r : results)
    if (r.n != n) throw Error(ErrorCode::MixedN, "task " + r.task_id + " has n=" + std::to_string(r.n) + ", expected " + std::to_string(n));
  PassAtKReport rep;
  for (int k : ks) rep.mean[k] = 0.0;
  for (const auto& r : results) {
    TaskScore s{r.task_id, r.n, r.c, {}};
    for (int k : ks) {
      s.pass_at[k] = pass_at_k(r.n, r.c, k);
      rep.mean[k] += s.pass_at[k];
    }
    rep.tasks.push_back(std::move(s));
  }
  for (auto& [k, v] : rep.mean) v /= static_cast<double>(results.size());
  rep.metadata["n"] = n;
  return rep;
}

Json PassAtKReport::to_json() const {
  Json j;
  j["metadata"] = metadata;
  for (const auto& [k, v] : mean) j["pass@" + std::to_string(k)] = v;
  j["tasks"] = Json::array();
  for (const auto& t : tasks) {
    Json tj{{"task_id", t.task_id}, {"n", t.n}, {"c", t.c}};
    for (const auto& [k, v] : t.pass_at) tj["pass@" + std::to_string(k)] = v;
    j["tasks"].push_back(tj);
  }
  return j;
}

std::string PassAtKReport::to_csv() const {
  std::string out = "task_id,n,c";
  for (const auto& [k, v] : mean) out += ",pass@" + std::to_string(k);
  out += "\n";
  char buf[32];
  for (const auto& t : tasks) {
    out += t.task_id + "," + std::to_string(t.n) + "," + std::to_string(t.c);
    for (const auto& [k, v] : t.pass_at) {
      std::snprintf(buf, sizeof buf, ",%.6f", v);
      out += buf;
    }
    out += "\n";
  }
  out += "mean,,";
  for (const auto& [k, v] : mean) {
    std::snprintf(buf, sizeof buf, ",%.6f", v);
    out += buf;
  }
  return out + "\n";
}

namespace {

std::string read_first(const fs::path& dir, const std::string& stem, std::initializer_list<const char*> exts) {
  for (const char* e : exts) {
    fs::path p = dir / (stem + e);
    if (fs::exists(p)) return read_file(p);
  }
  return "";
}

}  // namespace

std::vector<BenchTask> load_verilogeval_tasks(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "task directory " + dir.string() + " not found");
  std::set<std::string> ids;
  const std::string suffix = "_prompt.txt";
  for (const auto& e : fs::directory_iterator(dir)) {
    std::string name = e.path().filename().string();
    if (ends_with(name, suffix)) ids.insert(name.substr(0, name.size() - suffix.size()));
  }
  std::vector<BenchTask> out;
  for (const auto& id : ids) {
    BenchTask t;
    t.id = id;
    t.prompt = read_file(dir / (id + suffix));
    t.testbench = read_first(dir, id + "_test", {".sv", ".v"});
    t.reference = read_first(dir, id + "_ref", {".sv", ".v"});
    t.kind = t.testbench.empty() ? TaskKind::SyntaxOnly : TaskKind::Functional;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<BenchTask> load_rtllm_tasks(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "task directory " + dir.string() + " not found");
  std::vector<fs::path> subdirs;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory() && fs::exists(e.path() / "design_description.txt")) subdirs.push_back(e.path());
  std::sort(subdirs.begin(), subdirs.end());
  std::vector<BenchTask> out;
  for (const auto& d : subdirs) {
    BenchTask t;
    t.id = d.filename().string();
    t.prompt = read_file(d / "design_description.txt");
    t.testbench = read_first(d, "testbench", {".v", ".sv"});
    t.reference = read_first(d, "reference", {".v", ".sv"});
    t.kind = t.testbench.empty() ? TaskKind::SyntaxOnly : TaskKind::Functional;
    out.push_back(std::move(t));
  }
  return out;
}

std::map<std::string, std::vector<Candidate>> load_candidates(const fs::path& path) {
  std::map<std::string, std::vector<Candidate>> out;
  for (const auto& j : read_jsonl(path)) {
    try {
      out[j.at("task_id").get<std::string>()].push_back(
          Candidate{j.value("trial_index", 0), j.at("completion").get<std::string>()});
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::IoError, path.string() + ": bad candidate record: " + e.what());
    }
  }
  for (auto& [id, v] : out)
    std::stable_sort(v.begin(), v.end(), [](const Candidate& a, const Candidate& b) { return a.trial_index < b.trial_index; });
  return out;
}

}  // namespace haven
