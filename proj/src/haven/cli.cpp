#include "haven/cli.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "haven/config.hpp"
#include "haven/error.hpp"
#include "haven/eval.hpp"
#include "haven/kdataset.hpp"
#include "haven/ldataset.hpp"
#include "haven/llm.hpp"
#include "haven/sicot.hpp"
#include "haven/toolchain.hpp"
#include "haven/topics.hpp"

namespace haven {

namespace {

struct Globals {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<uint64_t> seed;
  std::optional<int> workers;
  std::string mock_llm;
  bool verbose = false;
};

Json meta_line(const std::string& command, const Config& config) {
  return Json{{"_meta",
               {{"tool", "haven"},
                {"version", kVersion},
                {"command", command},
                {"seed", static_cast<uint64_t>(config.get_int("seed", 0))},
                {"config_hash", config.hash()}}}};
}

// Writes to `path`, or to `out` when path is "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    return;
  }
  write_file(path, text);
}

class LazyClient {
 public:
  LazyClient(const Config& c, std::string mock) : config_(c), mock_(std::move(mock)) {}
  LlmClient& get() {
    std::call_once(once_, [&] { client_ = make_llm_client(config_, mock_); });
    return *client_;
  }

 private:
  const Config& config_;
  std::string mock_;
  std::once_flag once_;
  std::shared_ptr<LlmClient> client_;
};

int cmd_sicot(const Config& config, const Globals& g, const std::string& in, const std::string& out_path,
              const std::string& policy_name, bool passthrough, std::ostream& out) {
  SicotOptions opts;
  opts.policy = parse_route_policy(policy_name);
  opts.passthrough_on_failure = passthrough;
  opts.temperature = config.get_double("llm.temperature", 0.2);
  auto records = read_jsonl(in);
  LazyClient llm(config, g.mock_llm);
  int workers = static_cast<int>(config.get_int("workers", 4));
  auto lines = parallel_map<std::pair<bool, Json>>(records.size(), workers, [&](size_t i) {
    const Json& rec = records[i];
    Json o;
    if (rec.contains("id")) o["id"] = rec["id"];
    if (!rec.contains("prompt") || !rec["prompt"].is_string()) {
      o["error"] = "record has no string field 'prompt'";
      return std::make_pair(false, o);
    }
    std::string prompt = rec["prompt"].get<std::string>();
    o["prompt"] = prompt;
    try {
      LlmClient* client = opts.policy == RoutePolicy::DeterministicOnly ? nullptr : &llm.get();
      CoTPrompt cot = interpret(prompt, client, opts);
      o["cot_prompt"] = cot.final_text;
      o["routes"] = Json::array();
      for (const auto& r : cot.route_log)
        o["routes"].push_back(Json{{"begin", r.span.begin}, {"end", r.span.end}, {"kind", to_string(r.span.kind)},
                                   {"route", to_string(r.route)}});
      return std::make_pair(true, o);
    } catch (const Error& e) {
      o["error"] = e.what();
      spdlog::error("record {}: {}", i + 1, e.what());
      return std::make_pair(false, o);
    }
  });
  std::string text = to_jsonl_line(meta_line("sicot", config));
  bool ok = true;
  for (const auto& [good, j] : lines) {
    ok = ok && good;
    text += to_jsonl_line(j);
  }
  emit(out_path, text, out);
  return ok ? 0 : 1;
}

int cmd_gen_k(const Config& config, const Globals& g, const std::string& corpus_dir, const std::string& exemplar_dir,
              const std::string& out_path, std::ostream& out, std::ostream& err) {
  Toolchain tc(config);
  auto store = ExemplarStore::load(exemplar_dir, [&](const std::string& code) { return tc.compile(code); });
  auto corpus = load_corpus_dir(corpus_dir);
  LazyClient llm(config, g.mock_llm);
  auto result = run_k_pipeline(corpus, store, llm.get(), tc, static_cast<int>(config.get_int("workers", 4)));
  std::string text = to_jsonl_line(meta_line("gen-k", config));
  for (const auto& r : result.records) text += to_jsonl_line(r.to_json());
  emit(out_path, text, out);
  for (const auto& s : result.skips) err << "skipped " << s.item << ": " << s.reason << "\n";
  err << "files=" << result.stats.files << " vanilla=" << result.stats.vanilla << " matched=" << result.stats.matched
      << " augmented=" << result.stats.augmented << " llm_failures=" << result.stats.llm_failures
      << " compile_failures=" << result.stats.compile_failures << " emitted=" << result.records.size() << "\n";
  return 0;
}

struct GenLArgs {
  size_t count = 10;
  int n_min = 2;
  int n_max = 4;
  double dc_fraction = 0.0;
  bool evolve = false;
  int max_word_delta = 10;
  int max_retries = 2;
  bool no_verify = false;
  bool simulate = false;
};

int cmd_gen_l(const Config& config, const Globals& g, const GenLArgs& a, const std::string& out_path,
              std::ostream& out, std::ostream& err) {
  LDatasetParams p;
  p.count = a.count;
  p.n_min = a.n_min;
  p.n_max = a.n_max;
  p.dont_care_fraction = a.dc_fraction;
  p.seed = static_cast<uint64_t>(config.get_int("seed", 0));
  p.evolve = a.evolve;
  p.evolve_options.max_word_delta = a.max_word_delta;
  p.evolve_options.max_retries = a.max_retries;
  int workers = static_cast<int>(config.get_int("workers", 4));
  LazyClient llm(config, g.mock_llm);
  auto items = generate_l_dataset(p, a.evolve ? &llm.get() : nullptr, workers);

  Toolchain tc(config);
  std::vector<std::string> problems(items.size());
  parallel_map<int>(items.size(), a.no_verify ? 1 : workers, [&](size_t i) {
    auto& it = items[i];
    if (a.no_verify) return 0;
    auto v = tc.compile(it.pair.code);
    it.pair.verify = v.ok ? VerifyState::CompileOk : VerifyState::CompileFail;
    if (!v.ok) {
      it.pair.verify_message = v.diagnostics;
      problems[i] = "does not compile";
    } else if (a.simulate) {
      auto s = tc.simulate(it.testbench, "", it.pair.code);
      if (!s.pass) problems[i] = "testbench reports mismatches";
    }
    return 0;
  });

  std::string text = to_jsonl_line(meta_line("gen-l", config));
  int failures = 0;
  for (size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    if (!problems[i].empty()) {
      ++failures;
      err << it.pair.id << ": " << problems[i] << "\n";
      continue;
    }
    Json j = it.pair.to_json();
    j["template_id"] = it.template_id;
    j["flavor"] = to_string(it.problem.flavor);
    j["seed"] = it.problem.seed;
    j["n_inputs"] = it.problem.inputs.size();
    j["minimal"] = it.problem.minimal ? Json(to_verilog(*it.problem.minimal)) : Json(nullptr);
    j["evolved"] = it.evolved;
    j["testbench"] = it.testbench;
    text += to_jsonl_line(j);
  }
  emit(out_path, text, out);
  if (out_path != "-") {
    Json meta = l_dataset_meta(p);
    meta["_meta"] = meta_line("gen-l", config)["_meta"];
    write_file(out_path + ".meta.json", meta.dump(2) + "\n");
  }
  return failures == 0 ? 0 : 1;
}

int cmd_eval(const Config& config, const std::string& tasks_dir, const std::string& cand_path,
             const std::string& out_path, const std::string& csv_path, std::vector<int> ks, const std::string& layout,
             std::ostream& out, std::ostream& err) {
  auto tasks = layout == "rtllm" ? load_rtllm_tasks(tasks_dir) : load_verilogeval_tasks(tasks_dir);
  auto cands = load_candidates(cand_path);
  Toolchain tc(config);
  int workers = static_cast<int>(config.get_int("workers", 4));
  std::vector<TaskResult> results;
  for (const auto& t : tasks) {
    auto it = cands.find(t.id);
    if (it == cands.end()) {
      err << "no candidates for task " << t.id << "\n";
      continue;
    }
    std::vector<std::string> completions;
    for (const auto& c : it->second) completions.push_back(c.completion);
    results.push_back(run_task(t, completions, tc, workers));
  }
  for (const auto& [id, v] : cands)
    if (std::none_of(tasks.begin(), tasks.end(), [&](const BenchTask& t) { return t.id == id; }))
      err << "candidates for unknown task " << id << "\n";
  if (results.empty()) throw Error(ErrorCode::MixedN, "no task has candidates");
  int n = results[0].n;
  std::vector<int> used;
  for (int k : ks) {
    if (k <= n) used.push_back(k);
    else err << "skipping pass@" << k << ": only " << n << " candidates per task\n";
  }
  auto report = aggregate(results, used);
  report.metadata["layout"] = layout;
  report.metadata["tasks"] = results.size();
  report.metadata["temperature"] = config.get("llm.temperature");
  report.metadata["model"] = config.get("llm.model");
  Json j = report.to_json();
  j["_meta"] = meta_line("eval", config)["_meta"];
  emit(out_path, j.dump(2) + "\n", out);
  if (!csv_path.empty()) write_file(csv_path, report.to_csv());
  return 0;
}

void setup_logging(bool verbose) {
  static std::shared_ptr<spdlog::logger> logger = [] {
    auto l = std::make_shared<spdlog::logger>("haven", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    l->set_pattern("[%l] %v");
    return l;
  }();
  spdlog::set_default_logger(logger);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"HaVen dataset and evaluation tools", "haven"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--set", g.sets, "Override a configuration key (key=value); repeatable");
  app.add_option("--seed", g.seed, "Run seed (overrides config 'seed')");
  app.add_option("--workers", g.workers, "Parallel workers (overrides config 'workers')")->check(CLI::PositiveNumber);
  app.add_option("--mock-llm", g.mock_llm, "Answer LLM requests from this fixtures JSON instead of the network")
      ->check(CLI::ExistingFile);
  app.add_flag("-v,--verbose", g.verbose, "Debug logging on stderr");

  std::string in, out_path = "-", policy = "deterministic";
  bool passthrough = false;
  auto* sicot = app.add_subcommand("sicot", "Turn prompts into SI-CoT prompts");
  sicot->add_option("--in", in, "Prompts, JSON Lines with a 'prompt' field")->required();
  sicot->add_option("--out", out_path, "Output JSON Lines ('-' for stdout)");
  sicot->add_option("--policy", policy, "deterministic | llm-state-diagrams | llm-fallback");
  sicot->add_flag("--passthrough", passthrough, "Keep uninterpretable blocks verbatim instead of failing");

  std::string corpus, exemplars;
  auto* genk = app.add_subcommand("gen-k", "Build the knowledge-enhanced dataset");
  genk->add_option("--corpus", corpus, "Directory of .v files")->required()->check(CLI::ExistingDirectory);
  genk->add_option("--exemplars", exemplars, "Exemplar directory (*.jsonl)")->required()->check(CLI::ExistingDirectory);
  genk->add_option("--out", out_path, "Output JSON Lines ('-' for stdout)");

  GenLArgs la;
  auto* genl = app.add_subcommand("gen-l", "Build the logic-enhanced dataset");
  genl->add_option("--count", la.count, "Number of pairs");
  genl->add_option("--n-min", la.n_min, "Minimum number of inputs")->check(CLI::Range(2, 6));
  genl->add_option("--n-max", la.n_max, "Maximum number of inputs")->check(CLI::Range(2, 6));
  genl->add_option("--dc-fraction", la.dc_fraction, "Probability that a row is a don't-care")->check(CLI::Range(0.0, 0.999999));
  genl->add_option("--out", out_path, "Output JSON Lines ('-' for stdout); writes <out>.meta.json alongside");
  genl->add_flag("--evolve", la.evolve, "Rephrase instructions with the evolver LLM");
  genl->add_option("--max-word-delta", la.max_word_delta, "Word budget for evolved instructions");
  genl->add_option("--max-retries", la.max_retries, "Extra evolver attempts");
  genl->add_flag("--no-verify", la.no_verify, "Skip compile verification");
  genl->add_flag("--simulate", la.simulate, "Also run each pair's testbench with sim.cmd");

  std::string tasks, candidates, csv, layout = "verilogeval";
  std::vector<int> ks{1, 5};
  auto* ev = app.add_subcommand("eval", "Score candidate completions with pass@k");
  ev->add_option("--tasks", tasks, "Task directory")->required()->check(CLI::ExistingDirectory);
  ev->add_option("--candidates", candidates, "Candidates JSON Lines")->required()->check(CLI::ExistingFile);
  ev->add_option("--out", out_path, "Report JSON ('-' for stdout)");
  ev->add_option("--csv", csv, "Optional CSV summary");
  ev->add_option("--k", ks, "Values of k")->check(CLI::PositiveNumber);
  ev->add_option("--layout", layout, "verilogeval | rtllm")->check(CLI::IsMember({"verilogeval", "rtllm"}));

  std::string file;
  auto* an = app.add_subcommand("analyze", "Print the topic profile of a Verilog file");
  an->add_option("file", file, "Verilog source")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  setup_logging(g.verbose);

  try {
    Config config;
    if (!g.config_path.empty()) config.load_file(g.config_path);
    for (const auto& s : g.sets) config.set_assignment(s);
    if (g.seed) config.set("seed", std::to_string(*g.seed));
    if (g.workers) config.set("workers", std::to_string(*g.workers));

    if (*sicot) return cmd_sicot(config, g, in, out_path, policy, passthrough, out);
    if (*genk) return cmd_gen_k(config, g, corpus, exemplars, out_path, out, err);
    if (*genl) {
      if (la.n_min > la.n_max) throw Error(ErrorCode::ConfigError, "--n-min must not exceed --n-max");
      return cmd_gen_l(config, g, la, out_path, out, err);
    }
    if (*ev) return cmd_eval(config, tasks, candidates, out_path, csv, ks, layout, out, err);
    if (*an) {
      out << analyze(read_file(file)).to_json().dump(2) << "\n";
      return 0;
    }
  } catch (const Error& e) {
    err << "haven: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "haven: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace haven
