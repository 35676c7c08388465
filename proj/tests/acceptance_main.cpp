// Acceptance checks: one PASS/FAIL line per criterion, each with a pinned
// tolerance and wall-clock limit. Exit status 1 when any criterion fails.
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "haven/error.hpp"
#include "haven/eval.hpp"
#include "haven/kdataset.hpp"
#include "haven/ldataset.hpp"
#include "haven/llm.hpp"
#include "haven/sicot.hpp"
#include "haven/symbolic.hpp"
#include "haven/taxonomy.hpp"
#include "haven/topics.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace haven;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Collects the first few failure messages.
class Checker {
 public:
  void expect(bool cond, const std::string& what) {
    if (cond) return;
    ++failures_;
    if (failures_ <= 3) first_ += (first_.empty() ? "" : "; ") + what;
  }
  Outcome outcome(const std::string& summary) const {
    if (failures_ == 0) return {true, summary};
    return {false, summary + "; " + std::to_string(failures_) + " failure(s): " + first_};
  }

 private:
  int failures_ = 0;
  std::string first_;
};

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

std::string fixed(double v, int digits = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

// ---- 1 --------------------------------------------------------------------------

Outcome pass_at_k_exact() {
  Checker ck;
  double worst = 0;
  int cases = 0;
  for (int n = 1; n <= 12; ++n)
    for (int c = 0; c <= n; ++c)
      for (int k = 1; k <= n; ++k) {
        double diff = std::fabs(pass_at_k(n, c, k) - test::brute_pass_at_k(n, c, k));
        worst = std::max(worst, diff);
        ++cases;
        ck.expect(diff <= 1e-12, "n=" + std::to_string(n) + " c=" + std::to_string(c) + " k=" + std::to_string(k));
      }
  ck.expect(pass_at_k(10, 10, 1) == 1.0, "pass@1(10,10) != 1");
  ck.expect(pass_at_k(10, 0, 5) == 0.0, "pass@5(10,0) != 0");
  ck.expect(std::fabs(pass_at_k(10, 3, 5) - 11.0 / 12.0) <= 1e-12, "pass@5(10,3) != 11/12");
  std::ostringstream s;
  s << cases << " (n,c,k) vs subset enumeration, max |diff|=" << worst << " tol=1e-12";
  return ck.outcome(s.str());
}

// ---- 2 --------------------------------------------------------------------------

Outcome sicot_phrasing() {
  Checker ck;
  auto check = [&](const std::string& prompt, const std::vector<std::string>& phrases) {
    auto text = interpret(prompt, nullptr).final_text;
    for (const auto& p : phrases) ck.expect(contains(text, p), "missing '" + p + "'");
  };
  check("Implement this FSM.\nA[out=0]--[x=0]->B\nA[out=0]--[x=1]->A\nB[out=1]--[x=0]->A\nB[out=1]--[x=1]->B\n",
        {"States&Outputs: 1. state A(out=0); 2. state B(out=1)", "From state A: If x = 0, then transit to state B",
         "module top_module(input clk, input reset, input x, output out);"});
  check("Implement:\na | b | out\n0 | 0 | 0\n0 | 1 | 0\n1 | 0 | 0\n1 | 1 | 1\n",
        {"Variables: 1. a(input); 2. b(input); 3. out(output)", "If a=1, b=1, then out =1"});
  check("Implement:\n    a: 0 1\n    b: 1 0\n    out: 1 0\ntime(ns): 0 10\n",
        {"When time is 0ns, a=0, b=1, out=1", "When time is 10ns, a=1, b=0, out=0"});
  check("Implement:\n    a: 0 1\n    out: 1 0\n", {"At step 1", "At step 2"});
  check("Implement:\na | b | out\n0 | 0 | X\n1 | 1 | 1\n", {"If a=0, b=0, then out can be any value"});
  check("Implement:\nA[y=0]--[1]->B\nB[y=1]--[go=1]->A\nB[y=1]--[go=0]->B\n", {"From state A: Always transit to state B"});
  std::string nl = "Implement an AND gate.\nmodule top_module(input a, input b, output out);";
  ck.expect(interpret(nl, nullptr).final_text == nl, "natural-language prompt changed");
  return ck.outcome("6 golden prompts, exact substrings");
}

// ---- 3 --------------------------------------------------------------------------

Outcome round_trip() {
  Checker ck;
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    auto t = test::random_table(rng);
    ck.expect(parse_truth_table(format_truth_table(t)) == t, "table " + std::to_string(i));
  }
  std::mt19937_64 wrng(12);
  for (int i = 0; i < 500; ++i) {
    auto w = test::random_wave(wrng);
    ck.expect(parse_waveform(format_waveform(w)) == w, "waveform " + std::to_string(i));
  }
  return ck.outcome("1000 truth tables (2..4 inputs), 500 waveforms, exact equality");
}

// ---- 4 --------------------------------------------------------------------------

Outcome minimization() {
  Checker ck;
  for (int f = 0; f < 256; ++f) {
    std::vector<Bit> outs;
    uint32_t on = 0, off = 0;
    for (int m = 0; m < 8; ++m) {
      bool one = (f >> m) & 1;
      outs.push_back(one ? Bit::One : Bit::Zero);
      (one ? on : off) |= 1u << m;
    }
    auto cubes = minimize_sop_cubes(test::table_from_bits(3, outs));
    ck.expect(test::cover_mask(cubes) == on, "function " + std::to_string(f) + " not equivalent");
    ck.expect(test::cover_cost(cubes).first == test::min_sop_cost(3, on, off).first,
              "function " + std::to_string(f) + " not minimal");
  }
  for (uint64_t seed = 0; seed < 1000; ++seed) {
    auto t = gen_random_truth_table(4, seed % 3 == 0 ? 0.25 : 0.0, seed);
    auto expr = minimize_sop(t);
    for (const auto& row : t.rows) {
      if (row.out[0] == Bit::DontCare) continue;
      std::map<std::string, bool> env;
      for (size_t i = 0; i < t.inputs.size(); ++i) env[t.inputs[i]] = row.in[i] == Bit::One;
      if (eval_expression(expr, env) != (row.out[0] == Bit::One)) {
        ck.expect(false, "4-input seed " + std::to_string(seed));
        break;
      }
    }
  }
  return ck.outcome("256 three-input functions at oracle literal count, 1000 four-input tables equivalent");
}

// ---- 5 --------------------------------------------------------------------------

Outcome k_pipeline() {
  Checker ck;
  Toolchain tc(test::tool_config());
  auto store = ExemplarStore::load(test::data_dir() / "exemplars", [&](const std::string& c) { return tc.compile(c); });
  auto corpus = load_corpus_dir(test::data_dir() / "kcorpus");
  auto llm = MockLlmClient::from_file(test::data_dir() / "fixtures" / "mock_llm.json");
  auto a = run_k_pipeline(corpus, store, *llm, tc);
  auto b = run_k_pipeline(corpus, store, *llm, tc, 4);
  std::string da, db;
  for (const auto& r : a.records) da += to_jsonl_line(r.to_json());
  for (const auto& r : b.records) db += to_jsonl_line(r.to_json());
  ck.expect(da == db, "rerun differs");
  std::map<std::string, size_t> fanout;
  for (const auto& r : a.records) {
    ck.expect(tc.compile(r.code).ok, r.id + " does not compile");
    if (r.stage == Stage::KnowledgeAugmented) ++fanout[r.id.substr(0, r.id.find('+'))];
  }
  size_t matched = 0;
  for (const auto& f : corpus) {
    size_t m = match_exemplars(analyze(f.code), store).size();
    matched += m;
    ck.expect(fanout["k-" + f.name] == m, f.name + " fan-out " + std::to_string(fanout["k-" + f.name]) + " != " +
                                              std::to_string(m));
  }
  ck.expect(a.stats.matched == matched, "matched count mismatch");
  return ck.outcome(std::to_string(corpus.size()) + " files, " + std::to_string(a.records.size()) + " records (" +
                    std::to_string(a.stats.vanilla) + " vanilla + " + std::to_string(a.stats.augmented) +
                    " augmented), byte-identical rerun");
}

// ---- 6 --------------------------------------------------------------------------

Outcome topic_detector() {
  Checker ck;
  auto dir = test::data_dir() / "topics";
  int n_in = 0, n_out = 0;
  std::vector<std::string> misses;
  auto in = test::score_labels(dir / "snippets", dir / "labels.jsonl", &misses, &n_in);
  auto out = test::score_labels(dir / "holdout", dir / "holdout_labels.jsonl", &misses, &n_out);
  std::string summary = std::to_string(n_in + n_out) + " snippets (" + std::to_string(n_in) + " tuned + " +
                        std::to_string(n_out) + " held out), tol P,R >= 0.9:";
  ck.expect(n_in + n_out >= 60, "fewer than 60 snippets");
  for (const char* t : {"Fsm", "Counter", "ShiftRegister", "ClockDivider", "Alu"}) {
    test::LabelScore all{in[t].tp + out[t].tp, in[t].fp + out[t].fp, in[t].fn + out[t].fn};
    summary += std::string(" ") + t + " P=" + fixed(all.precision()) + " R=" + fixed(all.recall()) + " [held-out P=" +
               fixed(out[t].precision()) + " R=" + fixed(out[t].recall()) + "]";
    ck.expect(all.precision() >= 0.9 && all.recall() >= 0.9, std::string(t) + " below 0.9");
  }
  for (const auto& m : misses) summary += "; " + m;
  return ck.outcome(summary);
}

// ---- 7 --------------------------------------------------------------------------

class PaddingEvolver : public LlmClient {
 public:
  explicit PaddingEvolver(int extra) : extra_(extra) {}
  CompletionResult complete(const CompletionRequest& r) override {
    CompletionResult out;
    out.text = r.substitutions.at("instruction");
    for (int i = 0; i < extra_; ++i) out.text += " extra" + std::to_string(i);
    return out;
  }

 private:
  int extra_;
};

Outcome word_delta() {
  Checker ck;
  const std::string ins = "Implement a module that drives out high when a and b are both high.";
  for (int d : {0, 10, 11}) {
    PaddingEvolver ev(d);
    auto r = evolve_instruction(ins, ev);
    bool want = d <= 10;
    ck.expect(r.accepted == want, "delta " + std::to_string(d) + (want ? " rejected" : " accepted"));
    if (!want) ck.expect(r.text == ins, "rejected evolution did not keep the original");
  }
  std::mt19937_64 rng(21);
  for (int k = 0; k < 2000; ++k) {
    auto a = test::random_words(rng), b = test::random_words(rng);
    int got = check_word_delta(test::join_words(a), test::join_words(b));
    ck.expect(got == test::brute_word_delta(a, b), "'" + test::join_words(a) + "' vs '" + test::join_words(b) + "'");
  }
  return ck.outcome("deltas {0,10,11} -> accept,accept,reject; 2000 pairs of <=8 words vs exhaustive alignment");
}

// ---- 8 --------------------------------------------------------------------------

Outcome taxonomy_self_check() {
  Checker ck;
  Toolchain tc(test::tool_config());
  auto cases = load_corpus(test::data_dir() / "taxonomy" / "corpus.jsonl");
  std::set<Subtype> covered;
  bool saw_def = false;
  for (const auto& c : cases) {
    covered.insert(c.label.subtype);
    auto r = check_case(c, tc);
    ck.expect(r.rejected, c.id + " passes its check");
    ck.expect(r.kind == designated_check(c.label.subtype), c.id + " checked the wrong way");
    if (r.fixed_passes) ck.expect(*r.fixed_passes, c.id + " fixed code fails");
    if (contains(c.incorrect_code, "def adder_4bit")) {
      saw_def = true;
      ck.expect(r.kind == CheckKind::Compile && r.rejected, "def adder_4bit compiles");
    }
  }
  ck.expect(covered.size() == 9, "sub-type coverage " + std::to_string(covered.size()) + "/9");
  ck.expect(saw_def, "no def adder_4bit case");
  return ck.outcome(std::to_string(cases.size()) + " cases, each rejected by its designated check");
}

// ---- 9 --------------------------------------------------------------------------

Outcome l_dataset() {
  Checker ck;
  Toolchain tc(test::tool_config());
  LDatasetParams p;
  p.count = 50;
  p.seed = 2024;
  p.n_min = 2;
  p.n_max = 4;
  p.dont_care_fraction = 0.1;
  auto items = generate_l_dataset(p, nullptr);
  int compiled = 0, clean = 0;
  for (const auto& it : items) {
    bool ok = tc.compile(it.pair.code).ok;
    compiled += ok;
    ck.expect(ok, it.pair.id + " does not compile");
    if (!ok) continue;
    auto s = tc.simulate(it.testbench, "", it.pair.code);
    bool mismatch = contains(s.output, "MISMATCH") || !s.pass;
    clean += !mismatch;
    ck.expect(!mismatch, it.pair.id + " testbench mismatches");
  }
  return ck.outcome(std::to_string(items.size()) + " pairs, " + std::to_string(compiled) + " compile, " +
                    std::to_string(clean) + " with zero mismatches");
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  spdlog::set_default_logger(spdlog::stderr_color_mt("acceptance"));
  spdlog::set_level(spdlog::level::warn);
  std::vector<Criterion> criteria{
      {1, "pass@k matches subset enumeration", 1.0, pass_at_k_exact},
      {2, "SI-CoT golden phrasings", 1.0, sicot_phrasing},
      {3, "symbolic round-trip", 10.0, round_trip},
      {4, "SOP minimization", 60.0, minimization},
      {5, "K-dataset pipeline", 60.0, k_pipeline},
      {6, "topic detector precision/recall", 5.0, topic_detector},
      {7, "word-delta gate", 5.0, word_delta},
      {8, "taxonomy self-check", 30.0, taxonomy_self_check},
      {9, "L-dataset compiles and simulates", 120.0, l_dataset},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = o.ok && secs <= c.limit_s;
    if (o.ok && !ok) o.detail += "; over time limit";
    failed += !ok;
    std::cout << (ok ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << " (" << fixed(secs) << "s / limit "
              << fixed(c.limit_s, 0) << "s): " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
