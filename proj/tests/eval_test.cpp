#include <gtest/gtest.h>

#include "haven/error.hpp"
#include "haven/eval.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace haven;

namespace {

using test::brute_pass_at_k;

TEST(PassAtK, MatchesBruteForce) {
  for (int n = 1; n <= 12; ++n)
    for (int c = 0; c <= n; ++c)
      for (int k = 1; k <= n; ++k) ASSERT_NEAR(pass_at_k(n, c, k), brute_pass_at_k(n, c, k), 1e-12) << n << " " << c << " " << k;
}

TEST(PassAtK, SpotValues) {
  EXPECT_DOUBLE_EQ(pass_at_k(10, 10, 1), 1.0);
  EXPECT_DOUBLE_EQ(pass_at_k(10, 0, 5), 0.0);
  EXPECT_NEAR(pass_at_k(10, 3, 5), 11.0 / 12.0, 1e-12);
  EXPECT_NEAR(pass_at_k(10, 3, 1), 0.3, 1e-12);
}

TEST(PassAtK, MonotoneAndBounded) {
  for (int n = 1; n <= 20; ++n)
    for (int c = 0; c <= n; ++c)
      for (int k = 1; k <= n; ++k) {
        double v = pass_at_k(n, c, k);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        if (k > 1) {
          EXPECT_GE(v + 1e-15, pass_at_k(n, c, k - 1));
        }
        if (c > 0) {
          EXPECT_GE(v + 1e-15, pass_at_k(n, c - 1, k));
        }
        if (n - c < k) {
          EXPECT_EQ(v, 1.0);
        }
      }
  // Large n stays finite.
  EXPECT_NEAR(pass_at_k(200, 1, 1), 1.0 / 200, 1e-12);
}

TEST(PassAtK, InvalidCounts) {
  for (auto [n, c, k] : std::vector<std::tuple<int, int, int>>{{5, 6, 1}, {5, -1, 1}, {5, 2, 0}, {5, 2, 6}, {0, 0, 1}}) {
    try {
      pass_at_k(n, c, k);
      FAIL() << n << c << k;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidCounts);
    }
  }
}

TEST(Aggregate, MeanOverTasks) {
  std::vector<TaskResult> rs{{"a", 4, 1, {}}, {"b", 4, 4, {}}, {"c", 4, 0, {}}};
  auto rep = aggregate(rs, {1, 2});
  EXPECT_NEAR(rep.mean[1], (0.25 + 1.0 + 0.0) / 3, 1e-12);
  EXPECT_NEAR(rep.mean[2], (0.5 + 1.0 + 0.0) / 3, 1e-12);
  auto j = rep.to_json();
  EXPECT_TRUE(j.contains("pass@1"));
  EXPECT_EQ(j["tasks"].size(), 3u);
  EXPECT_NE(rep.to_csv().find("task_id,n,c,pass@1,pass@2"), std::string::npos);
}

TEST(Aggregate, MixedNRejected) {
  try {
    aggregate({{"a", 4, 1, {}}, {"b", 5, 1, {}}}, {1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MixedN);
  }
  EXPECT_THROW(aggregate({}, {1}), Error);
}

TEST(Normalize, FencesAndHeader) {
  std::string prompt = "Do it.\nmodule top_module(input a, output y);\n";
  EXPECT_EQ(normalize_completion("```verilog\nmodule m; endmodule\n```", prompt), "module m; endmodule\n");
  auto cont = normalize_completion("  assign y = a;\nendmodule\n", prompt);
  EXPECT_EQ(cont.rfind("module top_module(input a, output y);", 0), 0u) << cont;
}

const BenchTask& find_task(const std::vector<BenchTask>& ts, const std::string& id) {
  for (const auto& t : ts)
    if (t.id == id) return t;
  throw std::runtime_error("missing task " + id);
}

TEST(RunTask, BundledTasks) {
  Toolchain tc(test::tool_config());
  auto tasks = load_verilogeval_tasks(test::data_dir() / "bench" / "verilogeval");
  ASSERT_EQ(tasks.size(), 3u);
  auto cands = load_candidates(test::data_dir() / "bench" / "candidates.jsonl");
  std::map<std::string, int> expected{{"and2", 2}, {"mux2", 1}, {"count4", 2}};
  for (const auto& t : tasks) {
    EXPECT_EQ(t.kind, TaskKind::Functional);
    std::vector<std::string> texts;
    for (const auto& c : cands.at(t.id)) texts.push_back(c.completion);
    auto r = run_task(t, texts, tc);
    EXPECT_EQ(r.c, expected[t.id]) << t.id;
    for (size_t i = 0; i < r.candidates.size(); ++i) EXPECT_EQ(r.candidates[i].trial_index, static_cast<int>(i));
  }
}

TEST(RunTask, OrderInsensitiveCount) {
  Toolchain tc(test::tool_config());
  auto tasks = load_verilogeval_tasks(test::data_dir() / "bench" / "verilogeval");
  const auto& t = find_task(tasks, "and2");
  std::vector<std::string> texts{"module top_module(input a, input b, output out); assign out = a | b; endmodule",
                                 "module top_module(input a, input b, output out); assign out = a & b; endmodule",
                                 "def f(): pass"};
  int c0 = run_task(t, texts, tc).c;
  std::reverse(texts.begin(), texts.end());
  EXPECT_EQ(run_task(t, texts, tc, 2).c, c0);
  EXPECT_EQ(c0, 1);
}

TEST(RunTask, SyntaxOnlyCountsCompiles) {
  Toolchain tc(test::tool_config());
  BenchTask t{"s", "module top_module(input a, output y);", "", "", TaskKind::SyntaxOnly};
  auto r = run_task(t, {"assign y = a;\nendmodule", "assign y = ;\nendmodule"}, tc);
  EXPECT_EQ(r.c, 1);
  EXPECT_FALSE(r.candidates[1].compiled);
}

TEST(Loaders, Rtllm) {
  test::ScratchDir dir("rtllm");
  std::filesystem::create_directories(dir / "adder");
  write_file(dir / "adder" / "design_description.txt", "Add.\nmodule adder(input a, output y);");
  write_file(dir / "adder" / "testbench.v", "module tb; endmodule");
  std::filesystem::create_directories(dir / "notes");
  auto ts = load_rtllm_tasks(dir.path());
  ASSERT_EQ(ts.size(), 1u);
  EXPECT_EQ(ts[0].id, "adder");
  EXPECT_EQ(ts[0].kind, TaskKind::Functional);
  EXPECT_THROW(load_rtllm_tasks(dir / "missing"), Error);
}

TEST(Loaders, CandidatesSortedByTrial) {
  test::ScratchDir dir("cands");
  write_file(dir / "c.jsonl", "{\"task_id\":\"t\",\"trial_index\":2,\"completion\":\"b\"}\n"
                              "{\"task_id\":\"t\",\"trial_index\":0,\"completion\":\"a\"}\n");
  auto c = load_candidates(dir / "c.jsonl");
  ASSERT_EQ(c["t"].size(), 2u);
  EXPECT_EQ(c["t"][0].completion, "a");
  write_file(dir / "bad.jsonl", "{\"task_id\":\"t\"}\n");
  EXPECT_THROW(load_candidates(dir / "bad.jsonl"), Error);
}

}  // namespace
