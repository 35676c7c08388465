#include <gtest/gtest.h>

#include "haven/util.hpp"
#include "support.hpp"

using namespace haven;

namespace {

std::vector<std::string> with_tools(std::vector<std::string> args) {
  auto cfg = test::tool_config();
  args.insert(args.begin(), {"--set", "compiler.cmd=" + cfg.get("compiler.cmd"), "--set", "sim.cmd=" + cfg.get("sim.cmd")});
  return args;
}

std::vector<Json> lines(const std::string& text) {
  std::vector<Json> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line))
    if (!trim(line).empty()) out.push_back(Json::parse(line));
  return out;
}

TEST(Cli, GenLIsDeterministic) {
  auto args = with_tools({"--seed", "7", "gen-l", "--count", "4", "--n-min", "2", "--n-max", "2", "--out", "-"});
  auto a = test::run_haven(args);
  auto b = test::run_haven(args);
  ASSERT_EQ(a.exit_code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  auto ls = lines(a.out);
  ASSERT_EQ(ls.size(), 5u);
  EXPECT_EQ(ls[0]["_meta"]["command"], "gen-l");
  EXPECT_EQ(ls[0]["_meta"]["seed"], 7);
  for (size_t i = 1; i < ls.size(); ++i) {
    EXPECT_EQ(ls[i]["verify"], "CompileOk");
    EXPECT_EQ(ls[i]["n_inputs"], 2);
  }
  auto c = test::run_haven(with_tools({"--seed", "8", "gen-l", "--count", "4", "--n-min", "2", "--n-max", "2", "--out", "-"}));
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, GenLWritesMetaFile) {
  test::ScratchDir dir("cli");
  auto r = test::run_haven(with_tools({"gen-l", "--count", "2", "--simulate", "--out", (dir / "l.jsonl").string()}));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto meta = Json::parse(read_file(dir / "l.jsonl.meta.json"));
  EXPECT_EQ(meta["count"], 2);
  EXPECT_EQ(meta["item_seeds"].size(), 2u);
}

TEST(Cli, GenKEmitsCompileOkRecords) {
  auto r = test::run_haven(with_tools({"--mock-llm", (test::data_dir() / "fixtures" / "mock_llm.json").string(), "gen-k",
                                       "--corpus", (test::data_dir() / "kcorpus").string(), "--exemplars",
                                       (test::data_dir() / "exemplars").string(), "--out", "-"}));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto ls = lines(r.out);
  ASSERT_GT(ls.size(), 20u);
  EXPECT_EQ(ls[0]["_meta"]["command"], "gen-k");
  for (size_t i = 1; i < ls.size(); ++i) EXPECT_EQ(ls[i]["verify"], "CompileOk");
  EXPECT_NE(r.err.find("files=20"), std::string::npos) << r.err;
}

TEST(Cli, EvalReportsPassAtK) {
  auto r = test::run_haven(with_tools({"eval", "--tasks", (test::data_dir() / "bench" / "verilogeval").string(),
                                       "--candidates", (test::data_dir() / "bench" / "candidates.jsonl").string(),
                                       "--k", "1", "--k", "5", "--out", "-"}));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto j = Json::parse(r.out);
  EXPECT_NEAR(j["pass@1"].get<double>(), 5.0 / 9.0, 1e-9);
  // Only three candidates per task, so k=5 is skipped with a note.
  EXPECT_FALSE(j.contains("pass@5"));
  EXPECT_NE(r.err.find("pass@5"), std::string::npos);
  EXPECT_EQ(j["_meta"]["command"], "eval");
}

TEST(Cli, SicotFromJsonl) {
  test::ScratchDir dir("cli");
  write_file(dir / "p.jsonl", to_jsonl_line(Json{{"prompt", "Build it.\na | b | out\n0 | 0 | 1\n1 | 1 | 0\n"}}));
  auto r = test::run_haven({"sicot", "--in", (dir / "p.jsonl").string(), "--out", "-"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_NE(ls[1].dump().find("If a=0, b=0, then out =1"), std::string::npos) << ls[1].dump();
}

TEST(Cli, AnalyzePrintsProfile) {
  auto r = test::run_haven({"analyze", (test::data_dir() / "kcorpus" / "counter8.v").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("Counter"), std::string::npos);
}

TEST(Cli, BadArgumentsFail) {
  EXPECT_NE(test::run_haven({"gen-l", "--bogus"}).exit_code, 0);
  EXPECT_NE(test::run_haven({"gen-l", "--n-min", "4", "--n-max", "3", "--out", "-"}).exit_code, 0);
  EXPECT_NE(test::run_haven({"eval", "--tasks", "/nonexistent", "--candidates", "/nonexistent"}).exit_code, 0);
  EXPECT_NE(test::run_haven({}).exit_code, 0);
}

TEST(Cli, MissingCompilerIsReported) {
  auto r = test::run_haven({"--set", "compiler.cmd=/no/such/compiler {src}", "gen-l", "--count", "1", "--out", "-"});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("CompilerNotFound"), std::string::npos) << r.err;
}

}  // namespace
