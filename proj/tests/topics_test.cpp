#include <gtest/gtest.h>

#include "haven/error.hpp"
#include "haven/toolchain.hpp"
#include "haven/topics.hpp"
#include "support.hpp"

using namespace haven;

namespace {

bool has_topic(const TopicProfile& p, Topic t) { return p.topics.count(t) != 0; }
bool has_attr(const TopicProfile& p, Attribute a) { return p.attributes.count(a) != 0; }

TEST(Topics, SyncResetCounter) {
  auto p = analyze("module c(input clk, input rst_n, output reg [7:0] q);\n"
                   "always @(posedge clk) begin if (!rst_n) q<=0; else q<=q+1; end\nendmodule\n");
  EXPECT_EQ(p.topics, (std::set<Topic>{Topic::Counter}));
  EXPECT_TRUE(has_attr(p, Attribute::SyncReset));
  EXPECT_TRUE(has_attr(p, Attribute::PosEdge));
  EXPECT_FALSE(has_attr(p, Attribute::AsyncReset));
}

TEST(Topics, AsyncResetFsm) {
  auto p = analyze(R"(
module f(input clk, input rst, input x, output y);
  localparam A = 1'b0, B = 1'b1;
  reg state, next_state;
  always @(posedge clk or posedge rst) if (rst) state <= A; else state <= next_state;
  always @(*) case (state) A: next_state = x ? B : A; B: next_state = A; endcase
  assign y = state;
endmodule
)");
  EXPECT_TRUE(has_topic(p, Topic::Fsm));
  EXPECT_TRUE(has_attr(p, Attribute::AsyncReset));
  EXPECT_FALSE(has_attr(p, Attribute::SyncReset));
}

TEST(Topics, CombinationalIsOther) {
  auto p = analyze("module m(input a, input b, output y);\n  assign y = a & b;\nendmodule\n");
  EXPECT_EQ(p.topics, (std::set<Topic>{Topic::Other}));
  EXPECT_TRUE(p.tags().empty());
}

TEST(Topics, CommentsAndDirectivesIgnored) {
  auto p = analyze("`timescale 1ns/1ps\n// q <= q + 1 in a comment\nmodule m(input a, output y);\n"
                   "/* always @(posedge clk) q <= {q[6:0], d}; */\n  assign y = a;\nendmodule\n");
  EXPECT_EQ(p.topics, (std::set<Topic>{Topic::Other}));
}

TEST(Topics, TokenizeErrorSurfaces) {
  try {
    analyze("module m; initial $display(\"unterminated); endmodule\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TokenizeError);
  }
}

TEST(Topics, EvidenceLinesInRange) {
  for (const auto& entry : std::filesystem::directory_iterator(test::data_dir() / "topics" / "snippets")) {
    std::string src = read_file(entry.path());
    int lines = static_cast<int>(std::count(src.begin(), src.end(), '\n')) + 1;
    auto p = analyze(src);
    for (const auto& e : p.evidence) {
      EXPECT_GE(e.line, 1) << entry.path();
      EXPECT_LE(e.line, lines) << entry.path();
    }
  }
}

TEST(Topics, Deterministic) {
  std::string src = read_file(test::data_dir() / "topics" / "snippets" / "fsm_traffic.v");
  auto a = analyze(src).to_json();
  auto b = analyze(src).to_json();
  EXPECT_EQ(a, b);
}

TEST(Topics, LabeledCorpusMeetsThreshold) {
  std::vector<std::string> misses;
  int count = 0;
  auto scores = test::score_labels(test::data_dir() / "topics" / "snippets", test::data_dir() / "topics" / "labels.jsonl",
                                   &misses, &count);
  EXPECT_GE(count, 60);
  for (const char* t : {"Fsm", "Counter", "ShiftRegister", "ClockDivider", "Alu"}) {
    EXPECT_GE(scores[t].tp + scores[t].fn, 10) << t;
    EXPECT_GE(scores[t].precision(), 0.9) << t;
    EXPECT_GE(scores[t].recall(), 0.9) << t;
  }
  for (const auto& m : misses) std::cout << "  " << m << "\n";
}

// ---- exemplar store ---------------------------------------------------------

Exemplar ex(const std::string& id, const std::string& topic) { return Exemplar{id, topic, "x", "", ExemplarSource::Manual}; }

TEST(Exemplars, MatchOrdersByCountThenId) {
  ExemplarStore store;
  store.add(ex("c2", "Fsm"));
  store.add(ex("c1", "Fsm"));
  store.add(ex("k1", "Counter"));
  store.add(ex("m1", "Fsm,AsyncReset"));
  TopicProfile p;
  p.topics = {Topic::Fsm};
  p.attributes = {Attribute::AsyncReset};
  auto m = match_exemplars(p, store);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[0].id, "m1");
  EXPECT_EQ(m[1].id, "c1");
  EXPECT_EQ(m[2].id, "c2");
}

TEST(Exemplars, OtherMatchesNothing) {
  ExemplarStore store;
  store.add(ex("a", "Fsm"));
  TopicProfile p;
  p.topics = {Topic::Other};
  EXPECT_TRUE(match_exemplars(p, store).empty());
}

TEST(Exemplars, AttributeTagsMatch) {
  ExemplarStore store;
  store.add(ex("s", "SyncReset"));
  TopicProfile p;
  p.topics = {Topic::Counter};
  p.attributes = {Attribute::SyncReset};
  ASSERT_EQ(match_exemplars(p, store).size(), 1u);
}

TEST(Exemplars, CommittedStoreLoadsAndCoversEveryTag) {
  Toolchain tc(test::tool_config());
  auto store = ExemplarStore::load(test::data_dir() / "exemplars", [&](const std::string& c) { return tc.compile(c); });
  std::map<std::string, int> per_tag;
  for (const auto& e : store.all()) {
    std::stringstream ss(e.topic);
    std::string tag;
    while (std::getline(ss, tag, ',')) ++per_tag[trim(tag)];
  }
  for (const char* tag : {"Fsm", "Counter", "ShiftRegister", "ClockDivider", "Alu", "SyncReset", "AsyncReset", "PosEdge",
                          "NegEdge", "ActiveHighEnable", "ActiveLowEnable"})
    EXPECT_GE(per_tag[tag], 2) << tag;
}

TEST(Exemplars, InvalidStoreRejected) {
  test::ScratchDir dir("exemplars");
  auto accept = [](const std::string&) { return VerificationResult{true, "", 0}; };
  write_file(dir / "a.jsonl", R"({"id":"x","topic":"Blinker","instruction":"module m;","code":"module m; endmodule"})" "\n");
  try {
    ExemplarStore::load(dir.path(), accept);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CorpusInvalid);
    EXPECT_NE(e.message().find("Blinker"), std::string::npos);
  }
  write_file(dir / "a.jsonl", R"({"id":"x","topic":"Fsm","instruction":"no header","code":"module m; endmodule"})" "\n");
  EXPECT_THROW(ExemplarStore::load(dir.path(), accept), Error);
  write_file(dir / "a.jsonl", R"({"id":"x","topic":"Fsm","instruction":"module m;","code":"module m; endmodule"})" "\n" +
                                  std::string(R"({"id":"x","topic":"Alu","instruction":"module m;","code":"module m; endmodule"})") + "\n");
  EXPECT_THROW(ExemplarStore::load(dir.path(), accept), Error);
  write_file(dir / "a.jsonl", R"({"id":"x","topic":"Fsm","instruction":"module m;","code":"def m"})" "\n");
  Toolchain tc(test::tool_config());
  EXPECT_THROW(ExemplarStore::load(dir.path(), [&](const std::string& c) { return tc.compile(c); }), Error);
}

}  // namespace
