#include <gtest/gtest.h>

#include "haven/error.hpp"
#include "haven/llm.hpp"
#include "haven/sicot.hpp"

using namespace haven;

namespace {

const std::string kFsmPrompt =
    "Implement this FSM.\n"
    "A[out=0]--[x=0]->B\n"
    "A[out=0]--[x=1]->A\n"
    "B[out=1]--[x=0]->A\n"
    "B[out=1]--[x=1]->B\n";

MockLlmClient interpreter() {
  return MockLlmClient(Json{{"templates", {{"sicot.state_diagram.v1", "LLM READING OF:\n{{diagram}}"}}}});
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

TEST(Sicot, NaturalLanguageOnlyIsUntouched) {
  std::string prompt = "Implement an AND gate.\nmodule top_module(input a, input b, output out);";
  auto llm = interpreter();
  for (auto policy : {RoutePolicy::DeterministicOnly, RoutePolicy::LlmForStateDiagrams, RoutePolicy::LlmFallback}) {
    SicotOptions o;
    o.policy = policy;
    auto r = interpret(prompt, &llm, o);
    EXPECT_EQ(r.final_text, prompt);
    EXPECT_TRUE(r.route_log.empty());
  }
  EXPECT_EQ(llm.call_count(), 0u);
}

TEST(Sicot, EmptyPromptIsRejected) {
  try {
    interpret("", nullptr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PreconditionViolation);
  }
}

TEST(Sicot, DeterministicFsm) {
  auto r = interpret(kFsmPrompt, nullptr);
  EXPECT_TRUE(contains(r.final_text, "Implement this FSM.\n")) << r.final_text;
  EXPECT_TRUE(contains(r.final_text, "States&Outputs: 1. state A(out=0); 2. state B(out=1)")) << r.final_text;
  EXPECT_TRUE(contains(r.final_text, "module top_module(input clk, input reset, input x, output out);")) << r.final_text;
  EXPECT_FALSE(contains(r.final_text, "--[")) << r.final_text;
  ASSERT_EQ(r.route_log.size(), 1u);
  EXPECT_EQ(r.route_log[0].route, Route::Parser);
  ASSERT_EQ(r.interpreted_blocks.size(), 1u);
  EXPECT_EQ(r.interpreted_blocks[0].source_modality, Modality::StateDiagram);
}

TEST(Sicot, ProseOutsideSpansPreserved) {
  std::string prompt = "Before text, with  two spaces.\na | b | out\n0 | 0 | 1\n1 | 1 | 0\nAfter text.\n"
                       "module top_module(input a, input b, output out);\n";
  auto r = interpret(prompt, nullptr);
  EXPECT_TRUE(starts_with(r.final_text, "Before text, with  two spaces.\n")) << r.final_text;
  EXPECT_TRUE(contains(r.final_text, "\nAfter text.\nmodule top_module(input a, input b, output out);\n")) << r.final_text;
}

TEST(Sicot, StateDiagramsToLlm) {
  auto llm = interpreter();
  SicotOptions o;
  o.policy = RoutePolicy::LlmForStateDiagrams;
  auto r = interpret(kFsmPrompt, &llm, o);
  EXPECT_EQ(llm.call_count(), 1u);
  EXPECT_TRUE(contains(r.final_text, "LLM READING OF:\nA[out=0]--[x=0]->B")) << r.final_text;
  EXPECT_EQ(r.route_log.at(0).route, Route::LlmInterpreter);
  // The header still comes from the deterministic parse.
  EXPECT_TRUE(contains(r.final_text, "input clk, input reset, input x, output out")) << r.final_text;
}

TEST(Sicot, TruthTableStaysOnParserUnderLlmPolicy) {
  auto llm = interpreter();
  SicotOptions o;
  o.policy = RoutePolicy::LlmForStateDiagrams;
  auto r = interpret("Do it:\na | b | out\n0 | 0 | 0\n1 | 1 | 1\n", &llm, o);
  EXPECT_EQ(llm.call_count(), 0u);
  EXPECT_EQ(r.route_log.at(0).route, Route::Parser);
}

TEST(Sicot, MalformedDiagramFailsDeterministically) {
  std::string prompt = "Implement this FSM...\nA[out=0]--[in==0]->B\nA[out=0]--[in==1]->A\n";
  try {
    interpret(prompt, nullptr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InterpretationFailed);
  }
}

TEST(Sicot, FallbackRoutesFailuresToLlm) {
  auto llm = interpreter();
  SicotOptions o;
  o.policy = RoutePolicy::LlmFallback;
  o.signature = parse_module_header("module top_module(input clk, input reset, input in, output out);");
  auto r = interpret("Implement this FSM...\nA[out=0]--[in==0]->B\nA[out=0]--[in==1]->A\n", &llm, o);
  EXPECT_EQ(r.route_log.at(0).route, Route::LlmInterpreter);
  EXPECT_EQ(llm.call_count(), 1u);
  EXPECT_TRUE(contains(r.final_text, "module top_module(input clk, input reset, input in, output out);"));
}

TEST(Sicot, PassthroughKeepsBlock) {
  SicotOptions o;
  o.passthrough_on_failure = true;
  o.signature = parse_module_header("module top_module(input clk, input reset, input in, output out);");
  std::string block = "A[out=0]--[in==0]->B\nA[out=0]--[in==1]->A\n";
  auto r = interpret("FSM:\n" + block, nullptr, o);
  EXPECT_EQ(r.route_log.at(0).route, Route::Passthrough);
  EXPECT_TRUE(contains(r.final_text, block));
}

TEST(Sicot, LlmErrorsPropagate) {
  MockLlmClient llm(Json{{"exact", Json::array({{{"template_id", "sicot.state_diagram.v1"}, {"error", "RateLimited"}}})}});
  SicotOptions o;
  o.policy = RoutePolicy::LlmForStateDiagrams;
  try {
    interpret(kFsmPrompt, &llm, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RateLimited);
  }
}

TEST(Sicot, MissingSignatureWithoutParse) {
  SicotOptions o;
  o.passthrough_on_failure = true;
  try {
    interpret("FSM:\nA[out=0]--[in==0]->B\n", nullptr, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingSignature);
  }
}

TEST(Sicot, DeterministicIsPure) {
  auto a = interpret(kFsmPrompt, nullptr);
  auto b = interpret(kFsmPrompt, nullptr);
  EXPECT_EQ(a.final_text, b.final_text);
}

TEST(Sicot, PolicyNames) {
  EXPECT_EQ(parse_route_policy("deterministic"), RoutePolicy::DeterministicOnly);
  EXPECT_EQ(parse_route_policy("LLM-State-Diagrams"), RoutePolicy::LlmForStateDiagrams);
  EXPECT_EQ(parse_route_policy("llm-fallback"), RoutePolicy::LlmFallback);
  EXPECT_THROW(parse_route_policy("sometimes"), Error);
}

}  // namespace
