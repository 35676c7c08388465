#include <gtest/gtest.h>

#include <random>
#include <set>

#include "haven/error.hpp"
#include "haven/symbolic.hpp"
#include "oracles.hpp"

using namespace haven;

namespace {

using test::random_table;
using test::random_wave;

const char* kFsmBlock =
    "A[out=0]--[x=0]->B\n"
    "A[out=0]--[x=1]->A\n"
    "B[out=1]--[x=0]->A\n"
    "B[out=1]--[x=1]->B\n";

const char* kAndTable =
    "a | b | out\n"
    "0 | 0 | 0\n"
    "0 | 1 | 0\n"
    "1 | 0 | 0\n"
    "1 | 1 | 1\n";

const char* kWaveBlock =
    "    a: 0 1 1 0\n"
    "    b: 1 0 1 0\n"
    "    out: 1 0 0 1\n"
    "time(ns): 0 10 20 30\n";

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

int count_of(const std::string& hay, const std::string& needle) {
  int n = 0;
  for (size_t p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoError;
}

// ---- golden renderings --------------------------------------------------

TEST(SymbolicGolden, StateDiagramPhrasing) {
  auto text = render_uniform_instruction(parse_state_diagram(kFsmBlock)).text;
  EXPECT_TRUE(contains(text, "States&Outputs: 1. state A(out=0); 2. state B(out=1)")) << text;
  EXPECT_TRUE(contains(text, "State transition:")) << text;
  EXPECT_TRUE(contains(text, "From state A: If x = 0, then transit to state B")) << text;
  EXPECT_TRUE(contains(text, "If x = 1, then transit to state A")) << text;
  EXPECT_TRUE(contains(text, "From state B: If x = 0, then transit to state A")) << text;
}

TEST(SymbolicGolden, TruthTablePhrasing) {
  auto text = render_uniform_instruction(parse_truth_table(kAndTable)).text;
  EXPECT_TRUE(contains(text, "Variables: 1. a(input); 2. b(input); 3. out(output)")) << text;
  EXPECT_TRUE(contains(text, "Rules:")) << text;
  EXPECT_TRUE(contains(text, "If a=1, b=1, then out =1")) << text;
  EXPECT_TRUE(contains(text, "1. If a=0, b=0, then out =0;")) << text;
}

TEST(SymbolicGolden, WaveformPhrasing) {
  auto text = render_uniform_instruction(parse_waveform(kWaveBlock)).text;
  EXPECT_TRUE(contains(text, "When time is 0ns, a=0, b=1, out=1")) << text;
  EXPECT_TRUE(contains(text, "When time is 10ns, a=1, b=0, out=0")) << text;
  EXPECT_TRUE(contains(text, "3. out(output)")) << text;
}

TEST(SymbolicGolden, DontCareOutput) {
  auto text = render_uniform_instruction(parse_truth_table("a | b | out\n0 | 0 | X\n1 | 1 | 1\n")).text;
  EXPECT_TRUE(contains(text, "If a=0, b=0, then out can be any value")) << text;
}

TEST(SymbolicGolden, UnconditionalEdge) {
  auto d = parse_state_diagram("A[y=0]--[1]->B\nB[y=1]--[go=1]->A\nB[y=1]--[go=0]->B\n");
  auto text = render_uniform_instruction(d).text;
  EXPECT_TRUE(contains(text, "From state A: Always transit to state B")) << text;
}

// ---- parsing ----------------------------------------------------------------

TEST(SymbolicParse, TruthTableWithTwoSpaceColumns) {
  auto t = parse_truth_table("a  b  out\n0  0  0\n0  1  1\n1  0  1\n1  1  0\n");
  EXPECT_EQ(t.inputs, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(t.outputs, (std::vector<std::string>{"out"}));
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.rows[1].out[0], Bit::One);
}

TEST(SymbolicParse, TruthTableDirectionAnnotations) {
  auto t = parse_truth_table("out(output) | a(input) | b(input)\n1 | 0 | 0\n0 | 1 | 1\n");
  EXPECT_EQ(t.inputs, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(t.outputs, (std::vector<std::string>{"out"}));
  EXPECT_EQ(t.rows[0].in, (std::vector<Bit>{Bit::Zero, Bit::Zero}));
  EXPECT_EQ(t.rows[0].out, (std::vector<Bit>{Bit::One}));
}

TEST(SymbolicParse, TruthTableErrors) {
  EXPECT_EQ(code_of([] { parse_truth_table("a | b | out\n"); }), ErrorCode::EmptyTable);
  EXPECT_EQ(code_of([] { parse_truth_table(""); }), ErrorCode::EmptyTable);
  EXPECT_EQ(code_of([] { parse_truth_table("a | b | out\n0 | 1\n"); }), ErrorCode::MalformedTable);
  EXPECT_EQ(code_of([] { parse_truth_table("a | b | out\n0 | 2 | 1\n"); }), ErrorCode::MalformedTable);
  EXPECT_EQ(code_of([] { parse_truth_table("a | b | out\n01 | 1 | 1\n"); }), ErrorCode::MalformedTable);
  EXPECT_EQ(code_of([] { parse_truth_table("a | b | out\n0 | 1 | 1\n0 | 1 | 0\n"); }), ErrorCode::MalformedTable);
  EXPECT_EQ(code_of([] { parse_truth_table("a | a | out\n0 | 1 | 1\n"); }), ErrorCode::MalformedTable);
}

TEST(SymbolicParse, WaveformWithoutTimeAxis) {
  auto w = parse_waveform("a: 0 1 0 1\nb: 0 0 1 1\nout: 0 0 0 1\n");
  EXPECT_FALSE(w.time_axis.has_value());
  auto text = render_uniform_instruction(w).text;
  EXPECT_TRUE(contains(text, "At step 4, a=1, b=1, out=1")) << text;
}

TEST(SymbolicParse, WaveformHeaderSuppliesDirections) {
  auto header = parse_module_header("module top_module(input x, output y, input z);");
  ASSERT_TRUE(header);
  auto w = parse_waveform("x: 0 1\ny: 1 0\nz: 0 0\n", header);
  EXPECT_EQ(w.signals[0].direction, Direction::Input);
  EXPECT_EQ(w.signals[1].direction, Direction::Output);
  EXPECT_EQ(w.signals[2].direction, Direction::Input);
}

TEST(SymbolicParse, WaveformErrors) {
  EXPECT_EQ(code_of([] { parse_waveform(""); }), ErrorCode::EmptyWaveform);
  EXPECT_EQ(code_of([] { parse_waveform("a: 0 1 0\nb: 0 1\n"); }), ErrorCode::MalformedWaveform);
  EXPECT_EQ(code_of([] { parse_waveform("a: 0 1\nb: 0 1\ntime(ns): 10 5\n"); }), ErrorCode::MalformedWaveform);
  EXPECT_EQ(code_of([] { parse_waveform("a: 0 1\na: 0 1\n"); }), ErrorCode::MalformedWaveform);
}

TEST(SymbolicParse, StateDiagramStructure) {
  auto d = parse_state_diagram(kFsmBlock);
  ASSERT_EQ(d.states.size(), 2u);
  EXPECT_EQ(d.states[0].name, "A");
  EXPECT_EQ(d.output_names, (std::vector<std::string>{"out"}));
  ASSERT_EQ(d.transitions.size(), 4u);
  EXPECT_EQ(d.transitions[0], (Transition{"A", "x=0", "B"}));
}

TEST(SymbolicParse, StateDiagramDoubleEqualsAndSpacing) {
  auto d = parse_state_diagram("A [out=0] -- [in==0] --> B\nA[out=0]--[in==1]->A\nB[out=1]--[in==0]->A\nB[out=1]--[in==1]->B\n");
  auto text = render_uniform_instruction(d).text;
  EXPECT_TRUE(contains(text, "From state A: If in = 0, then transit to state B")) << text;
}

TEST(SymbolicParse, StateDiagramErrors) {
  EXPECT_EQ(code_of([] { parse_state_diagram("A[out=0]--[x=0]->B\n"); }), ErrorCode::DanglingState);
  EXPECT_EQ(code_of([] { parse_state_diagram("A[out=0]--[x=0]->A\nA[out=1]--[x=1]->A\n"); }),
            ErrorCode::InconsistentOutputs);
  EXPECT_EQ(code_of([] { parse_state_diagram("A[out=0]--[]->A\n"); }), ErrorCode::MalformedDiagram);
  EXPECT_EQ(code_of([] { parse_state_diagram("hello\n"); }), ErrorCode::MalformedDiagram);
}

// ---- properties -----------------------------------------------------------

TEST(SymbolicProperty, TruthTableRoundTrip) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    auto t = random_table(rng);
    auto block = format_truth_table(t);
    ASSERT_EQ(parse_truth_table(block), t) << block;
  }
}

TEST(SymbolicProperty, WaveformRoundTrip) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 500; ++i) {
    auto w = random_wave(rng);
    auto block = format_waveform(w);
    ASSERT_EQ(parse_waveform(block), w) << block;
  }
}

TEST(SymbolicProperty, StateDiagramRoundTrip) {
  auto d = parse_state_diagram(kFsmBlock);
  EXPECT_EQ(parse_state_diagram(format_state_diagram(d)), d);
}

TEST(SymbolicProperty, RuleCountConservation) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    auto t = random_table(rng);
    auto text = render_uniform_instruction(t).text;
    size_t rules = text.find("Rules:");
    ASSERT_NE(rules, std::string::npos);
    int numbered = 0;
    for (size_t r = 1; r <= t.rows.size() + 1; ++r)
      if (contains(text.substr(rules), "\n" + std::to_string(r) + ". If ")) ++numbered;
    EXPECT_EQ(numbered, static_cast<int>(t.rows.size())) << text;
  }
  auto d = parse_state_diagram(kFsmBlock);
  EXPECT_EQ(count_of(render_uniform_instruction(d).text, "transit to"), 4);
}

TEST(SymbolicProperty, RenderingIsDeterministic) {
  auto a = render_uniform_instruction(parse_truth_table(kAndTable)).text;
  auto b = render_uniform_instruction(parse_truth_table(kAndTable)).text;
  EXPECT_EQ(a, b);
}

TEST(SymbolicProperty, DetectedSpansParse) {
  std::mt19937_64 rng(14);
  const std::vector<std::string> prose = {"Implement the circuit below.\n", "Note the reset is synchronous.\n",
                                          "Use a | b for nothing here, this is prose.\n", "Then:\n"};
  for (int i = 0; i < 200; ++i) {
    std::string prompt;
    int parts = 1 + static_cast<int>(rng() % 4);
    for (int p = 0; p < parts; ++p) {
      prompt += prose[rng() % prose.size()];
      switch (rng() % 3) {
        case 0: prompt += format_truth_table(random_table(rng)); break;
        case 1: prompt += format_waveform(random_wave(rng)); break;
        default: prompt += kFsmBlock; break;
      }
    }
    auto det = detect_modality(prompt);
    ASSERT_FALSE(det.spans.empty()) << prompt;
    for (const auto& s : det.spans) {
      std::string block = prompt.substr(s.begin, s.end - s.begin);
      EXPECT_NO_THROW(parse_block(block, s.kind)) << to_string(s.kind) << "\n" << block;
    }
  }
}

TEST(SymbolicDetect, NaturalLanguageOnly) {
  auto det = detect_modality("Implement a 4-bit adder with carry out.\nmodule adder(input [3:0] a);");
  EXPECT_EQ(det.kind, Modality::NaturalLanguageOnly);
  EXPECT_TRUE(det.spans.empty());
}

TEST(SymbolicDetect, MixedModalities) {
  std::string prompt = std::string("Part one:\n") + kAndTable + "Part two:\n" + kFsmBlock;
  auto det = detect_modality(prompt);
  EXPECT_EQ(det.kind, Modality::Mixed);
  ASSERT_EQ(det.spans.size(), 2u);
  EXPECT_EQ(det.spans[0].kind, Modality::TruthTable);
  EXPECT_EQ(det.spans[1].kind, Modality::StateDiagram);
}

TEST(SymbolicDetect, TableRowInsideProse) {
  std::string prompt = "Implement the truth table below...\na | b | out\n1 | 1 | 1\n1 | 0 | 0\n";
  auto det = detect_modality(prompt);
  ASSERT_EQ(det.spans.size(), 1u);
  EXPECT_EQ(det.kind, Modality::TruthTable);
}

// ---- headers ------------------------------------------------------------------

TEST(SymbolicHeader, AppendsInferredHeader) {
  auto spec = SymbolicSpec(parse_truth_table(kAndTable));
  auto text = ensure_module_header("Rules", std::nullopt, spec);
  EXPECT_TRUE(contains(text, "module top_module(input a, input b, output out);")) << text;
  auto sig = parse_module_header(text);
  ASSERT_TRUE(sig);
  EXPECT_EQ(*sig, infer_signature(spec));
}

TEST(SymbolicHeader, Idempotent) {
  auto spec = SymbolicSpec(parse_truth_table(kAndTable));
  auto once = ensure_module_header("Rules", std::nullopt, spec);
  EXPECT_EQ(ensure_module_header(once, std::nullopt, spec), once);
  std::string with = "do it\nmodule top_module(input a, input b, output out);";
  EXPECT_EQ(ensure_module_header(with, std::nullopt), with);
}

TEST(SymbolicHeader, MissingSignature) {
  EXPECT_EQ(code_of([] { ensure_module_header("free text", std::nullopt); }), ErrorCode::MissingSignature);
}

TEST(SymbolicHeader, FsmSignature) {
  auto sig = infer_signature(parse_state_diagram(kFsmBlock));
  EXPECT_EQ(render_module_header(sig), "module top_module(input clk, input reset, input x, output out);");
}

TEST(SymbolicHeader, ParsesRangesAndInheritedDirection) {
  auto sig = parse_module_header("module alu(input [7:0] a, b, input [1:0] op, output reg [7:0] y);");
  ASSERT_TRUE(sig);
  EXPECT_EQ(sig->module_name, "alu");
  ASSERT_EQ(sig->ports.size(), 4u);
  EXPECT_EQ(sig->ports[1], (Port{Direction::Input, "b", 8}));
  EXPECT_EQ(sig->ports[3], (Port{Direction::Output, "y", 8}));
}

}  // namespace
