#include <gtest/gtest.h>

#include <random>

#include "haven/error.hpp"
#include "haven/ldataset.hpp"
#include "haven/llm.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace haven;

namespace {

using test::cover_mask;
using test::table_from_bits;

TEST(Minimize, AllThreeInputFunctionsAreMinimal) {
  for (int f = 0; f < 256; ++f) {
    std::vector<Bit> outs;
    uint32_t on = 0, off = 0;
    for (int m = 0; m < 8; ++m) {
      bool one = (f >> m) & 1;
      outs.push_back(one ? Bit::One : Bit::Zero);
      (one ? on : off) |= 1u << m;
    }
    auto t = table_from_bits(3, outs);
    auto cubes = minimize_sop_cubes(t);
    EXPECT_EQ(cover_mask(cubes), on) << "function " << f;
    EXPECT_EQ(test::cover_cost(cubes), test::min_sop_cost(3, on, off)) << "function " << f;
    auto expr = minimize_sop(t);
    EXPECT_EQ(literal_count(expr), test::cover_cost(cubes).first) << "function " << f;
  }
}

TEST(Minimize, ThreeInputWithDontCaresAreMinimal) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 300; ++k) {
    std::vector<Bit> outs;
    uint32_t on = 0, off = 0;
    for (int m = 0; m < 8; ++m) {
      int v = static_cast<int>(rng() % 3);
      outs.push_back(v == 0 ? Bit::Zero : v == 1 ? Bit::One : Bit::DontCare);
      if (v == 0) off |= 1u << m;
      if (v == 1) on |= 1u << m;
    }
    auto cubes = minimize_sop_cubes(table_from_bits(3, outs));
    uint32_t cov = cover_mask(cubes);
    EXPECT_EQ(cov & on, on);
    EXPECT_EQ(cov & off, 0u);
    EXPECT_EQ(test::cover_cost(cubes), test::min_sop_cost(3, on, off));
  }
}

TEST(Minimize, FourInputEquivalence) {
  for (uint64_t seed = 0; seed < 1000; ++seed) {
    auto t = gen_random_truth_table(4, seed % 3 == 0 ? 0.25 : 0.0, seed);
    auto expr = minimize_sop(t);
    for (const auto& row : t.rows) {
      if (row.out[0] == Bit::DontCare) continue;
      std::map<std::string, bool> env;
      for (size_t i = 0; i < t.inputs.size(); ++i) env[t.inputs[i]] = row.in[i] == Bit::One;
      ASSERT_EQ(eval_expression(expr, env), row.out[0] == Bit::One) << "seed " << seed;
    }
  }
}

TEST(Minimize, SixInputsFinishAndAgree) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    auto t = gen_random_truth_table(6, 0.1, seed);
    auto cubes = minimize_sop_cubes(t);
    auto expr = cubes_to_expression(cubes, t.inputs);
    for (const auto& row : t.rows) {
      if (row.out[0] == Bit::DontCare) continue;
      std::map<std::string, bool> env;
      for (size_t i = 0; i < t.inputs.size(); ++i) env[t.inputs[i]] = row.in[i] == Bit::One;
      ASSERT_EQ(eval_expression(expr, env), row.out[0] == Bit::One) << "seed " << seed;
    }
  }
}

TEST(Minimize, Constants) {
  auto zero = minimize_sop(table_from_bits(2, {Bit::Zero, Bit::Zero, Bit::Zero, Bit::Zero}));
  auto one = minimize_sop(table_from_bits(2, {Bit::One, Bit::One, Bit::One, Bit::One}));
  EXPECT_EQ(to_verilog(zero), "1'b0");
  EXPECT_EQ(to_verilog(one), "1'b1");
}

TEST(Minimize, RejectsIncompleteTables) {
  auto t = table_from_bits(2, {Bit::One, Bit::Zero, Bit::Zero, Bit::One});
  t.rows.pop_back();
  try {
    minimize_sop(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PreconditionViolation);
  }
  t = table_from_bits(2, {Bit::One, Bit::Zero, Bit::Zero, Bit::One});
  t.outputs.push_back("y");
  EXPECT_THROW(minimize_sop(t), Error);
}

TEST(Expression, UnboundVariable) {
  try {
    eval_expression(LogicExpression::var("q"), {{"a", true}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnboundVariable);
  }
}

// ---- word delta ---------------------------------------------------------------

TEST(WordDelta, MatchesExhaustiveAlignment) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 2000; ++k) {
    auto a = test::random_words(rng), b = test::random_words(rng);
    std::string ta = test::join_words(a), tb = test::join_words(b);
    ASSERT_EQ(check_word_delta(ta, tb), test::brute_word_delta(a, b)) << ta << " / " << tb;
  }
}

TEST(WordDelta, MetricProperties) {
  std::mt19937_64 rng(22);
  for (int k = 0; k < 500; ++k) {
    auto a = test::join_words(test::random_words(rng));
    auto b = test::join_words(test::random_words(rng));
    auto c = test::join_words(test::random_words(rng));
    EXPECT_EQ(check_word_delta(a, a), 0);
    EXPECT_EQ(check_word_delta(a, b), check_word_delta(b, a));
    EXPECT_LE(check_word_delta(a, c), check_word_delta(a, b) + check_word_delta(b, c));
  }
  EXPECT_EQ(check_word_delta("a  b\n c", "a b c"), 0);
}

// Evolver returning the instruction with `extra` words appended.
class PaddingEvolver : public LlmClient {
 public:
  explicit PaddingEvolver(int extra) : extra_(extra) {}
  CompletionResult complete(const CompletionRequest& r) override {
    ++calls;
    CompletionResult out;
    out.text = r.substitutions.at("instruction");
    for (int i = 0; i < extra_; ++i) out.text += " pad" + std::to_string(i);
    return out;
  }
  int calls = 0;

 private:
  int extra_;
};

TEST(Evolve, AcceptsUpToTenWords) {
  const std::string ins = "Implement a module that drives out high when a and b are both high.";
  for (int d : {0, 10, 11}) {
    PaddingEvolver ev(d);
    auto r = evolve_instruction(ins, ev);
    EXPECT_EQ(r.accepted, d <= 10) << d;
    if (r.accepted) {
      EXPECT_EQ(r.delta, d);
      EXPECT_EQ(r.attempts, 1);
      EXPECT_EQ(check_word_delta(ins, r.text), d);
    } else {
      EXPECT_EQ(r.text, ins);
      EXPECT_EQ(r.attempts, 3);
      EXPECT_EQ(ev.calls, 3);
    }
  }
}

TEST(Evolve, LlmErrorsCountAsAttempts) {
  MockLlmClient ev(Json{{"exact", Json::array({{{"template_id", "ldataset.evolve.v1"}, {"error", "NetworkError"}}})}});
  auto r = evolve_instruction("Keep this.", ev);
  EXPECT_FALSE(r.accepted);
  EXPECT_EQ(r.text, "Keep this.");
  EXPECT_EQ(ev.call_count(), 3u);
}

// ---- problems, templates, dataset --------------------------------------------

TEST(Templates, FlavorCompatibility) {
  auto concise = make_logic_problem(3, 0.0, Flavor::ConciseExpression, 1);
  auto faithful = make_logic_problem(3, 0.0, Flavor::FaithfulImplementation, 1);
  for (const auto& id : template_ids(Flavor::ConciseExpression)) {
    EXPECT_NO_THROW(instantiate_templates(concise, id));
    EXPECT_THROW(instantiate_templates(faithful, id), Error);
  }
  for (const auto& id : template_ids(Flavor::FaithfulImplementation)) EXPECT_NO_THROW(instantiate_templates(faithful, id));
  try {
    instantiate_templates(concise, "no-such-template");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IncompatibleTemplate);
  }
  auto big = make_logic_problem(5, 0.0, Flavor::ConciseExpression, 1);
  EXPECT_THROW(instantiate_templates(big, "expr-kmap"), Error);
}

TEST(Templates, ConciseCodeUsesMinimalExpression) {
  auto p = make_logic_problem(3, 0.0, Flavor::ConciseExpression, 9);
  ASSERT_TRUE(p.minimal.has_value());
  auto pair = instantiate_templates(p, "expr-assign");
  EXPECT_NE(pair.code.find(to_verilog(*p.minimal)), std::string::npos) << pair.code;
  EXPECT_NE(pair.instruction.find("module top_module("), std::string::npos) << pair.instruction;
  EXPECT_EQ(pair.stage, Stage::Logic);
}

TEST(LDataset, DeterministicAndMixed) {
  LDatasetParams params;
  params.count = 12;
  params.seed = 7;
  auto a = generate_l_dataset(params, nullptr);
  auto b = generate_l_dataset(params, nullptr, 3);
  ASSERT_EQ(a.size(), 12u);
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].pair, b[i].pair);
    EXPECT_EQ(a[i].problem.flavor, i % 2 == 0 ? Flavor::ConciseExpression : Flavor::FaithfulImplementation);
    EXPECT_EQ(a[i].problem.seed, b[i].problem.seed);
  }
  EXPECT_EQ(l_dataset_meta(params)["item_seeds"].size(), 12u);
  params.n_min = 1;
  EXPECT_THROW(generate_l_dataset(params, nullptr), Error);
}

TEST(LDataset, GeneratedCodePassesItsTestbench) {
  Toolchain tc(test::tool_config());
  LDatasetParams params;
  params.count = 8;
  params.seed = 3;
  params.dont_care_fraction = 0.2;
  for (const auto& item : generate_l_dataset(params, nullptr)) {
    EXPECT_TRUE(tc.compile(item.pair.code).ok) << item.pair.code;
    auto sim = tc.simulate(item.testbench, "", item.pair.code);
    EXPECT_TRUE(sim.pass) << item.pair.id << "\n" << sim.output;
  }
}

TEST(LDataset, ConstantFunctionsSimulate) {
  Toolchain tc(test::tool_config());
  for (auto outs : {std::vector<Bit>{Bit::DontCare, Bit::Zero, Bit::DontCare, Bit::Zero},
                    std::vector<Bit>{Bit::One, Bit::One, Bit::DontCare, Bit::One},
                    std::vector<Bit>(4, Bit::DontCare)}) {
    for (auto flavor : {Flavor::ConciseExpression, Flavor::FaithfulImplementation}) {
      LogicProblem p;
      p.inputs = default_input_names(2);
      p.table = table_from_bits(2, outs);
      p.flavor = flavor;
      if (flavor == Flavor::ConciseExpression) p.minimal = minimize_sop(p.table);
      for (const auto& id : template_ids(flavor)) {
        auto pair = instantiate_templates(p, id);
        auto sim = tc.simulate(make_testbench(p), "", pair.code);
        EXPECT_TRUE(sim.pass) << id << "\n" << pair.code << sim.output;
      }
    }
  }
}

TEST(LDataset, TestbenchCatchesWrongDesign) {
  Toolchain tc(test::tool_config());
  auto p = make_logic_problem(3, 0.0, Flavor::FaithfulImplementation, 4);
  // Flip the output of one defined row.
  auto wrong = p;
  for (auto& row : wrong.table.rows)
    if (row.out[0] != Bit::DontCare) {
      row.out[0] = row.out[0] == Bit::One ? Bit::Zero : Bit::One;
      break;
    }
  auto bad = instantiate_templates(wrong, "faithful-case");
  auto sim = tc.simulate(make_testbench(p), "", bad.code);
  EXPECT_FALSE(sim.pass) << sim.output;
  EXPECT_NE(sim.output.find("MISMATCH"), std::string::npos);
}

TEST(LDataset, EvolvedInstructionsKeepHeader) {
  PaddingEvolver ev(2);
  LDatasetParams params;
  params.count = 4;
  params.evolve = true;
  for (const auto& item : generate_l_dataset(params, &ev)) {
    EXPECT_TRUE(item.evolved);
    EXPECT_NE(item.pair.instruction.find("module top_module("), std::string::npos);
  }
}

TEST(Kmap, RendersGrayOrder) {
  auto t = table_from_bits(2, {Bit::Zero, Bit::One, Bit::One, Bit::Zero});
  auto k = render_kmap(t);
  EXPECT_FALSE(k.empty());
  EXPECT_THROW(render_kmap(table_from_bits(5, std::vector<Bit>(32, Bit::Zero))), Error);
}

}  // namespace
