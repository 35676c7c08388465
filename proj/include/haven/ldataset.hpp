#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "haven/kdataset.hpp"
#include "haven/symbolic.hpp"

namespace haven {

class LlmClient;

struct LogicExpression {
  enum class Kind { Var, Not, And, Or, Xor, Const };
  Kind kind = Kind::Const;
  std::string name;  // Var
  bool value = false;  // Const
  std::vector<LogicExpression> kids;

  static LogicExpression var(std::string n);
  static LogicExpression constant(bool v);
  static LogicExpression negate(LogicExpression e);
  static LogicExpression make(Kind k, std::vector<LogicExpression> kids);

  bool operator==(const LogicExpression&) const = default;
};

// Verilog expression text: `a & b`, `(a & ~b) | (~a & b)`, `1'b0`.
std::string to_verilog(const LogicExpression& e);
int literal_count(const LogicExpression& e);
// Throws Error(UnboundVariable).
bool eval_expression(const LogicExpression& e, const std::map<std::string, bool>& assignment);

// Input names used by generated problems: a, b, c, ...
std::vector<std::string> default_input_names(int n);

// Full 2^n-row table over default_input_names(n), output "out"; rows ascending
// with the first input as the most significant bit.
TruthTable gen_random_truth_table(int n_inputs, double dont_care_fraction, uint64_t seed);

// Cube over the inputs, one character per input: '0', '1' or '-'.
using Cube = std::string;

// Minimum sum-of-products cover (fewest literals, then fewest terms) built
// from prime implicants. Ties are broken by the lexicographically smallest
// sorted cube list under the character order '1' < '0' < '-'.
// Throws Error(MultiOutputUnsupported) or Error(PreconditionViolation) when
// rows are missing.
std::vector<Cube> minimize_sop_cubes(const TruthTable& table);
LogicExpression cubes_to_expression(const std::vector<Cube>& cubes, const std::vector<std::string>& inputs);
LogicExpression minimize_sop(const TruthTable& table);

enum class Flavor { ConciseExpression, FaithfulImplementation };
const char* to_string(Flavor f);

struct LogicProblem {
  std::vector<std::string> inputs;
  TruthTable table;
  Flavor flavor = Flavor::ConciseExpression;
  std::optional<LogicExpression> minimal;
  uint64_t seed = 0;
};

LogicProblem make_logic_problem(int n_inputs, double dont_care_fraction, Flavor flavor, uint64_t seed);

// "expr-assign", "expr-kmap" (ConciseExpression); "faithful-case", "faithful-if" (FaithfulImplementation).
std::vector<std::string> template_ids(Flavor f);
// Throws Error(IncompatibleTemplate) for unknown ids, flavor mismatches and
// K-map templates outside 2..4 inputs.
InstructionCodePair instantiate_templates(const LogicProblem& problem, const std::string& template_id);

std::string render_kmap(const TruthTable& table);

// Testbench applying all 2^n input combinations to top_module and printing
// "MISMATCH" for every defined row that disagrees.
std::string make_testbench(const LogicProblem& problem);

// Insertions plus deletions of a minimal word-level edit script.
int check_word_delta(const std::string& original, const std::string& evolved);

struct EvolveOptions {
  int max_word_delta = 10;
  int max_retries = 2;
  double temperature = 0.7;
};

struct EvolveResult {
  std::string text;
  bool accepted = false;
  int attempts = 0;
  int delta = 0;  // of the returned text
};

// Asks the evolver (template ldataset.evolve.v1) for a rewrite and keeps it
// when it is within max_word_delta words of the original. After
// 1 + max_retries rejected or failed attempts the original is returned.
EvolveResult evolve_instruction(const std::string& instruction, LlmClient& evolver, const EvolveOptions& options = {});

struct LDatasetParams {
  size_t count = 10;
  int n_min = 2;
  int n_max = 4;
  double dont_care_fraction = 0.0;
  uint64_t seed = 0;
  bool evolve = false;
  EvolveOptions evolve_options;
};

struct LDatasetItem {
  InstructionCodePair pair;
  LogicProblem problem;
  std::string template_id;
  std::string testbench;
  bool evolved = false;
};

// Item i uses seed mix_seed(params.seed, i); even items are
// ConciseExpression, odd items FaithfulImplementation, and the two template
// families of each flavor alternate.
std::vector<LDatasetItem> generate_l_dataset(const LDatasetParams& params, LlmClient* evolver, int workers = 1);

Json l_dataset_meta(const LDatasetParams& params);

}  // namespace haven
