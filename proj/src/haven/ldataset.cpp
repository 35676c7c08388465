#include "haven/ldataset.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <bit>
#include <cstdio>
#include <random>

#include "haven/error.hpp"
#include "haven/llm.hpp"

namespace haven {

// ---- expressions -------------------------------------------------------------

LogicExpression LogicExpression::var(std::string n) {
  LogicExpression e;
  e.kind = Kind::Var;
  e.name = std::move(n);
  return e;
}

LogicExpression LogicExpression::constant(bool v) {
  LogicExpression e;
  e.kind = Kind::Const;
  e.value = v;
  return e;
}

LogicExpression LogicExpression::negate(LogicExpression inner) {
  LogicExpression e;
  e.kind = Kind::Not;
  e.kids.push_back(std::move(inner));
  return e;
}

LogicExpression LogicExpression::make(Kind k, std::vector<LogicExpression> kids) {
  LogicExpression e;
  e.kind = k;
  e.kids = std::move(kids);
  return e;
}

namespace {

using K = LogicExpression::Kind;

std::string wrap(const LogicExpression& kid, bool paren) {
  std::string s = to_verilog(kid);
  return paren ? "(" + s + ")" : s;
}

std::string join_kids(const LogicExpression& e, const char* sep) {
  std::string out;
  for (size_t i = 0; i < e.kids.size(); ++i) {
    const auto& k = e.kids[i];
    bool paren = false;
    if (e.kind == K::And) paren = k.kind == K::Or || k.kind == K::Xor || (k.kind == K::And && k.kids.size() > 1);
    if (e.kind == K::Or) paren = (k.kind == K::And && k.kids.size() > 1 && e.kids.size() > 1) || k.kind == K::Xor;
    if (e.kind == K::Xor) paren = k.kind == K::And || k.kind == K::Or;
    if (i) out += sep;
    out += wrap(k, paren);
  }
  return out;
}

}  // namespace

std::string to_verilog(const LogicExpression& e) {
  switch (e.kind) {
    case K::Const: return e.value ? "1'b1" : "1'b0";
    case K::Var: return e.name;
    case K::Not: return "~" + wrap(e.kids.at(0), e.kids.at(0).kind != K::Var && e.kids.at(0).kind != K::Const);
    case K::And: return join_kids(e, " & ");
    case K::Or: return join_kids(e, " | ");
    case K::Xor: return join_kids(e, " ^ ");
  }
  return "";
}

int literal_count(const LogicExpression& e) {
  if (e.kind == K::Var) return 1;
  int n = 0;
  for (const auto& k : e.kids) n += literal_count(k);
  return n;
}

bool eval_expression(const LogicExpression& e, const std::map<std::string, bool>& assignment) {
  switch (e.kind) {
    case K::Const: return e.value;
    case K::Var: {
      auto it = assignment.find(e.name);
      if (it == assignment.end()) throw Error(ErrorCode::UnboundVariable, "variable '" + e.name + "' has no value");
      return it->second;
    }
    case K::Not: return !eval_expression(e.kids.at(0), assignment);
    case K::And:
      for (const auto& k : e.kids)
        if (!eval_expression(k, assignment)) return false;
      return true;
    case K::Or:
      for (const auto& k : e.kids)
        if (eval_expression(k, assignment)) return true;
      return false;
    case K::Xor: {
      bool v = false;
      for (const auto& k : e.kids) v = v != eval_expression(k, assignment);
      return v;
    }
  }
  return false;
}

// ---- tables ------------------------------------------------------------------

std::vector<std::string> default_input_names(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.emplace_back(1, static_cast<char>('a' + i));
  return out;
}

TruthTable gen_random_truth_table(int n_inputs, double dont_care_fraction, uint64_t seed) {
  if (n_inputs < 2 || n_inputs > 6) throw Error(ErrorCode::PreconditionViolation, "n_inputs must be in [2,6]");
  if (!(dont_care_fraction >= 0.0 && dont_care_fraction < 1.0))
    throw Error(ErrorCode::PreconditionViolation, "dont_care_fraction must be in [0,1)");
  std::mt19937_64 rng(seed);
  TruthTable t;
  t.inputs = default_input_names(n_inputs);
  t.outputs = {"out"};
  for (uint32_t r = 0; r < (1u << n_inputs); ++r) {
    TruthTable::Row row;
    for (int i = 0; i < n_inputs; ++i) row.in.push_back(((r >> (n_inputs - 1 - i)) & 1) ? Bit::One : Bit::Zero);
    Bit out = (rng() & 1) ? Bit::One : Bit::Zero;
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u < dont_care_fraction) out = Bit::DontCare;
    row.out.push_back(out);
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---- minimization ------------------------------------------------------------

namespace {

struct Implicant {
  uint32_t value = 0;  // bits outside `care` are zero
  uint32_t care = 0;
  bool operator<(const Implicant& o) const { return value != o.value ? value < o.value : care < o.care; }
  bool operator==(const Implicant& o) const = default;
  bool covers(uint32_t m) const { return (m & care) == value; }
};

Cube cube_string(const Implicant& p, int n) {
  Cube s(n, '-');
  for (int i = 0; i < n; ++i) {
    uint32_t bit = 1u << (n - 1 - i);
    if (p.care & bit) s[i] = (p.value & bit) ? '1' : '0';
  }
  return s;
}

// Sort key realising the '1' < '0' < '-' character order.
std::string order_key(const Cube& c) {
  std::string k = c;
  for (auto& ch : k) ch = ch == '1' ? 'a' : ch == '0' ? 'b' : 'c';
  return k;
}

struct Table {
  int n = 0;
  uint64_t on = 0, dc = 0;  // minterm bitsets (n <= 6)
};

Table table_sets(const TruthTable& t) {
  if (t.outputs.size() != 1) throw Error(ErrorCode::MultiOutputUnsupported, "minimization needs exactly one output");
  int n = static_cast<int>(t.inputs.size());
  if (n < 1 || n > 6) throw Error(ErrorCode::PreconditionViolation, "minimization supports 1..6 inputs");
  Table s;
  s.n = n;
  uint64_t seen = 0;
  for (const auto& row : t.rows) {
    uint32_t m = 0;
    for (int i = 0; i < n; ++i) {
      if (row.in[i] == Bit::DontCare) throw Error(ErrorCode::PreconditionViolation, "input don't-cares are not supported");
      if (row.in[i] == Bit::One) m |= 1u << (n - 1 - i);
    }
    seen |= 1ull << m;
    if (row.out[0] == Bit::One) s.on |= 1ull << m;
    if (row.out[0] == Bit::DontCare) s.dc |= 1ull << m;
  }
  uint64_t all = n == 6 ? ~0ull : ((1ull << (1u << n)) - 1);
  if (seen != all) throw Error(ErrorCode::PreconditionViolation, "table does not cover all input combinations");
  return s;
}

std::vector<Implicant> prime_implicants(const Table& s) {
  uint32_t full = (1u << s.n) - 1;
  std::set<Implicant> current;
  for (uint32_t m = 0; m < (1u << s.n); ++m)
    if (((s.on | s.dc) >> m) & 1) current.insert(Implicant{m, full});
  std::vector<Implicant> primes;
  while (!current.empty()) {
    std::set<Implicant> next, used;
    std::vector<Implicant> cur(current.begin(), current.end());
    for (size_t i = 0; i < cur.size(); ++i) {
      for (size_t j = i + 1; j < cur.size(); ++j) {
        if (cur[i].care != cur[j].care) continue;
        uint32_t diff = cur[i].value ^ cur[j].value;
        if (std::popcount(diff) != 1) continue;
        next.insert(Implicant{cur[i].value & ~diff, cur[i].care & ~diff});
        used.insert(cur[i]);
        used.insert(cur[j]);
      }
    }
    for (const auto& p : cur)
      if (!used.count(p)) primes.push_back(p);
    current = std::move(next);
  }
  return primes;
}

struct Cost {
  int literals = 0;
  int terms = 0;
  auto operator<=>(const Cost&) const = default;
};

struct CoverSearch {
  int n = 0;
  std::vector<Implicant> primes;
  std::vector<uint64_t> cover;  // minterms (ON only) covered by each prime
  std::vector<std::string> keys;
  std::vector<int> lits;

  bool have_best = false;
  Cost best;
  std::vector<std::string> best_keys;
  std::vector<size_t> best_set;

  void consider(const std::vector<size_t>& chosen, Cost c) {
    std::vector<std::string> k;
    for (size_t p : chosen) k.push_back(keys[p]);
    std::sort(k.begin(), k.end());
    if (!have_best || c < best || (c == best && k < best_keys)) {
      have_best = true;
      best = c;
      best_keys = std::move(k);
      best_set = chosen;
    }
  }

  void search(uint64_t uncovered, std::vector<size_t>& chosen, Cost c) {
    if (have_best && c > best) return;
    if (uncovered == 0) {
      consider(chosen, c);
      return;
    }
    // Branch on the uncovered minterm with the fewest candidate primes.
    int pick = -1;
    size_t fewest = SIZE_MAX;
    for (int m = 0; m < 64; ++m) {
      if (!((uncovered >> m) & 1)) continue;
      size_t cnt = 0;
      for (size_t p = 0; p < primes.size(); ++p)
        if ((cover[p] >> m) & 1) ++cnt;
      if (cnt < fewest) {
        fewest = cnt;
        pick = m;
      }
    }
    int min_lits = INT32_MAX;
    for (size_t p = 0; p < primes.size(); ++p)
      if ((cover[p] >> pick) & 1) min_lits = std::min(min_lits, lits[p]);
    if (have_best && Cost{c.literals + min_lits, c.terms + 1} > best) return;
    for (size_t p = 0; p < primes.size(); ++p) {
      if (!((cover[p] >> pick) & 1)) continue;
      if (std::find(chosen.begin(), chosen.end(), p) != chosen.end()) continue;
      chosen.push_back(p);
      search(uncovered & ~cover[p], chosen, Cost{c.literals + lits[p], c.terms + 1});
      chosen.pop_back();
    }
  }
};

}  // namespace

std::vector<Cube> minimize_sop_cubes(const TruthTable& table) {
  Table s = table_sets(table);
  if (s.on == 0) return {};
  CoverSearch cs;
  cs.n = s.n;
  cs.primes = prime_implicants(s);
  // Canonical prime order so branching is deterministic.
  std::sort(cs.primes.begin(), cs.primes.end(), [&](const Implicant& a, const Implicant& b) {
    return order_key(cube_string(a, s.n)) < order_key(cube_string(b, s.n));
  });
  for (const auto& p : cs.primes) {
    uint64_t c = 0;
    for (uint32_t m = 0; m < (1u << s.n); ++m)
      if (((s.on >> m) & 1) && p.covers(m)) c |= 1ull << m;
    cs.cover.push_back(c);
    cs.keys.push_back(order_key(cube_string(p, s.n)));
    cs.lits.push_back(std::popcount(p.care));
  }

  // Essential primes: sole cover of some ON minterm.
  std::vector<size_t> chosen;
  uint64_t uncovered = s.on;
  Cost cost;
  for (uint32_t m = 0; m < (1u << s.n); ++m) {
    if (!((s.on >> m) & 1)) continue;
    int only = -1, count = 0;
    for (size_t p = 0; p < cs.primes.size(); ++p)
      if ((cs.cover[p] >> m) & 1) {
        ++count;
        only = static_cast<int>(p);
      }
    if (count == 1 && std::find(chosen.begin(), chosen.end(), static_cast<size_t>(only)) == chosen.end()) {
      chosen.push_back(only);
      uncovered &= ~cs.cover[only];
      cost.literals += cs.lits[only];
      cost.terms += 1;
    }
  }
  cs.search(uncovered, chosen, cost);

  std::vector<Cube> out;
  for (size_t p : cs.best_set) out.push_back(cube_string(cs.primes[p], s.n));
  std::sort(out.begin(), out.end(), [](const Cube& a, const Cube& b) { return order_key(a) < order_key(b); });
  return out;
}

LogicExpression cubes_to_expression(const std::vector<Cube>& cubes, const std::vector<std::string>& inputs) {
  if (cubes.empty()) return LogicExpression::constant(false);
  std::vector<LogicExpression> terms;
  for (const auto& c : cubes) {
    std::vector<LogicExpression> lits;
    for (size_t i = 0; i < c.size(); ++i) {
      if (c[i] == '1') lits.push_back(LogicExpression::var(inputs.at(i)));
      if (c[i] == '0') lits.push_back(LogicExpression::negate(LogicExpression::var(inputs.at(i))));
    }
    if (lits.empty()) return LogicExpression::constant(true);
    terms.push_back(lits.size() == 1 ? lits[0] : LogicExpression::make(K::And, std::move(lits)));
  }
  return terms.size() == 1 ? terms[0] : LogicExpression::make(K::Or, std::move(terms));
}

LogicExpression minimize_sop(const TruthTable& table) {
  return cubes_to_expression(minimize_sop_cubes(table), table.inputs);
}

// ---- problems and templates --------------------------------------------------

const char* to_string(Flavor f) {
  return f == Flavor::ConciseExpression ? "ConciseExpression" : "FaithfulImplementation";
}

LogicProblem make_logic_problem(int n_inputs, double dont_care_fraction, Flavor flavor, uint64_t seed) {
  LogicProblem p;
  p.table = gen_random_truth_table(n_inputs, dont_care_fraction, seed);
  p.inputs = p.table.inputs;
  p.flavor = flavor;
  p.seed = seed;
  if (flavor == Flavor::ConciseExpression) p.minimal = minimize_sop(p.table);
  return p;
}

std::vector<std::string> template_ids(Flavor f) {
  if (f == Flavor::ConciseExpression) return {"expr-assign", "expr-kmap"};
  return {"faithful-case", "faithful-if"};
}

namespace {

const char* kGray2[] = {"0", "1"};
const char* kGray4[] = {"00", "01", "11", "10"};

Bit table_value(const TruthTable& t, uint32_t minterm) {
  int n = static_cast<int>(t.inputs.size());
  for (const auto& row : t.rows) {
    uint32_t m = 0;
    for (int i = 0; i < n; ++i)
      if (row.in[i] == Bit::One) m |= 1u << (n - 1 - i);
    if (m == minterm) return row.out.at(0);
  }
  return Bit::DontCare;
}

std::string bits_literal(const TruthTable::Row& row) {
  std::string s = std::to_string(row.in.size()) + "'b";
  for (Bit b : row.in) s += bit_char(b);
  return s;
}

std::string input_concat(const std::vector<std::string>& inputs) {
  std::string s = "{";
  for (size_t i = 0; i < inputs.size(); ++i) s += (i ? ", " : "") + inputs[i];
  return s + "}";
}

std::string header_with(const std::vector<std::string>& inputs, bool output_reg) {
  std::string s = "module top_module(";
  for (const auto& in : inputs) s += "input " + in + ", ";
  return s + (output_reg ? "output reg out);" : "output out);");
}

}  // namespace

std::string render_kmap(const TruthTable& t) {
  int n = static_cast<int>(t.inputs.size());
  if (n < 2 || n > 4 || t.outputs.size() != 1)
    throw Error(ErrorCode::IncompatibleTemplate, "K-map rendering needs a single-output table with 2..4 inputs");
  int row_bits = n / 2;
  int col_bits = n - row_bits;
  std::string row_vars, col_vars;
  for (int i = 0; i < row_bits; ++i) row_vars += t.inputs[i];
  for (int i = row_bits; i < n; ++i) col_vars += t.inputs[i];
  auto labels = [](int bits) {
    std::vector<std::string> v;
    if (bits == 1) v.assign(kGray2, kGray2 + 2);
    else v.assign(kGray4, kGray4 + 4);
    return v;
  };
  auto rows = labels(row_bits), cols = labels(col_bits);
  std::string out = "Karnaugh map of " + t.outputs[0] + " (rows: " + row_vars + ", columns: " + col_vars + "):\n";
  std::string pad(row_vars.size() + 1 + row_bits + 1, ' ');
  out += pad;
  for (const auto& c : cols) out += " " + col_vars + "=" + c;
  out += "\n";
  for (const auto& r : rows) {
    std::string line = row_vars + "=" + r + " ";
    for (const auto& c : cols) {
      uint32_t m = static_cast<uint32_t>(std::stoul(r + c, nullptr, 2));
      std::string cell(col_vars.size() + 1 + col_bits, ' ');
      cell += bit_char(table_value(t, m));
      line += " " + cell;
    }
    out += line + "\n";
  }
  return out;
}

InstructionCodePair instantiate_templates(const LogicProblem& problem, const std::string& template_id) {
  auto ids = template_ids(problem.flavor);
  if (std::find(ids.begin(), ids.end(), template_id) == ids.end())
    throw Error(ErrorCode::IncompatibleTemplate,
                "template '" + template_id + "' does not fit flavor " + to_string(problem.flavor));
  if (problem.flavor == Flavor::ConciseExpression && !problem.minimal)
    throw Error(ErrorCode::PreconditionViolation, "concise problem without a minimal expression");
  const TruthTable& t = problem.table;
  std::string rules = render_uniform_instruction(t).text;
  std::string instruction, code;

  if (template_id == "expr-assign") {
    instruction = "Implement the combinational function below as one continuous assignment using a minimal "
                  "sum-of-products expression. Rows marked \"can be any value\" are don't-cares.\n\n" + rules;
    code = header_with(problem.inputs, false) + "\n  assign out = " + to_verilog(*problem.minimal) + ";\nendmodule\n";
  } else if (template_id == "expr-kmap") {
    instruction = "The Karnaugh map below defines output out; X marks a don't-care. Implement it with a minimal "
                  "sum-of-products expression.\n\n" + render_kmap(t) + "\nThe same function as rules:\n" + rules;
    // A constant body reads no signals, and always @(*) would then never run.
    if (problem.minimal->kind == LogicExpression::Kind::Const)
      code = header_with(problem.inputs, false) + "\n  assign out = " + to_verilog(*problem.minimal) + ";\nendmodule\n";
    else
      code = header_with(problem.inputs, true) + "\n  always @(*) begin\n    out = " + to_verilog(*problem.minimal) +
             ";\n  end\nendmodule\n";
  } else if (template_id == "faithful-case") {
    instruction = "Implement the truth table below exactly with a case statement over the inputs. Rows whose output "
                  "can be any value, and every unlisted combination, belong to the default branch.\n\n" + rules;
    code = header_with(problem.inputs, true) + "\n  always @(*) begin\n    case (" + input_concat(problem.inputs) + ")\n";
    for (const auto& row : t.rows) {
      if (row.out[0] == Bit::DontCare) continue;
      code += "      " + bits_literal(row) + ": out = 1'b" + bit_char(row.out[0]) + ";\n";
    }
    code += "      default: out = 1'b0;\n    endcase\n  end\nendmodule\n";
  } else {
    instruction = "Implement the truth table below with an if / else if chain that checks each listed input "
                  "combination and ends in a final else branch for the remaining cases.\n\n" + rules;
    code = header_with(problem.inputs, true) + "\n  always @(*) begin\n";
    bool first = true;
    for (const auto& row : t.rows) {
      if (row.out[0] == Bit::DontCare) continue;
      std::string cond;
      for (size_t i = 0; i < problem.inputs.size(); ++i)
        cond += (i ? " && " : "") + problem.inputs[i] + " == 1'b" + bit_char(row.in[i]);
      code += std::string(first ? "    if (" : "    else if (") + cond + ") out = 1'b" + bit_char(row.out[0]) + ";\n";
      first = false;
    }
    if (first)
      code = header_with(problem.inputs, false) + "\n  assign out = 1'b0;\nendmodule\n";
    else
      code += "    else out = 1'b0;\n  end\nendmodule\n";
  }

  InstructionCodePair pair;
  pair.instruction = ensure_module_header(instruction, std::nullopt, SymbolicSpec(t));
  pair.code = code;
  pair.stage = Stage::Logic;
  return pair;
}

std::string make_testbench(const LogicProblem& problem) {
  const auto& in = problem.inputs;
  std::string tb = "module tb;\n";
  tb += "  reg ";
  for (size_t i = 0; i < in.size(); ++i) tb += (i ? ", " : "") + in[i];
  tb += ";\n  wire out;\n  integer mismatches;\n  top_module dut(";
  for (const auto& name : in) tb += "." + name + "(" + name + "), ";
  tb += ".out(out));\n  initial begin\n    mismatches = 0;\n";
  int checked = 0;
  for (const auto& row : problem.table.rows) {
    tb += "    " + input_concat(in) + " = " + bits_literal(row) + ";\n    #1;\n";
    if (row.out[0] == Bit::DontCare) continue;
    ++checked;
    std::string want(1, bit_char(row.out[0]));
    tb += "    if (out !== 1'b" + want + ") begin\n      mismatches = mismatches + 1;\n";
    tb += "      $display(\"MISMATCH inputs=" + bits_literal(row).substr(bits_literal(row).find('b') + 1) +
          " out=%b expected " + want + "\", out);\n    end\n";
  }
  tb += "    $display(\"checked " + std::to_string(checked) + " rows, %0d mismatches\", mismatches);\n";
  tb += "    $finish;\n  end\nendmodule\n";
  return tb;
}

// ---- evolution ---------------------------------------------------------------

int check_word_delta(const std::string& original, const std::string& evolved) {
  auto a = split_words(original), b = split_words(evolved);
  std::vector<std::vector<int>> lcs(a.size() + 1, std::vector<int>(b.size() + 1, 0));
  for (size_t i = 1; i <= a.size(); ++i)
    for (size_t j = 1; j <= b.size(); ++j)
      lcs[i][j] = a[i - 1] == b[j - 1] ? lcs[i - 1][j - 1] + 1 : std::max(lcs[i - 1][j], lcs[i][j - 1]);
  return static_cast<int>(a.size() + b.size()) - 2 * lcs[a.size()][b.size()];
}

EvolveResult evolve_instruction(const std::string& instruction, LlmClient& evolver, const EvolveOptions& options) {
  if (trim(instruction).empty()) throw Error(ErrorCode::PreconditionViolation, "instruction is empty");
  EvolveResult r;
  r.text = instruction;
  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    ++r.attempts;
    CompletionRequest req;
    req.template_id = "ldataset.evolve.v1";
    req.substitutions = {{"instruction", instruction}, {"attempt", std::to_string(attempt + 1)}};
    req.temperature = options.temperature;
    std::string candidate;
    try {
      candidate = evolver.complete(req).text;
    } catch (const Error& e) {
      if (!is_llm_error(e.code())) throw;
      spdlog::warn("evolver attempt {} failed: {}", attempt + 1, e.what());
      continue;
    }
    int delta = check_word_delta(instruction, candidate);
    if (!trim(candidate).empty() && delta <= options.max_word_delta) {
      r.text = candidate;
      r.accepted = true;
      r.delta = delta;
      return r;
    }
    spdlog::info("evolved instruction rejected: {} words changed, limit {}", delta, options.max_word_delta);
  }
  spdlog::info("keeping the original instruction after {} attempts", r.attempts);
  return r;
}

// ---- dataset -----------------------------------------------------------------

std::vector<LDatasetItem> generate_l_dataset(const LDatasetParams& params, LlmClient* evolver, int workers) {
  if (params.n_min < 2 || params.n_max > 6 || params.n_min > params.n_max)
    throw Error(ErrorCode::PreconditionViolation, "input counts must satisfy 2 <= n_min <= n_max <= 6");
  return parallel_map<LDatasetItem>(params.count, workers, [&](size_t i) {
    std::mt19937_64 rng(mix_seed(params.seed, i));
    int span = params.n_max - params.n_min + 1;
    int n = params.n_min + static_cast<int>(rng() % static_cast<uint64_t>(span));
    uint64_t table_seed = rng();
    Flavor flavor = i % 2 == 0 ? Flavor::ConciseExpression : Flavor::FaithfulImplementation;
    std::string tid = template_ids(flavor)[(i / 2) % 2];
    if (tid == "expr-kmap" && n > 4) tid = "expr-assign";

    LDatasetItem item;
    item.problem = make_logic_problem(n, params.dont_care_fraction, flavor, table_seed);
    item.template_id = tid;
    item.pair = instantiate_templates(item.problem, tid);
    char id[32];
    std::snprintf(id, sizeof id, "l-%06zu", i);
    item.pair.id = id;
    item.testbench = make_testbench(item.problem);
    if (params.evolve && evolver) {
      auto ev = evolve_instruction(item.pair.instruction, *evolver, params.evolve_options);
      item.evolved = ev.accepted;
      item.pair.instruction = ensure_module_header(ev.text, std::nullopt, SymbolicSpec(item.problem.table));
    }
    return item;
  });
}

Json l_dataset_meta(const LDatasetParams& params) {
  Json seeds = Json::array();
  for (size_t i = 0; i < params.count; ++i) seeds.push_back(mix_seed(params.seed, i));
  return Json{{"generator", "l-dataset"},
              {"count", params.count},
              {"n_min", params.n_min},
              {"n_max", params.n_max},
              {"dont_care_fraction", params.dont_care_fraction},
              {"seed", params.seed},
              {"evolve", params.evolve},
              {"max_word_delta", params.evolve_options.max_word_delta},
              {"max_retries", params.evolve_options.max_retries},
              {"item_seeds", seeds},
              {"table_generator", "mt19937_64 per item, seeded by splitmix64(seed, index)"}};
}

}  // namespace haven
