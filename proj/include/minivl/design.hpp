#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "minivl/ast.hpp"
#include "minivl/value.hpp"

namespace minivl {

class CompileError : public std::runtime_error {
 public:
  CompileError(std::string file, int line, const std::string& msg)
      : std::runtime_error(msg), file_(std::move(file)), line_(line) {}
  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_;
};

struct Signal {
  std::string name;  // hierarchical, e.g. tb.dut.q
  int width = 1;
  int left = 0, right = 0;  // declared range [left:right]
  bool is_signed = false;
  bool is_var = false;   // reg / integer / logic: procedurally assignable
  bool is_net = true;    // wire / logic: continuously assignable
  bool is_array = false;
  int array_left = 0, array_right = 0;
  Logic value;
  std::vector<Logic> words;

  // Bit position (0 = lsb) for a declared index, or -1 when out of range.
  int position(int64_t index) const {
    int64_t pos = left >= right ? index - right : right - index;
    return (pos < 0 || pos >= width) ? -1 : static_cast<int>(pos);
  }
  int word_slot(int64_t index) const {
    int64_t lo = std::min(array_left, array_right), hi = std::max(array_left, array_right);
    if (index < lo || index > hi) return -1;
    return static_cast<int>(index - lo);
  }
};

enum class CExprKind {
  Const,
  String,
  Sig,
  BitSelect,      // args[0] index
  PartSelect,     // const offset/width
  IndexedSelect,  // args[0] start index (declared units), width; up/down in op
  MemWord,        // args[0] index
  Unary,
  Binary,
  Ternary,
  Concat,
  Replicate,      // count in repeat
  Call,
  SysTime,
  SysRandom,
  SysSigned,
  SysUnsigned,
};

struct CExpr {
  CExprKind kind = CExprKind::Const;
  std::string op;
  int sig = -1;
  int func = -1;
  Logic cval;
  std::string str;
  int width = 1;
  bool is_signed = false;
  int offset = 0;  // part select lsb position
  int repeat = 1;
  std::vector<CExpr> args;
};

// One contiguous piece of an assignment target.
struct LvPart {
  enum class Kind { Whole, Bit, Part, Indexed, Word } kind = Kind::Whole;
  int sig = -1;
  int offset = 0;   // Part: lsb position
  int width = 1;
  bool down = false;  // Indexed: -: form
  std::shared_ptr<CExpr> index;
};

struct LValue {
  std::vector<LvPart> parts;  // msb part first
  int width = 0;
};

struct EventSpec {
  ast::EdgeKind edge = ast::EdgeKind::Any;
  CExpr expr;
  std::vector<int> sensitivity;
};

enum class CStmtKind {
  Null, Block, If, Case, For, While, Repeat, Forever, Delay, Event, Wait, Assign, SysTask, Disable
};

struct CStmt {
  CStmtKind kind = CStmtKind::Null;
  int line = 0;
  std::string name;  // block label / system task / disable target
  std::string scope;  // hierarchical scope for %m
  std::vector<CStmt> body;  // Block: statements; If: then[,else]; loops: body
  CExpr cond;
  bool has_cond = false;
  // Case
  std::string case_kind;
  std::vector<std::vector<CExpr>> labels;  // per item; empty => default
  // Assign
  LValue lhs;
  CExpr rhs;
  bool nonblocking = false;
  bool has_delay = false;
  CExpr delay;
  // For loop init/step are stored in body[1], body[2]; body[0] is the loop body.
  std::vector<EventSpec> events;
  std::vector<CExpr> args;  // system task arguments
  std::vector<bool> arg_present;
};

struct ContAssign {
  LValue lhs;
  CExpr rhs;
  std::vector<int> sensitivity;
  std::string scope;
};

struct Process {
  bool is_always = false;
  CStmt body;
  std::string scope;
  int line = 0;
};

struct Function {
  std::string name;
  int result_sig = -1;
  std::vector<int> arg_sigs;
  CStmt body;
};

struct Design {
  std::vector<Signal> signals;
  std::vector<ContAssign> assigns;
  std::vector<Process> processes;
  std::vector<Function> functions;
  std::vector<std::string> tops;
};

struct SourceUnit {
  std::string file;
  ast::SourceFile ast;
};

// Elaborates every top-level module (modules never instantiated by another),
// or only `top` when given. Throws CompileError.
Design elaborate(const std::vector<SourceUnit>& units, const std::string& top = "");

}  // namespace minivl
