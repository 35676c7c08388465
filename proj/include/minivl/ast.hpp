#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace minivl::ast {

struct Expr;
struct Stmt;
using ExprPtr = std::unique_ptr<Expr>;
using StmtPtr = std::unique_ptr<Stmt>;

enum class ExprKind {
  Number,
  String,
  Ident,
  Index,       // base[index]  (bit select or memory word)
  Range,       // base[msb:lsb]
  IndexedUp,   // base[start +: width]
  IndexedDown, // base[start -: width]
  Unary,
  Binary,
  Ternary,
  Concat,
  Replicate,   // {count{parts...}}
  Call,        // user function
  SysCall,     // $time, $signed, ...
};

struct Expr {
  ExprKind kind;
  int line = 0;
  std::string text;  // literal text, identifier, operator, function name
  std::vector<ExprPtr> args;

  Expr(ExprKind k, int l) : kind(k), line(l) {}
};

enum class EdgeKind { Any, Pos, Neg };

struct EventItem {
  EdgeKind edge = EdgeKind::Any;
  ExprPtr expr;
};

enum class StmtKind {
  Null,
  Block,
  If,
  Case,
  For,
  While,
  Repeat,
  Forever,
  Delay,          // #d stmt
  EventControl,   // @(...) stmt ; star == true for @*
  Wait,
  BlockingAssign,
  NonBlockingAssign,
  SysTask,
  TaskCall,
  Disable,
};

struct CaseItem {
  std::vector<ExprPtr> labels;  // empty => default
  StmtPtr body;
};

struct Decl;

struct Stmt {
  StmtKind kind;
  int line = 0;
  std::string name;            // block label, system task name
  std::vector<StmtPtr> body;   // block statements / if-then, if-else / loop body
  ExprPtr cond;                // if condition, loop condition, delay amount, case subject
  ExprPtr lhs, rhs;            // assignments
  ExprPtr intra_delay;         // a = #d b
  StmtPtr init, step;          // for loop
  std::vector<CaseItem> items; // case
  std::string case_kind;       // case / casez / casex
  std::vector<EventItem> events;
  bool star = false;
  std::vector<ExprPtr> args;   // system task args
  std::vector<Decl> decls;     // declarations local to a named block

  Stmt(StmtKind k, int l) : kind(k), line(l) {}
};

struct RangeSpec {
  ExprPtr msb, lsb;
};

enum class DeclKind { Wire, Reg, Integer, Logic, Parameter, Localparam, Genvar, Real, Time };
enum class PortDir { None, Input, Output, Inout };

struct Decl {
  DeclKind kind = DeclKind::Wire;
  PortDir dir = PortDir::None;
  bool is_signed = false;
  bool explicit_type = false;  // "reg"/"wire" spelled in a port declaration
  std::optional<RangeSpec> range;
  std::string name;
  std::optional<RangeSpec> array;  // memory dimension
  ExprPtr init;
  int line = 0;
};

struct Connection {
  std::string port;  // empty for positional
  ExprPtr expr;      // may be null for .p()
  int line = 0;
};

struct Instance {
  std::string module_name;
  std::string instance_name;
  std::vector<Connection> params;
  std::vector<Connection> ports;
  int line = 0;
};

struct ContAssign {
  ExprPtr lhs, rhs;
  int line = 0;
};

enum class ProcessKind { Always, Initial };

struct Process {
  ProcessKind kind = ProcessKind::Always;
  StmtPtr body;
  int line = 0;
};

struct Function {
  std::string name;
  std::optional<RangeSpec> range;
  bool is_signed = false;
  bool returns_integer = false;
  std::vector<Decl> decls;  // inputs and locals in declaration order
  StmtPtr body;
  int line = 0;
};

struct Module {
  std::string name;
  int line = 0;
  std::vector<std::string> port_order;  // header port names
  std::vector<Decl> decls;
  std::vector<ContAssign> assigns;
  std::vector<Process> processes;
  std::vector<Instance> instances;
  std::vector<Function> functions;
  std::vector<std::string> param_order;  // header parameters, for positional overrides
};

struct SourceFile {
  std::vector<Module> modules;
};

}  // namespace minivl::ast
