#include <map>
#include <set>

#include "eval.hpp"
#include "minivl/design.hpp"

namespace minivl {

namespace {

using ast::DeclKind;
using ast::ExprKind;
using ast::PortDir;
using ast::StmtKind;

constexpr int kMaxDepth = 64;

struct Scope {
  std::string path;
  std::string file;
  std::map<std::string, int> signals;
  std::map<std::string, Logic> params;
  std::map<std::string, int> funcs;
  const std::map<std::string, int>* fn_locals = nullptr;
  bool in_function = false;
};

class Elaborator {
 public:
  explicit Elaborator(const std::vector<SourceUnit>& units) {
    for (const auto& u : units) {
      for (const auto& m : u.ast.modules) {
        if (modules_.count(m.name))
          throw CompileError(u.file, m.line, "duplicate definition of module '" + m.name + "'");
        modules_[m.name] = {&m, u.file};
      }
    }
  }

  Design run(const std::string& top) {
    std::vector<std::string> tops;
    if (!top.empty()) {
      if (!modules_.count(top)) throw CompileError("", 0, "top module '" + top + "' not found");
      tops.push_back(top);
    } else {
      std::set<std::string> instantiated;
      for (const auto& [name, entry] : modules_)
        for (const auto& inst : entry.module->instances) instantiated.insert(inst.module_name);
      for (const auto& [name, entry] : modules_)
        if (!instantiated.count(name)) tops.push_back(name);
      if (tops.empty() && !modules_.empty())
        throw CompileError("", 0, "no top-level module (circular instantiation)");
    }
    // Declaration order keeps simulation deterministic and matches source order.
    std::sort(tops.begin(), tops.end(), [&](const std::string& a, const std::string& b) {
      const auto& ea = modules_.at(a);
      const auto& eb = modules_.at(b);
      if (ea.file != eb.file) return ea.file < eb.file;
      return ea.module->line < eb.module->line;
    });
    for (const auto& t : tops) {
      Scope scope;
      elaborate_module(*modules_.at(t).module, modules_.at(t).file, t, {}, 0, scope);
    }
    design_.tops = tops;
    return std::move(design_);
  }

 private:
  struct Entry {
    const ast::Module* module = nullptr;
    std::string file;
  };

  [[noreturn]] void fail(const Scope& s, int line, const std::string& msg) const {
    throw CompileError(s.file, line, msg);
  }

  // ---- constants -----------------------------------------------------------
  Logic const_eval(const ast::Expr& e, Scope& scope) {
    CExpr c = compile_expr(e, scope, true);
    try {
      return Evaluator(nullptr).eval(c);
    } catch (const RuntimeError& err) {
      fail(scope, e.line, err.what());
    }
  }

  int64_t const_int(const ast::Expr& e, Scope& scope) {
    Logic v = const_eval(e, scope);
    if (v.has_unknown()) fail(scope, e.line, "constant expression has unknown bits");
    return v.to_int64();
  }

  std::pair<int, int> range_bounds(const std::optional<ast::RangeSpec>& r, Scope& scope) {
    if (!r) return {0, 0};
    int64_t l = const_int(*r->msb, scope), rr = const_int(*r->lsb, scope);
    int64_t w = (l > rr ? l - rr : rr - l) + 1;
    if (w > Logic::kMaxWidth) fail(scope, r->msb->line, "vectors wider than 64 bits are not supported");
    return {static_cast<int>(l), static_cast<int>(rr)};
  }

  // ---- declarations --------------------------------------------------------
  int add_signal(Scope& scope, const std::string& name, int line, Signal s) {
    if (scope.signals.count(name) || scope.params.count(name))
      fail(scope, line, "duplicate declaration of '" + name + "'");
    s.name = scope.path + "." + name;
    s.value = s.is_var ? Logic::all_x(s.width) : Logic::all_z(s.width);
    s.value.is_signed = s.is_signed;
    if (s.is_array) {
      int n = std::abs(s.array_left - s.array_right) + 1;
      if (n > (1 << 20)) fail(scope, line, "memory too large");
      s.words.assign(static_cast<size_t>(n), Logic::all_x(s.width));
    }
    design_.signals.push_back(std::move(s));
    int id = static_cast<int>(design_.signals.size() - 1);
    scope.signals[name] = id;
    return id;
  }

  Signal make_signal(const ast::Decl& d, Scope& scope) {
    Signal s;
    if (d.kind == DeclKind::Real) fail(scope, d.line, "real variables are not supported");
    if (d.kind == DeclKind::Integer) {
      s.left = 31;
      s.right = 0;
      s.is_signed = true;
    } else if (d.kind == DeclKind::Time) {
      s.left = 63;
      s.right = 0;
    } else {
      auto [l, r] = range_bounds(d.range, scope);
      s.left = l;
      s.right = r;
      s.is_signed = d.is_signed;
    }
    s.width = std::abs(s.left - s.right) + 1;
    s.is_var = d.kind == DeclKind::Reg || d.kind == DeclKind::Integer || d.kind == DeclKind::Logic ||
               d.kind == DeclKind::Time;
    s.is_net = d.kind == DeclKind::Wire || d.kind == DeclKind::Logic;
    if (d.array) {
      s.is_array = true;
      s.array_left = static_cast<int>(const_int(*d.array->msb, scope));
      s.array_right = static_cast<int>(const_int(*d.array->lsb, scope));
    }
    return s;
  }

  void declare_params(const ast::Module& m, Scope& scope, const std::map<std::string, Logic>& overrides,
                      std::set<std::string>& used_overrides) {
    for (const auto& d : m.decls) {
      if (d.kind != DeclKind::Parameter && d.kind != DeclKind::Localparam) continue;
      declare_param(d, scope, d.kind == DeclKind::Parameter ? &overrides : nullptr, &used_overrides);
    }
  }

  void declare_param(const ast::Decl& d, Scope& scope, const std::map<std::string, Logic>* overrides,
                     std::set<std::string>* used) {
    if (scope.params.count(d.name) || scope.signals.count(d.name))
      fail(scope, d.line, "duplicate declaration of '" + d.name + "'");
    Logic v;
    if (overrides && overrides->count(d.name)) {
      v = overrides->at(d.name);
      used->insert(d.name);
    } else {
      if (!d.init) fail(scope, d.line, "parameter '" + d.name + "' has no value");
      v = const_eval(*d.init, scope);
    }
    if (d.range) {
      auto [l, r] = range_bounds(d.range, scope);
      v.is_signed = d.is_signed;
      v = v.resized(std::abs(l - r) + 1);
    } else if (d.is_signed) {
      v = v.as_signed(true).resized(std::max(v.width, 32));
    }
    scope.params[d.name] = v;
  }

  void collect_block_decls(const ast::Stmt& s, std::vector<const ast::Decl*>& out) {
    for (const auto& d : s.decls) out.push_back(&d);
    for (const auto& b : s.body)
      if (b) collect_block_decls(*b, out);
    if (s.init) collect_block_decls(*s.init, out);
    if (s.step) collect_block_decls(*s.step, out);
    for (const auto& item : s.items)
      if (item.body) collect_block_decls(*item.body, out);
  }

  // ---- module elaboration --------------------------------------------------
  void elaborate_module(const ast::Module& m, const std::string& file, const std::string& path,
                        const std::map<std::string, Logic>& overrides, int depth, Scope& scope) {
    if (depth > kMaxDepth) throw CompileError(file, m.line, "instantiation depth exceeds 64 (recursive module?)");
    scope.path = path;
    scope.file = file;

    std::set<std::string> used_overrides;
    declare_params(m, scope, overrides, used_overrides);
    for (const auto& [name, v] : overrides)
      if (!used_overrides.count(name))
        fail(scope, m.line, "module '" + m.name + "' has no parameter '" + name + "'");

    // Ports and variables. A name may appear once with a direction and once
    // with a type (non-ANSI style); the two are merged.
    std::map<std::string, const ast::Decl*> dir_decls, type_decls;
    std::vector<std::string> order;
    for (const auto& d : m.decls) {
      if (d.kind == DeclKind::Parameter || d.kind == DeclKind::Localparam) continue;
      if (d.kind == DeclKind::Genvar) fail(scope, d.line, "genvar is not supported");
      auto& slot = d.dir != PortDir::None ? dir_decls : type_decls;
      if (slot.count(d.name)) fail(scope, d.line, "duplicate declaration of '" + d.name + "'");
      if (d.dir == PortDir::Inout) fail(scope, d.line, "inout ports are not supported");
      slot[d.name] = &d;
      if (!dir_decls.count(d.name) || !type_decls.count(d.name)) order.push_back(d.name);
    }
    std::set<std::string> port_set(m.port_order.begin(), m.port_order.end());
    if (port_set.size() != m.port_order.size()) fail(scope, m.line, "duplicate port in port list");
    for (const auto& p : m.port_order)
      if (!dir_decls.count(p)) fail(scope, m.line, "port '" + p + "' has no direction declaration");
    for (const auto& [name, d] : dir_decls)
      if (!port_set.count(name)) fail(scope, d->line, "'" + name + "' is declared as a port but not in the port list");

    std::vector<std::pair<int, const ast::Expr*>> var_inits;
    std::vector<std::pair<std::string, const ast::Decl*>> net_inits;
    for (const auto& name : order) {
      const ast::Decl* dd = dir_decls.count(name) ? dir_decls[name] : nullptr;
      const ast::Decl* td = type_decls.count(name) ? type_decls[name] : nullptr;
      Signal s;
      int line;
      if (dd && td) {
        if (dd->explicit_type && td->kind != DeclKind::Wire)
          fail(scope, td->line, "duplicate declaration of '" + name + "'");
        s = make_signal(*td, scope);
        if (td->kind == DeclKind::Wire && dd->range) s = make_signal(*dd, scope);
        if (dd->is_signed) s.is_signed = true;
        if (td->array) fail(scope, td->line, "port '" + name + "' cannot be a memory");
        line = td->line;
      } else {
        const ast::Decl* d = dd ? dd : td;
        s = make_signal(*d, scope);
        line = d->line;
      }
      int id = add_signal(scope, name, line, std::move(s));
      for (const ast::Decl* d : {dd, td}) {
        if (!d || !d->init) continue;
        if (design_.signals[static_cast<size_t>(id)].is_var)
          var_inits.emplace_back(id, d->init.get());
        else
          net_inits.emplace_back(name, d);
      }
    }
    for (const auto& proc : m.processes) {
      std::vector<const ast::Decl*> locals;
      collect_block_decls(*proc.body, locals);
      for (const ast::Decl* d : locals) {
        if (d->kind == DeclKind::Parameter || d->kind == DeclKind::Localparam) {
          declare_param(*d, scope, nullptr, nullptr);
        } else {
          int id = add_signal(scope, d->name, d->line, make_signal(*d, scope));
          if (d->init) var_inits.emplace_back(id, d->init.get());
        }
      }
    }

    for (auto& [id, init] : var_inits) {
      Signal& s = design_.signals[static_cast<size_t>(id)];
      Logic v = const_eval(*init, scope);
      v = v.resized(s.width);
      v.is_signed = s.is_signed;
      design_.signals[static_cast<size_t>(id)].value = v;
    }

    // Functions are declared before any body refers to them.
    for (const auto& f : m.functions) declare_function(f, scope);

    // Implicit nets: undeclared identifiers on continuous-assignment targets
    // and in port connections become 1-bit wires.
    for (const auto& a : m.assigns) declare_implicit(*a.lhs, scope);
    for (const auto& inst : m.instances)
      for (const auto& c : inst.ports)
        if (c.expr) declare_implicit(*c.expr, scope);

    for (const auto& [name, d] : net_inits) {
      ContAssign ca;
      ca.scope = scope.path;
      ast::Expr lhs(ExprKind::Ident, d->line);
      lhs.text = name;
      ca.lhs = compile_lvalue(lhs, scope, false);
      ca.rhs = compile_expr(*d->init, scope, false);
      finish_assign(ca);
    }
    for (const auto& a : m.assigns) {
      ContAssign ca;
      ca.scope = scope.path;
      ca.lhs = compile_lvalue(*a.lhs, scope, false);
      ca.rhs = compile_expr(*a.rhs, scope, false);
      finish_assign(ca);
    }

    for (const auto& inst : m.instances) instantiate(inst, scope, depth);

    for (const auto& proc : m.processes) {
      Process p;
      p.is_always = proc.kind == ast::ProcessKind::Always;
      p.scope = scope.path;
      p.line = proc.line;
      p.body = compile_stmt(*proc.body, scope);
      if (p.is_always && !has_timing(p.body))
        fail(scope, proc.line, "always block has no timing control and would loop forever");
      design_.processes.push_back(std::move(p));
    }
  }

  void declare_implicit(const ast::Expr& e, Scope& scope) {
    if (e.kind == ExprKind::Ident) {
      if (e.text.find('.') == std::string::npos && !scope.signals.count(e.text) && !scope.params.count(e.text)) {
        Signal s;
        s.is_net = true;
        add_signal(scope, e.text, e.line, std::move(s));
      }
    } else if (e.kind == ExprKind::Concat) {
      for (const auto& a : e.args) declare_implicit(*a, scope);
    }
  }

  void finish_assign(ContAssign& ca) {
    std::set<int> reads;
    collect_reads(ca.rhs, reads);
    for (const auto& p : ca.lhs.parts)
      if (p.index) collect_reads(*p.index, reads);
    ca.sensitivity.assign(reads.begin(), reads.end());
    design_.assigns.push_back(std::move(ca));
  }

  void declare_function(const ast::Function& f, Scope& scope) {
    if (scope.funcs.count(f.name) || scope.signals.count(f.name))
      fail(scope, f.line, "duplicate declaration of '" + f.name + "'");
    Function fn;
    fn.name = f.name;
    auto locals = std::make_unique<std::map<std::string, int>>();
    Scope inner = scope;  // params and module signals stay visible
    inner.in_function = true;
    Signal result;
    if (f.returns_integer) {
      result.left = 31;
      result.is_signed = true;
    } else {
      auto [l, r] = range_bounds(f.range, scope);
      result.left = l;
      result.right = r;
      result.is_signed = f.is_signed;
    }
    result.width = std::abs(result.left - result.right) + 1;
    result.is_var = true;
    result.is_net = false;
    result.name = scope.path + "." + f.name;
    result.value = Logic::all_x(result.width);
    design_.signals.push_back(result);
    fn.result_sig = static_cast<int>(design_.signals.size() - 1);
    (*locals)[f.name] = fn.result_sig;
    for (const auto& d : f.decls) {
      if (d.kind == DeclKind::Parameter || d.kind == DeclKind::Localparam) {
        declare_param(d, inner, nullptr, nullptr);
        continue;
      }
      if (locals->count(d.name)) fail(scope, d.line, "duplicate declaration of '" + d.name + "'");
      Signal s = make_signal(d, scope);
      s.is_var = true;
      s.is_net = false;
      s.name = scope.path + "." + f.name + "." + d.name;
      s.value = Logic::all_x(s.width);
      s.value.is_signed = s.is_signed;
      design_.signals.push_back(std::move(s));
      int id = static_cast<int>(design_.signals.size() - 1);
      (*locals)[d.name] = id;
      if (d.dir == PortDir::Input) fn.arg_sigs.push_back(id);
    }
    std::vector<const ast::Decl*> block_locals;
    collect_block_decls(*f.body, block_locals);
    for (const ast::Decl* d : block_locals) {
      Signal s = make_signal(*d, scope);
      s.name = scope.path + "." + f.name + "." + d->name;
      s.value = Logic::all_x(s.width);
      design_.signals.push_back(std::move(s));
      (*locals)[d->name] = static_cast<int>(design_.signals.size() - 1);
    }
    int index = static_cast<int>(design_.functions.size());
    design_.functions.push_back(std::move(fn));
    scope.funcs[f.name] = index;
    inner.funcs[f.name] = index;  // recursion resolves, though static storage makes it unsafe
    inner.fn_locals = locals.get();
    design_.functions[static_cast<size_t>(index)].body = compile_stmt(*f.body, inner);
    function_locals_.push_back(std::move(locals));
  }

  void instantiate(const ast::Instance& inst, Scope& parent, int depth) {
    auto it = modules_.find(inst.module_name);
    if (it == modules_.end()) fail(parent, inst.line, "unknown module '" + inst.module_name + "'");
    const ast::Module& child = *it->second.module;

    std::map<std::string, Logic> overrides;
    std::vector<std::string> positional_params = child.param_order;
    if (positional_params.empty())
      for (const auto& d : child.decls)
        if (d.kind == DeclKind::Parameter) positional_params.push_back(d.name);
    for (size_t i = 0; i < inst.params.size(); ++i) {
      const auto& c = inst.params[i];
      std::string name = c.port;
      if (name.empty()) {
        if (i >= positional_params.size())
          fail(parent, c.line, "too many parameter overrides for '" + inst.module_name + "'");
        name = positional_params[i];
      }
      if (!c.expr) continue;
      overrides[name] = const_eval(*c.expr, parent);
    }

    Scope child_scope;
    if (parent.signals.count(inst.instance_name) || parent.params.count(inst.instance_name))
      fail(parent, inst.line, "instance name '" + inst.instance_name + "' clashes with a declaration");
    elaborate_module(child, it->second.file, parent.path + "." + inst.instance_name, overrides, depth + 1,
                     child_scope);

    std::set<std::string> connected;
    for (size_t i = 0; i < inst.ports.size(); ++i) {
      const auto& c = inst.ports[i];
      std::string port = c.port;
      if (port.empty()) {
        if (i >= child.port_order.size())
          fail(parent, c.line, "too many port connections for '" + inst.module_name + "'");
        port = child.port_order[i];
      }
      if (std::find(child.port_order.begin(), child.port_order.end(), port) == child.port_order.end())
        fail(parent, c.line, "module '" + inst.module_name + "' has no port '" + port + "'");
      if (!connected.insert(port).second) fail(parent, c.line, "port '" + port + "' connected twice");
      if (!c.expr) continue;
      int child_sig = child_scope.signals.at(port);
      PortDir dir = PortDir::Input;
      for (const auto& d : child.decls)
        if (d.name == port && d.dir != PortDir::None) dir = d.dir;
      const Signal& cs = design_.signals[static_cast<size_t>(child_sig)];
      ContAssign ca;
      ca.scope = parent.path;
      if (dir == PortDir::Input) {
        ca.lhs.parts.push_back(LvPart{LvPart::Kind::Whole, child_sig, 0, cs.width, false, nullptr});
        ca.lhs.width = cs.width;
        ca.rhs = compile_expr(*c.expr, parent, false);
      } else {
        ca.lhs = compile_lvalue(*c.expr, parent, false);
        CExpr src;
        src.kind = CExprKind::Sig;
        src.sig = child_sig;
        src.width = cs.width;
        src.is_signed = cs.is_signed;
        ca.rhs = src;
      }
      finish_assign(ca);
    }
  }

  static bool has_timing(const CStmt& s) {
    if (s.kind == CStmtKind::Delay || s.kind == CStmtKind::Event || s.kind == CStmtKind::Wait) return true;
    if (s.kind == CStmtKind::Assign && s.has_delay) return true;
    for (const auto& b : s.body)
      if (has_timing(b)) return true;
    return false;
  }

  // ---- expressions ---------------------------------------------------------
  int lookup_signal(const Scope& scope, const std::string& name) const {
    if (scope.fn_locals) {
      auto it = scope.fn_locals->find(name);
      if (it != scope.fn_locals->end()) return it->second;
    }
    auto it = scope.signals.find(name);
    return it == scope.signals.end() ? -1 : it->second;
  }

  CExpr make_const(Logic v) {
    CExpr c;
    c.kind = CExprKind::Const;
    c.cval = v;
    c.width = v.width;
    c.is_signed = v.is_signed;
    return c;
  }

  CExpr compile_expr(const ast::Expr& e, Scope& scope, bool constant) {
    switch (e.kind) {
      case ExprKind::Number: {
        try {
          return make_const(parse_number(e.text));
        } catch (const std::invalid_argument& err) {
          fail(scope, e.line, err.what());
        }
      }
      case ExprKind::String: {
        CExpr c;
        c.kind = CExprKind::String;
        c.str = e.text;
        uint64_t packed = 0;
        size_t start = e.text.size() > 8 ? e.text.size() - 8 : 0;
        for (size_t i = start; i < e.text.size(); ++i)
          packed = (packed << 8) | static_cast<unsigned char>(e.text[i]);
        c.width = std::max<int>(8, static_cast<int>(std::min<size_t>(e.text.size(), 8) * 8));
        c.cval = Logic::known(packed, c.width);
        return c;
      }
      case ExprKind::Ident: {
        if (e.text.find('.') != std::string::npos)
          fail(scope, e.line, "hierarchical reference '" + e.text + "' is not supported");
        if (!constant) {
          int id = lookup_signal(scope, e.text);
          if (id >= 0) {
            const Signal& s = design_.signals[static_cast<size_t>(id)];
            if (s.is_array) fail(scope, e.line, "memory '" + e.text + "' used without an index");
            CExpr c;
            c.kind = CExprKind::Sig;
            c.sig = id;
            c.width = s.width;
            c.is_signed = s.is_signed;
            return c;
          }
        }
        auto pit = scope.params.find(e.text);
        if (pit != scope.params.end()) return make_const(pit->second);
        if (constant && lookup_signal(scope, e.text) >= 0)
          fail(scope, e.line, "'" + e.text + "' is not a constant");
        fail(scope, e.line, "undeclared identifier '" + e.text + "'");
      }
      case ExprKind::Index:
      case ExprKind::Range:
      case ExprKind::IndexedUp:
      case ExprKind::IndexedDown:
        return compile_select(e, scope, constant);
      case ExprKind::Unary: {
        CExpr c;
        c.kind = CExprKind::Unary;
        c.op = e.text;
        c.args.push_back(compile_expr(*e.args[0], scope, constant));
        if (e.text == "~" || e.text == "-" || e.text == "+") {
          c.width = c.args[0].width;
          c.is_signed = c.args[0].is_signed;
        } else {
          c.width = 1;
        }
        return c;
      }
      case ExprKind::Binary: {
        CExpr c;
        c.kind = CExprKind::Binary;
        c.op = e.text;
        c.args.push_back(compile_expr(*e.args[0], scope, constant));
        c.args.push_back(compile_expr(*e.args[1], scope, constant));
        const CExpr& l = c.args[0];
        const CExpr& r = c.args[1];
        const std::string& op = e.text;
        if (op == "&&" || op == "||" || op == "==" || op == "!=" || op == "===" || op == "!==" ||
            op == "<" || op == "<=" || op == ">" || op == ">=") {
          c.width = 1;
        } else if (op == "<<" || op == ">>" || op == "<<<" || op == ">>>" || op == "**") {
          c.width = l.width;
          c.is_signed = op == "**" ? (l.is_signed && r.is_signed) : l.is_signed;
        } else {
          c.width = std::max(l.width, r.width);
          c.is_signed = l.is_signed && r.is_signed;
        }
        return c;
      }
      case ExprKind::Ternary: {
        CExpr c;
        c.kind = CExprKind::Ternary;
        for (const auto& a : e.args) c.args.push_back(compile_expr(*a, scope, constant));
        c.width = std::max(c.args[1].width, c.args[2].width);
        c.is_signed = c.args[1].is_signed && c.args[2].is_signed;
        return c;
      }
      case ExprKind::Concat:
      case ExprKind::Replicate: {
        CExpr c;
        c.kind = e.kind == ExprKind::Concat ? CExprKind::Concat : CExprKind::Replicate;
        size_t first = 0;
        if (e.kind == ExprKind::Replicate) {
          int64_t n = const_int(*e.args[0], scope);
          if (n < 0) fail(scope, e.line, "negative replication count");
          c.repeat = static_cast<int>(n);
          first = 1;
        }
        int total = 0;
        for (size_t i = first; i < e.args.size(); ++i) {
          CExpr p = compile_expr(*e.args[i], scope, constant);
          if (p.kind == CExprKind::Const && e.args[i]->kind == ExprKind::Number &&
              e.args[i]->text.find('\'') == std::string::npos)
            fail(scope, e.line, "unsized constant in concatenation");
          total += p.width;
          c.args.push_back(std::move(p));
        }
        c.width = total * c.repeat;
        if (c.width > Logic::kMaxWidth) fail(scope, e.line, "concatenation wider than 64 bits is not supported");
        if (c.width == 0) fail(scope, e.line, "zero-width concatenation");
        return c;
      }
      case ExprKind::Call: {
        if (constant) fail(scope, e.line, "function call in constant expression is not supported");
        auto it = scope.funcs.find(e.text);
        if (it == scope.funcs.end()) fail(scope, e.line, "unknown function '" + e.text + "'");
        const Function& fn = design_.functions[static_cast<size_t>(it->second)];
        if (fn.arg_sigs.size() != e.args.size())
          fail(scope, e.line, "function '" + e.text + "' expects " + std::to_string(fn.arg_sigs.size()) + " arguments");
        CExpr c;
        c.kind = CExprKind::Call;
        c.func = it->second;
        for (const auto& a : e.args) c.args.push_back(compile_expr(*a, scope, constant));
        const Signal& r = design_.signals[static_cast<size_t>(fn.result_sig)];
        c.width = r.width;
        c.is_signed = r.is_signed;
        return c;
      }
      case ExprKind::SysCall: {
        const std::string& n = e.text;
        CExpr c;
        if (n == "$time" || n == "$stime" || n == "$realtime") {
          c.kind = CExprKind::SysTime;
          c.width = 64;
          return c;
        }
        if (n == "$random" || n == "$urandom") {
          c.kind = CExprKind::SysRandom;
          c.width = 32;
          c.is_signed = n == "$random";
          return c;
        }
        if (n == "$signed" || n == "$unsigned") {
          if (e.args.size() != 1) fail(scope, e.line, n + " takes one argument");
          c.kind = n == "$signed" ? CExprKind::SysSigned : CExprKind::SysUnsigned;
          c.args.push_back(compile_expr(*e.args[0], scope, constant));
          c.width = c.args[0].width;
          c.is_signed = n == "$signed";
          return c;
        }
        if (n == "$clog2") {
          if (e.args.size() != 1) fail(scope, e.line, "$clog2 takes one argument");
          int64_t v = const_int(*e.args[0], scope);
          int64_t r = 0;
          while ((int64_t{1} << r) < v) ++r;
          return make_const(Logic::known(static_cast<uint64_t>(r), 32, true));
        }
        fail(scope, e.line, "unsupported system function '" + n + "'");
      }
    }
    fail(scope, e.line, "unsupported expression");
  }

  CExpr compile_select(const ast::Expr& e, Scope& scope, bool constant) {
    const ast::Expr& base = *e.args[0];
    if (base.kind != ExprKind::Ident)
      fail(scope, e.line, "only identifiers can be indexed");
    int id = constant ? -1 : lookup_signal(scope, base.text);
    if (id < 0) {
      auto pit = scope.params.find(base.text);
      if (pit == scope.params.end()) {
        if (base.text.find('.') != std::string::npos)
          fail(scope, e.line, "hierarchical reference '" + base.text + "' is not supported");
        fail(scope, e.line, "undeclared identifier '" + base.text + "'");
      }
      // select on a parameter: treat the parameter as [width-1:0]
      Logic pv = pit->second;
      if (e.kind == ExprKind::Index) {
        int64_t i = const_int(*e.args[1], scope);
        if (i < 0 || i >= pv.width) return make_const(Logic::all_x(1));
        return make_const(Logic{(pv.val >> i) & 1, (pv.xz >> i) & 1, 1, false});
      }
      if (e.kind == ExprKind::Range) {
        int64_t a = const_int(*e.args[1], scope), b = const_int(*e.args[2], scope);
        int64_t lo = std::min(a, b), w = std::abs(a - b) + 1;
        if (lo < 0 || lo + w > pv.width) fail(scope, e.line, "part-select out of range");
        Logic r{(pv.val >> lo) & Logic::mask(static_cast<int>(w)), (pv.xz >> lo) & Logic::mask(static_cast<int>(w)),
                static_cast<int>(w), false};
        return make_const(r);
      }
      fail(scope, e.line, "indexed part-select of a parameter is not supported");
    }
    const Signal& s = design_.signals[static_cast<size_t>(id)];
    CExpr c;
    c.sig = id;
    if (s.is_array) {
      if (e.kind != ExprKind::Index) fail(scope, e.line, "part-select of a memory is not supported");
      c.kind = CExprKind::MemWord;
      c.args.push_back(compile_expr(*e.args[1], scope, constant));
      c.width = s.width;
      c.is_signed = s.is_signed;
      return c;
    }
    if (e.kind == ExprKind::Index) {
      c.kind = CExprKind::BitSelect;
      c.args.push_back(compile_expr(*e.args[1], scope, constant));
      c.width = 1;
      return c;
    }
    if (e.kind == ExprKind::Range) {
      int64_t a = const_int(*e.args[1], scope), b = const_int(*e.args[2], scope);
      int p1 = s.position(a), p2 = s.position(b);
      if (p1 < 0 || p2 < 0) fail(scope, e.line, "part-select [" + std::to_string(a) + ":" + std::to_string(b) +
                                                    "] out of range for '" + base.text + "'");
      c.kind = CExprKind::PartSelect;
      c.offset = std::min(p1, p2);
      c.width = std::abs(p1 - p2) + 1;
      return c;
    }
    int64_t w = const_int(*e.args[2], scope);
    if (w <= 0 || w > s.width) fail(scope, e.line, "bad indexed part-select width");
    c.kind = CExprKind::IndexedSelect;
    c.op = e.kind == ExprKind::IndexedUp ? "+:" : "-:";
    c.args.push_back(compile_expr(*e.args[1], scope, constant));
    c.width = static_cast<int>(w);
    return c;
  }

  LValue compile_lvalue(const ast::Expr& e, Scope& scope, bool procedural) {
    LValue lv;
    append_lvalue(e, scope, procedural, lv);
    return lv;
  }

  void append_lvalue(const ast::Expr& e, Scope& scope, bool procedural, LValue& lv) {
    if (e.kind == ExprKind::Concat) {
      for (const auto& a : e.args) append_lvalue(*a, scope, procedural, lv);
      return;
    }
    const ast::Expr* base = &e;
    if (e.kind != ExprKind::Ident) {
      if (e.kind != ExprKind::Index && e.kind != ExprKind::Range && e.kind != ExprKind::IndexedUp &&
          e.kind != ExprKind::IndexedDown)
        fail(scope, e.line, "invalid assignment target");
      base = e.args[0].get();
      if (base->kind != ExprKind::Ident) fail(scope, e.line, "invalid assignment target");
    }
    if (base->text.find('.') != std::string::npos)
      fail(scope, e.line, "hierarchical reference '" + base->text + "' is not supported");
    int id = lookup_signal(scope, base->text);
    if (id < 0) {
      if (scope.params.count(base->text)) fail(scope, e.line, "cannot assign to parameter '" + base->text + "'");
      fail(scope, e.line, "undeclared identifier '" + base->text + "'");
    }
    const Signal& s = design_.signals[static_cast<size_t>(id)];
    if (procedural && !s.is_var)
      fail(scope, e.line, "procedural assignment to net '" + base->text + "' (declare it as reg)");
    if (!procedural && !s.is_net)
      fail(scope, e.line, "continuous assignment to reg '" + base->text + "'");
    LvPart part;
    part.sig = id;
    if (e.kind == ExprKind::Ident) {
      if (s.is_array) fail(scope, e.line, "memory '" + base->text + "' assigned without an index");
      part.kind = LvPart::Kind::Whole;
      part.width = s.width;
    } else if (s.is_array) {
      if (e.kind != ExprKind::Index) fail(scope, e.line, "part-select of a memory is not supported");
      part.kind = LvPart::Kind::Word;
      part.width = s.width;
      part.index = std::make_shared<CExpr>(compile_expr(*e.args[1], scope, false));
    } else if (e.kind == ExprKind::Index) {
      part.kind = LvPart::Kind::Bit;
      part.width = 1;
      part.index = std::make_shared<CExpr>(compile_expr(*e.args[1], scope, false));
    } else if (e.kind == ExprKind::Range) {
      int64_t a = const_int(*e.args[1], scope), b = const_int(*e.args[2], scope);
      int p1 = s.position(a), p2 = s.position(b);
      if (p1 < 0 || p2 < 0) fail(scope, e.line, "part-select out of range for '" + base->text + "'");
      part.kind = LvPart::Kind::Part;
      part.offset = std::min(p1, p2);
      part.width = std::abs(p1 - p2) + 1;
    } else {
      int64_t w = const_int(*e.args[2], scope);
      if (w <= 0 || w > s.width) fail(scope, e.line, "bad indexed part-select width");
      part.kind = LvPart::Kind::Indexed;
      part.down = e.kind == ExprKind::IndexedDown;
      part.width = static_cast<int>(w);
      part.index = std::make_shared<CExpr>(compile_expr(*e.args[1], scope, false));
    }
    lv.width += part.width;
    if (lv.width > Logic::kMaxWidth) fail(scope, e.line, "assignment target wider than 64 bits is not supported");
    lv.parts.push_back(std::move(part));
  }

  static void collect_reads(const CExpr& e, std::set<int>& out) {
    switch (e.kind) {
      case CExprKind::Sig:
      case CExprKind::BitSelect:
      case CExprKind::PartSelect:
      case CExprKind::IndexedSelect:
      case CExprKind::MemWord:
        out.insert(e.sig);
        break;
      default:
        break;
    }
    for (const auto& a : e.args) collect_reads(a, out);
  }

  static void collect_stmt_reads(const CStmt& s, std::set<int>& out) {
    if (s.has_cond) collect_reads(s.cond, out);
    if (s.kind == CStmtKind::Assign) {
      collect_reads(s.rhs, out);
      for (const auto& p : s.lhs.parts)
        if (p.index) collect_reads(*p.index, out);
    }
    for (const auto& items : s.labels)
      for (const auto& l : items) collect_reads(l, out);
    for (const auto& a : s.args) collect_reads(a, out);
    for (const auto& b : s.body) collect_stmt_reads(b, out);
  }

  // ---- statements ----------------------------------------------------------
  CStmt compile_stmt(const ast::Stmt& s, Scope& scope) {
    CStmt c;
    c.line = s.line;
    c.scope = scope.path;
    switch (s.kind) {
      case StmtKind::Null:
        c.kind = CStmtKind::Null;
        break;
      case StmtKind::Block:
        c.kind = CStmtKind::Block;
        c.name = s.name;
        for (const auto& b : s.body) c.body.push_back(compile_stmt(*b, scope));
        break;
      case StmtKind::If:
        c.kind = CStmtKind::If;
        c.cond = compile_expr(*s.cond, scope, false);
        c.has_cond = true;
        c.body.push_back(compile_stmt(*s.body[0], scope));
        if (s.body.size() > 1) c.body.push_back(compile_stmt(*s.body[1], scope));
        break;
      case StmtKind::Case:
        c.kind = CStmtKind::Case;
        c.case_kind = s.case_kind;
        c.cond = compile_expr(*s.cond, scope, false);
        c.has_cond = true;
        for (const auto& item : s.items) {
          std::vector<CExpr> labels;
          for (const auto& l : item.labels) labels.push_back(compile_expr(*l, scope, false));
          c.labels.push_back(std::move(labels));
          c.body.push_back(compile_stmt(*item.body, scope));
        }
        break;
      case StmtKind::For:
        c.kind = CStmtKind::For;
        c.cond = compile_expr(*s.cond, scope, false);
        c.has_cond = true;
        c.body.push_back(compile_stmt(*s.body[0], scope));
        c.body.push_back(compile_stmt(*s.init, scope));
        c.body.push_back(compile_stmt(*s.step, scope));
        break;
      case StmtKind::While:
      case StmtKind::Repeat:
        c.kind = s.kind == StmtKind::While ? CStmtKind::While : CStmtKind::Repeat;
        c.cond = compile_expr(*s.cond, scope, false);
        c.has_cond = true;
        c.body.push_back(compile_stmt(*s.body[0], scope));
        break;
      case StmtKind::Forever:
        c.kind = CStmtKind::Forever;
        c.body.push_back(compile_stmt(*s.body[0], scope));
        break;
      case StmtKind::Delay:
        if (scope.in_function) fail(scope, s.line, "delay inside a function");
        c.kind = CStmtKind::Delay;
        c.delay = compile_expr(*s.cond, scope, false);
        c.body.push_back(compile_stmt(*s.body[0], scope));
        break;
      case StmtKind::EventControl: {
        if (scope.in_function) fail(scope, s.line, "event control inside a function");
        c.kind = CStmtKind::Event;
        c.body.push_back(compile_stmt(*s.body[0], scope));
        if (s.star) {
          std::set<int> reads;
          collect_stmt_reads(c.body[0], reads);
          for (int id : reads) {
            EventSpec ev;
            ev.expr.kind = CExprKind::Sig;
            ev.expr.sig = id;
            ev.expr.width = design_.signals[static_cast<size_t>(id)].width;
            ev.sensitivity.push_back(id);
            c.events.push_back(std::move(ev));
          }
        } else {
          for (const auto& item : s.events) {
            EventSpec ev;
            ev.edge = item.edge;
            if (item.expr->kind == ExprKind::Ident) {
              int id = lookup_signal(scope, item.expr->text);
              if (id >= 0 && design_.signals[static_cast<size_t>(id)].is_array) {
                ev.expr.kind = CExprKind::Sig;
                ev.expr.sig = id;
                ev.sensitivity.push_back(id);
                c.events.push_back(std::move(ev));
                continue;
              }
            }
            ev.expr = compile_expr(*item.expr, scope, false);
            std::set<int> reads;
            collect_reads(ev.expr, reads);
            ev.sensitivity.assign(reads.begin(), reads.end());
            c.events.push_back(std::move(ev));
          }
        }
        break;
      }
      case StmtKind::Wait: {
        if (scope.in_function) fail(scope, s.line, "wait inside a function");
        c.kind = CStmtKind::Wait;
        c.cond = compile_expr(*s.cond, scope, false);
        c.has_cond = true;
        std::set<int> reads;
        collect_reads(c.cond, reads);
        EventSpec ev;
        ev.expr = c.cond;
        ev.sensitivity.assign(reads.begin(), reads.end());
        c.events.push_back(std::move(ev));
        c.body.push_back(compile_stmt(*s.body[0], scope));
        break;
      }
      case StmtKind::BlockingAssign:
      case StmtKind::NonBlockingAssign:
        c.kind = CStmtKind::Assign;
        c.nonblocking = s.kind == StmtKind::NonBlockingAssign;
        c.lhs = compile_lvalue(*s.lhs, scope, true);
        c.rhs = compile_expr(*s.rhs, scope, false);
        if (s.intra_delay) {
          if (scope.in_function) fail(scope, s.line, "delay inside a function");
          c.has_delay = true;
          c.delay = compile_expr(*s.intra_delay, scope, false);
        }
        break;
      case StmtKind::SysTask:
        compile_systask(s, scope, c);
        break;
      case StmtKind::TaskCall:
        fail(scope, s.line, "task '" + s.name + "' is not supported (user tasks are outside the supported subset)");
      case StmtKind::Disable:
        c.kind = CStmtKind::Disable;
        c.name = s.name;
        break;
    }
    return c;
  }

  void compile_systask(const ast::Stmt& s, Scope& scope, CStmt& c) {
    static const std::set<std::string> kDisplay = {"$display", "$write", "$strobe", "$error", "$warning",
                                                   "$info", "$fatal", "$displayb", "$displayh"};
    static const std::set<std::string> kIgnored = {"$dumpfile", "$dumpvars", "$timeformat", "$dumpon",
                                                   "$dumpoff", "$dumpflush", "$dumpall"};
    c.kind = CStmtKind::SysTask;
    c.name = s.name;
    if (s.name == "$finish" || s.name == "$stop") return;
    if (kIgnored.count(s.name)) {
      c.kind = CStmtKind::Null;
      return;
    }
    if (!kDisplay.count(s.name)) fail(scope, s.line, "unsupported system task '" + s.name + "'");
    for (const auto& a : s.args) {
      c.arg_present.push_back(a != nullptr);
      c.args.push_back(a ? compile_expr(*a, scope, false) : CExpr{});
    }
  }

  std::map<std::string, Entry> modules_;
  Design design_;
  std::vector<std::unique_ptr<std::map<std::string, int>>> function_locals_;
};

}  // namespace

Design elaborate(const std::vector<SourceUnit>& units, const std::string& top) {
  return Elaborator(units).run(top);
}

}  // namespace minivl
