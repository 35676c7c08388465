#include "minivl/parser.hpp"

#include <unordered_set>

namespace minivl {

using namespace ast;

namespace {

const std::unordered_set<std::string_view> kGatePrimitives = {"and", "or",  "nand", "nor",
                                                             "xor", "xnor", "not", "buf"};

class Parser {
 public:
  explicit Parser(const std::vector<Token>& toks) : toks_(toks) {}

  SourceFile run() {
    SourceFile file;
    while (!at_eof()) {
      if (peek().is_ident("module") || peek().is_ident("macromodule")) {
        file.modules.push_back(module());
      } else {
        fail("expected 'module', found '" + describe(peek()) + "'");
      }
    }
    return file;
  }

 private:
  // ---- token helpers -------------------------------------------------------
  const Token& peek(size_t ahead = 0) const {
    size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  bool at_eof() const { return peek().kind == TokenKind::EndOfFile; }
  const Token& advance() {
    const Token& t = peek();
    if (!at_eof()) ++pos_;
    return t;
  }
  static std::string describe(const Token& t) {
    return t.kind == TokenKind::EndOfFile ? std::string("end of file") : t.text;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(peek().line, msg); }

  bool accept_op(std::string_view op) {
    if (peek().is_op(op)) {
      advance();
      return true;
    }
    return false;
  }
  bool accept_kw(std::string_view kw) {
    if (peek().is_ident(kw)) {
      advance();
      return true;
    }
    return false;
  }
  void expect_op(std::string_view op) {
    if (!accept_op(op)) fail("expected '" + std::string(op) + "', found '" + describe(peek()) + "'");
  }
  void expect_kw(std::string_view kw) {
    if (!accept_kw(kw)) fail("expected '" + std::string(kw) + "', found '" + describe(peek()) + "'");
  }
  std::string identifier(const char* what = "identifier") {
    const Token& t = peek();
    if (t.kind != TokenKind::Identifier || is_keyword(t.text))
      fail(std::string("expected ") + what + ", found '" + describe(t) + "'");
    advance();
    return t.text;
  }
  bool peek_plain_ident(size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Identifier && !is_keyword(t.text);
  }

  // ---- module level --------------------------------------------------------
  Module module() {
    Module m;
    m.line = peek().line;
    advance();  // module
    m.name = identifier("module name");
    if (accept_op("#")) {
      expect_op("(");
      if (!peek().is_op(")")) {
        do {
          accept_kw("parameter");
          header_param(m);
        } while (accept_op(","));
      }
      expect_op(")");
    }
    if (accept_op("(")) {
      if (!peek().is_op(")")) port_list(m);
      expect_op(")");
    }
    expect_op(";");
    while (!peek().is_ident("endmodule")) {
      if (at_eof()) fail("missing 'endmodule' for module '" + m.name + "'");
      module_item(m);
    }
    advance();
    return m;
  }

  void header_param(Module& m) {
    Decl d;
    d.kind = DeclKind::Parameter;
    d.line = peek().line;
    if (accept_kw("integer")) {
      d.is_signed = true;
    } else {
      if (accept_kw("signed")) d.is_signed = true;
      if (peek().is_op("[")) d.range = range();
    }
    d.name = identifier("parameter name");
    expect_op("=");
    d.init = expr();
    m.param_order.push_back(d.name);
    m.decls.push_back(std::move(d));
  }

  static bool is_direction(const Token& t) {
    return t.is_ident("input") || t.is_ident("output") || t.is_ident("inout");
  }

  void port_list(Module& m) {
    if (!is_direction(peek())) {
      do {
        m.port_order.push_back(identifier("port name"));
      } while (accept_op(","));
      return;
    }
    // ANSI style; attributes carry over commas until a new direction appears.
    Decl proto;
    do {
      if (is_direction(peek())) {
        proto = Decl{};
        proto.dir = direction(advance().text);
        proto.kind = DeclKind::Wire;
        if (peek().is_ident("wire") || peek().is_ident("reg") || peek().is_ident("logic") ||
            peek().is_ident("integer") || peek().is_ident("tri")) {
          proto.kind = decl_kind(advance().text);
          proto.explicit_type = true;
        }
        if (accept_kw("signed")) proto.is_signed = true;
        accept_kw("unsigned");
        if (peek().is_op("[")) proto.range = range();
      } else if (proto.dir == PortDir::None) {
        fail("expected port direction");
      }
      Decl d;
      d.kind = proto.kind;
      d.dir = proto.dir;
      d.is_signed = proto.is_signed;
      d.explicit_type = proto.explicit_type;
      d.range = clone_range(proto.range);
      d.line = peek().line;
      d.name = identifier("port name");
      if (accept_op("=")) d.init = expr();
      m.port_order.push_back(d.name);
      m.decls.push_back(std::move(d));
    } while (accept_op(","));
  }

  static PortDir direction(const std::string& s) {
    if (s == "input") return PortDir::Input;
    if (s == "output") return PortDir::Output;
    return PortDir::Inout;
  }
  static DeclKind decl_kind(const std::string& s) {
    if (s == "reg") return DeclKind::Reg;
    if (s == "integer") return DeclKind::Integer;
    if (s == "logic" || s == "bit") return DeclKind::Logic;
    if (s == "real") return DeclKind::Real;
    if (s == "time") return DeclKind::Time;
    return DeclKind::Wire;
  }

  std::optional<RangeSpec> clone_range(const std::optional<RangeSpec>& r) {
    if (!r) return std::nullopt;
    return RangeSpec{clone(*r->msb), clone(*r->lsb)};
  }

  static ExprPtr clone(const Expr& e) {
    auto c = std::make_unique<Expr>(e.kind, e.line);
    c->text = e.text;
    for (const auto& a : e.args) c->args.push_back(a ? clone(*a) : nullptr);
    return c;
  }

  RangeSpec range() {
    expect_op("[");
    RangeSpec r;
    r.msb = expr();
    expect_op(":");
    r.lsb = expr();
    expect_op("]");
    return r;
  }

  void module_item(Module& m) {
    const Token& t = peek();
    if (t.kind != TokenKind::Identifier) fail("unexpected '" + describe(t) + "' in module body");
    const std::string& w = t.text;
    if (w == "input" || w == "output" || w == "inout") {
      port_decl(m.decls);
    } else if (w == "wire" || w == "reg" || w == "integer" || w == "logic" || w == "tri" ||
               w == "real" || w == "time" || w == "bit") {
      var_decl(m.decls);
    } else if (w == "parameter" || w == "localparam") {
      param_decl(m.decls);
    } else if (w == "assign") {
      advance();
      if (peek().is_op("#")) delay_value();
      do {
        ContAssign a;
        a.line = peek().line;
        a.lhs = lvalue();
        expect_op("=");
        a.rhs = expr();
        m.assigns.push_back(std::move(a));
      } while (accept_op(","));
      expect_op(";");
    } else if (w == "always" || w == "always_ff" || w == "always_latch") {
      Process p;
      p.line = t.line;
      advance();
      p.body = statement();
      m.processes.push_back(std::move(p));
    } else if (w == "always_comb") {
      Process p;
      p.line = t.line;
      advance();
      auto ev = std::make_unique<Stmt>(StmtKind::EventControl, p.line);
      ev->star = true;
      ev->body.push_back(statement());
      p.body = std::move(ev);
      m.processes.push_back(std::move(p));
    } else if (w == "initial") {
      Process p;
      p.kind = ProcessKind::Initial;
      p.line = t.line;
      advance();
      p.body = statement();
      m.processes.push_back(std::move(p));
    } else if (w == "function") {
      m.functions.push_back(function());
    } else if (kGatePrimitives.count(w)) {
      gate(m);
    } else if (w == "generate" || w == "genvar" || w == "task" || w == "defparam" ||
               w == "specify" || w == "primitive") {
      fail("'" + w + "' is not supported");
    } else if (!is_keyword(w)) {
      instance(m);
    } else {
      fail("unexpected '" + w + "' in module body");
    }
  }

  void port_decl(std::vector<Decl>& out) {
    int line = peek().line;
    PortDir dir = direction(advance().text);
    DeclKind kind = DeclKind::Wire;
    bool explicit_type = false;
    if (peek().is_ident("wire") || peek().is_ident("reg") || peek().is_ident("logic") ||
        peek().is_ident("integer") || peek().is_ident("tri")) {
      kind = decl_kind(advance().text);
      explicit_type = true;
    }
    bool is_signed = accept_kw("signed");
    std::optional<RangeSpec> r;
    if (peek().is_op("[")) r = range();
    do {
      Decl d;
      d.kind = kind;
      d.dir = dir;
      d.is_signed = is_signed;
      d.explicit_type = explicit_type;
      d.range = clone_range(r);
      d.line = line;
      d.name = identifier("port name");
      if (accept_op("=")) d.init = expr();
      out.push_back(std::move(d));
    } while (accept_op(","));
    expect_op(";");
  }

  void var_decl(std::vector<Decl>& out) {
    int line = peek().line;
    DeclKind kind = decl_kind(advance().text);
    bool is_signed = accept_kw("signed") || kind == DeclKind::Integer;
    accept_kw("unsigned");
    std::optional<RangeSpec> r;
    if (peek().is_op("[")) r = range();
    do {
      Decl d;
      d.kind = kind;
      d.is_signed = is_signed;
      d.range = clone_range(r);
      d.line = line;
      d.name = identifier("variable name");
      if (peek().is_op("[")) d.array = range();
      if (accept_op("=")) d.init = expr();
      out.push_back(std::move(d));
    } while (accept_op(","));
    expect_op(";");
  }

  void param_decl(std::vector<Decl>& out) {
    DeclKind kind = advance().text == "parameter" ? DeclKind::Parameter : DeclKind::Localparam;
    bool is_signed = false;
    std::optional<RangeSpec> r;
    if (accept_kw("integer")) {
      is_signed = true;
    } else {
      is_signed = accept_kw("signed");
      if (peek().is_op("[")) r = range();
    }
    do {
      Decl d;
      d.kind = kind;
      d.is_signed = is_signed;
      d.range = clone_range(r);
      d.line = peek().line;
      d.name = identifier("parameter name");
      expect_op("=");
      d.init = expr();
      out.push_back(std::move(d));
    } while (accept_op(","));
    expect_op(";");
  }

  Function function() {
    Function f;
    f.line = peek().line;
    advance();  // function
    accept_kw("automatic");
    if (accept_kw("integer")) {
      f.returns_integer = true;
      f.is_signed = true;
    } else {
      accept_kw("reg");
      f.is_signed = accept_kw("signed");
      if (peek().is_op("[")) f.range = range();
    }
    f.name = identifier("function name");
    if (accept_op("(")) {
      // ANSI argument list
      Decl proto;
      do {
        if (peek().is_ident("input")) {
          advance();
          proto = Decl{};
          proto.dir = PortDir::Input;
          proto.kind = DeclKind::Reg;
          if (accept_kw("integer")) {
            proto.kind = DeclKind::Integer;
            proto.is_signed = true;
          }
          accept_kw("reg");
          if (accept_kw("signed")) proto.is_signed = true;
          if (peek().is_op("[")) proto.range = range();
        } else if (proto.dir != PortDir::Input) {
          fail("expected 'input' in function argument list");
        }
        Decl d;
        d.kind = proto.kind;
        d.dir = PortDir::Input;
        d.is_signed = proto.is_signed;
        d.range = clone_range(proto.range);
        d.line = peek().line;
        d.name = identifier("argument name");
        f.decls.push_back(std::move(d));
      } while (accept_op(","));
      expect_op(")");
    }
    expect_op(";");
    while (true) {
      const Token& t = peek();
      if (t.is_ident("input")) {
        advance();
        bool is_integer = accept_kw("integer");
        accept_kw("reg");
        bool is_signed = accept_kw("signed") || is_integer;
        std::optional<RangeSpec> r;
        if (peek().is_op("[")) r = range();
        do {
          Decl d;
          d.kind = is_integer ? DeclKind::Integer : DeclKind::Reg;
          d.dir = PortDir::Input;
          d.is_signed = is_signed;
          d.range = clone_range(r);
          d.line = peek().line;
          d.name = identifier("argument name");
          f.decls.push_back(std::move(d));
        } while (accept_op(","));
        expect_op(";");
      } else if (t.is_ident("reg") || t.is_ident("integer") || t.is_ident("logic")) {
        var_decl(f.decls);
      } else if (t.is_ident("parameter") || t.is_ident("localparam")) {
        param_decl(f.decls);
      } else {
        break;
      }
    }
    f.body = statement();
    expect_kw("endfunction");
    return f;
  }

  void gate(Module& m) {
    std::string prim = advance().text;
    if (peek().is_op("#")) delay_value();
    do {
      int line = peek().line;
      if (peek_plain_ident()) advance();  // instance name
      expect_op("(");
      std::vector<ExprPtr> terms;
      terms.push_back(lvalue());
      while (accept_op(",")) terms.push_back(expr());
      expect_op(")");
      if (terms.size() < 2) fail("gate '" + prim + "' needs an output and at least one input");
      ContAssign a;
      a.line = line;
      a.lhs = std::move(terms[0]);
      if (prim == "not" || prim == "buf") {
        if (terms.size() != 2) fail("gate '" + prim + "' takes exactly one input");
        if (prim == "not") {
          auto u = std::make_unique<Expr>(ExprKind::Unary, line);
          u->text = "~";
          u->args.push_back(std::move(terms[1]));
          a.rhs = std::move(u);
        } else {
          a.rhs = std::move(terms[1]);
        }
      } else {
        bool invert = prim == "nand" || prim == "nor" || prim == "xnor";
        std::string op = prim == "and" || prim == "nand" ? "&" : prim == "or" || prim == "nor" ? "|" : "^";
        ExprPtr acc = std::move(terms[1]);
        for (size_t i = 2; i < terms.size(); ++i) {
          auto b = std::make_unique<Expr>(ExprKind::Binary, line);
          b->text = op;
          b->args.push_back(std::move(acc));
          b->args.push_back(std::move(terms[i]));
          acc = std::move(b);
        }
        if (invert) {
          auto u = std::make_unique<Expr>(ExprKind::Unary, line);
          u->text = "~";
          u->args.push_back(std::move(acc));
          acc = std::move(u);
        }
        a.rhs = std::move(acc);
      }
      m.assigns.push_back(std::move(a));
    } while (accept_op(","));
    expect_op(";");
  }

  std::vector<Connection> connections() {
    std::vector<Connection> out;
    expect_op("(");
    if (accept_op(")")) return out;
    do {
      Connection c;
      c.line = peek().line;
      if (accept_op(".")) {
        c.port = identifier("port name");
        expect_op("(");
        if (!peek().is_op(")")) c.expr = expr();
        expect_op(")");
      } else {
        c.expr = expr();
      }
      out.push_back(std::move(c));
    } while (accept_op(","));
    expect_op(")");
    return out;
  }

  void instance(Module& m) {
    int line = peek().line;
    std::string mod = identifier("module name");
    std::vector<Connection> params;
    if (accept_op("#")) {
      if (peek().is_op("(")) {
        params = connections();
      } else {
        Connection c;
        c.line = peek().line;
        c.expr = primary();
        params.push_back(std::move(c));
      }
    }
    do {
      Instance inst;
      inst.line = line;
      inst.module_name = mod;
      for (auto& p : params) {
        Connection c;
        c.port = p.port;
        c.line = p.line;
        c.expr = p.expr ? clone(*p.expr) : nullptr;
        inst.params.push_back(std::move(c));
      }
      inst.instance_name = identifier("instance name");
      if (peek().is_op("[")) fail("instance arrays are not supported");
      inst.ports = connections();
      m.instances.push_back(std::move(inst));
    } while (accept_op(","));
    expect_op(";");
  }

  // ---- statements ----------------------------------------------------------
  ExprPtr delay_value() {
    expect_op("#");
    if (peek().is_op("(")) {
      advance();
      auto e = expr();
      expect_op(")");
      return e;
    }
    const Token& t = peek();
    if (t.kind == TokenKind::Number || t.kind == TokenKind::Identifier) return primary();
    fail("expected delay value");
  }

  StmtPtr statement_or_null() {
    if (accept_op(";")) return std::make_unique<Stmt>(StmtKind::Null, peek().line);
    return statement();
  }

  StmtPtr statement() {
    const Token& t = peek();
    int line = t.line;
    if (t.is_op(";")) {
      advance();
      return std::make_unique<Stmt>(StmtKind::Null, line);
    }
    if (t.is_op("#")) {
      auto s = std::make_unique<Stmt>(StmtKind::Delay, line);
      s->cond = delay_value();
      s->body.push_back(statement_or_null());
      return s;
    }
    if (t.is_op("@")) {
      auto s = event_control();
      s->body.push_back(statement_or_null());
      return s;
    }
    if (t.kind == TokenKind::SystemIdentifier) {
      auto s = std::make_unique<Stmt>(StmtKind::SysTask, line);
      s->name = advance().text;
      if (accept_op("(")) {
        if (!peek().is_op(")")) {
          do {
            if (peek().is_op(",")) {
              s->args.push_back(nullptr);
            } else {
              s->args.push_back(expr());
            }
          } while (accept_op(","));
        }
        expect_op(")");
      }
      expect_op(";");
      return s;
    }
    if (t.is_op("{")) return assignment(line);
    if (t.kind != TokenKind::Identifier) fail("unexpected '" + describe(t) + "' in statement");

    const std::string& w = t.text;
    if (w == "begin") return block();
    if (w == "if") {
      advance();
      auto s = std::make_unique<Stmt>(StmtKind::If, line);
      expect_op("(");
      s->cond = expr();
      expect_op(")");
      s->body.push_back(statement_or_null());
      if (accept_kw("else")) s->body.push_back(statement_or_null());
      return s;
    }
    if (w == "case" || w == "casez" || w == "casex") return case_statement();
    if (w == "for") {
      advance();
      auto s = std::make_unique<Stmt>(StmtKind::For, line);
      expect_op("(");
      s->init = simple_assignment();
      expect_op(";");
      s->cond = expr();
      expect_op(";");
      s->step = simple_assignment();
      expect_op(")");
      s->body.push_back(statement_or_null());
      return s;
    }
    if (w == "while" || w == "repeat") {
      advance();
      auto s = std::make_unique<Stmt>(w == "while" ? StmtKind::While : StmtKind::Repeat, line);
      expect_op("(");
      s->cond = expr();
      expect_op(")");
      s->body.push_back(statement_or_null());
      return s;
    }
    if (w == "forever") {
      advance();
      auto s = std::make_unique<Stmt>(StmtKind::Forever, line);
      s->body.push_back(statement());
      return s;
    }
    if (w == "wait") {
      advance();
      auto s = std::make_unique<Stmt>(StmtKind::Wait, line);
      expect_op("(");
      s->cond = expr();
      expect_op(")");
      s->body.push_back(statement_or_null());
      return s;
    }
    if (w == "disable") {
      advance();
      auto s = std::make_unique<Stmt>(StmtKind::Disable, line);
      s->name = identifier("block name");
      expect_op(";");
      return s;
    }
    if (is_keyword(w)) fail("unexpected '" + w + "' in statement");
    if (peek(1).is_op("(") || peek(1).is_op(";")) {
      auto s = std::make_unique<Stmt>(StmtKind::TaskCall, line);
      s->name = advance().text;
      if (accept_op("(")) {
        if (!peek().is_op(")")) {
          do s->args.push_back(expr());
          while (accept_op(","));
        }
        expect_op(")");
      }
      expect_op(";");
      return s;
    }
    return assignment(line);
  }

  StmtPtr block() {
    auto s = std::make_unique<Stmt>(StmtKind::Block, peek().line);
    advance();  // begin
    if (accept_op(":")) s->name = identifier("block name");
    while (true) {
      const Token& t = peek();
      if (t.is_ident("end")) break;
      if (at_eof()) fail("missing 'end'");
      if (t.is_ident("reg") || t.is_ident("integer") || t.is_ident("logic")) {
        var_decl(s->decls);
        continue;
      }
      if (t.is_ident("parameter") || t.is_ident("localparam")) {
        param_decl(s->decls);
        continue;
      }
      s->body.push_back(statement());
    }
    advance();
    if (accept_op(":")) identifier("block name");
    return s;
  }

  StmtPtr case_statement() {
    auto s = std::make_unique<Stmt>(StmtKind::Case, peek().line);
    s->case_kind = advance().text;
    expect_op("(");
    s->cond = expr();
    expect_op(")");
    bool seen_default = false;
    while (!accept_kw("endcase")) {
      if (at_eof()) fail("missing 'endcase'");
      CaseItem item;
      if (accept_kw("default")) {
        if (seen_default) fail("multiple default items in case");
        seen_default = true;
        accept_op(":");
      } else {
        do item.labels.push_back(expr());
        while (accept_op(","));
        expect_op(":");
      }
      item.body = statement_or_null();
      s->items.push_back(std::move(item));
    }
    return s;
  }

  StmtPtr event_control() {
    auto s = std::make_unique<Stmt>(StmtKind::EventControl, peek().line);
    expect_op("@");
    if (accept_op("*")) {
      s->star = true;
      return s;
    }
    if (!peek().is_op("(")) {
      EventItem item;
      item.expr = identifier_expr();
      s->events.push_back(std::move(item));
      return s;
    }
    advance();
    if (accept_op("*")) {
      s->star = true;
      expect_op(")");
      return s;
    }
    do {
      EventItem item;
      if (accept_kw("posedge")) {
        item.edge = EdgeKind::Pos;
      } else if (accept_kw("negedge")) {
        item.edge = EdgeKind::Neg;
      }
      item.expr = expr();
      s->events.push_back(std::move(item));
    } while (accept_kw("or") || accept_op(","));
    expect_op(")");
    return s;
  }

  StmtPtr simple_assignment() {
    int line = peek().line;
    auto s = std::make_unique<Stmt>(StmtKind::BlockingAssign, line);
    s->lhs = lvalue();
    expect_op("=");
    s->rhs = expr();
    return s;
  }

  StmtPtr assignment(int line) {
    auto lhs = lvalue();
    StmtKind kind;
    if (accept_op("=")) {
      kind = StmtKind::BlockingAssign;
    } else if (accept_op("<=")) {
      kind = StmtKind::NonBlockingAssign;
    } else {
      fail("expected '=' or '<=' after assignment target, found '" + describe(peek()) + "'");
    }
    auto s = std::make_unique<Stmt>(kind, line);
    s->lhs = std::move(lhs);
    if (peek().is_op("#")) s->intra_delay = delay_value();
    s->rhs = expr();
    expect_op(";");
    return s;
  }

  ExprPtr lvalue() {
    if (peek().is_op("{")) {
      int line = advance().line;
      auto e = std::make_unique<Expr>(ExprKind::Concat, line);
      do e->args.push_back(lvalue());
      while (accept_op(","));
      expect_op("}");
      return e;
    }
    return selects(identifier_expr());
  }

  ExprPtr identifier_expr() {
    int line = peek().line;
    auto e = std::make_unique<Expr>(ExprKind::Ident, line);
    e->text = identifier();
    while (peek().is_op(".") && peek_plain_ident(1)) {
      advance();
      e->text += "." + advance().text;
    }
    return e;
  }

  ExprPtr selects(ExprPtr base) {
    while (peek().is_op("[")) {
      int line = advance().line;
      auto first = expr();
      ExprPtr sel;
      if (accept_op(":")) {
        sel = std::make_unique<Expr>(ExprKind::Range, line);
        sel->args.push_back(std::move(base));
        sel->args.push_back(std::move(first));
        sel->args.push_back(expr());
      } else if (accept_op("+:") ) {
        sel = std::make_unique<Expr>(ExprKind::IndexedUp, line);
        sel->args.push_back(std::move(base));
        sel->args.push_back(std::move(first));
        sel->args.push_back(expr());
      } else if (accept_op("-:")) {
        sel = std::make_unique<Expr>(ExprKind::IndexedDown, line);
        sel->args.push_back(std::move(base));
        sel->args.push_back(std::move(first));
        sel->args.push_back(expr());
      } else {
        sel = std::make_unique<Expr>(ExprKind::Index, line);
        sel->args.push_back(std::move(base));
        sel->args.push_back(std::move(first));
      }
      expect_op("]");
      base = std::move(sel);
    }
    return base;
  }

  // ---- expressions ---------------------------------------------------------
  ExprPtr expr() { return ternary(); }

  ExprPtr ternary() {
    auto c = binary(0);
    if (peek().is_op("?")) {
      int line = advance().line;
      auto e = std::make_unique<Expr>(ExprKind::Ternary, line);
      e->args.push_back(std::move(c));
      e->args.push_back(ternary());
      expect_op(":");
      e->args.push_back(ternary());
      return e;
    }
    return c;
  }

  static int precedence(const Token& t) {
    if (t.kind != TokenKind::Operator) return -1;
    const std::string& o = t.text;
    if (o == "||") return 0;
    if (o == "&&") return 1;
    if (o == "|") return 2;
    if (o == "^" || o == "~^" || o == "^~") return 3;
    if (o == "&") return 4;
    if (o == "==" || o == "!=" || o == "===" || o == "!==") return 5;
    if (o == "<" || o == "<=" || o == ">" || o == ">=") return 6;
    if (o == "<<" || o == ">>" || o == "<<<" || o == ">>>") return 7;
    if (o == "+" || o == "-") return 8;
    if (o == "*" || o == "/" || o == "%") return 9;
    if (o == "**") return 10;
    return -1;
  }

  ExprPtr binary(int min_prec) {
    auto lhs = unary();
    while (true) {
      int p = precedence(peek());
      if (p < min_prec || p < 0) break;
      const Token& op = advance();
      auto rhs = binary(p + 1);
      auto e = std::make_unique<Expr>(ExprKind::Binary, op.line);
      e->text = op.text;
      e->args.push_back(std::move(lhs));
      e->args.push_back(std::move(rhs));
      lhs = std::move(e);
    }
    return lhs;
  }

  ExprPtr unary() {
    static const std::unordered_set<std::string_view> kUnary = {"+", "-", "!", "~", "&", "~&",
                                                               "|", "~|", "^", "~^", "^~"};
    const Token& t = peek();
    if (t.kind == TokenKind::Operator && kUnary.count(t.text)) {
      advance();
      auto e = std::make_unique<Expr>(ExprKind::Unary, t.line);
      e->text = t.text;
      e->args.push_back(unary());
      return e;
    }
    return primary();
  }

  ExprPtr primary() {
    const Token& t = peek();
    int line = t.line;
    switch (t.kind) {
      case TokenKind::Number: {
        auto e = std::make_unique<Expr>(ExprKind::Number, line);
        e->text = advance().text;
        return e;
      }
      case TokenKind::String: {
        auto e = std::make_unique<Expr>(ExprKind::String, line);
        e->text = advance().text;
        return e;
      }
      case TokenKind::SystemIdentifier: {
        auto e = std::make_unique<Expr>(ExprKind::SysCall, line);
        e->text = advance().text;
        if (accept_op("(")) {
          if (!peek().is_op(")")) {
            do e->args.push_back(expr());
            while (accept_op(","));
          }
          expect_op(")");
        }
        return e;
      }
      case TokenKind::Identifier: {
        if (is_keyword(t.text)) fail("unexpected keyword '" + t.text + "' in expression");
        if (peek(1).is_op("(")) {
          auto e = std::make_unique<Expr>(ExprKind::Call, line);
          e->text = advance().text;
          advance();
          if (!peek().is_op(")")) {
            do e->args.push_back(expr());
            while (accept_op(","));
          }
          expect_op(")");
          return e;
        }
        return selects(identifier_expr());
      }
      case TokenKind::Operator:
        if (t.is_op("(")) {
          advance();
          auto e = expr();
          expect_op(")");
          return e;
        }
        if (t.is_op("{")) return concat();
        break;
      default:
        break;
    }
    fail("unexpected '" + describe(t) + "' in expression");
  }

  ExprPtr concat() {
    int line = advance().line;  // {
    auto first = expr();
    if (peek().is_op("{")) {
      // replication {n{...}}
      advance();
      auto e = std::make_unique<Expr>(ExprKind::Replicate, line);
      e->args.push_back(std::move(first));
      do e->args.push_back(expr());
      while (accept_op(","));
      expect_op("}");
      expect_op("}");
      return e;
    }
    auto e = std::make_unique<Expr>(ExprKind::Concat, line);
    e->args.push_back(std::move(first));
    while (accept_op(",")) e->args.push_back(expr());
    expect_op("}");
    return e;
  }

  const std::vector<Token>& toks_;
  size_t pos_ = 0;
};

}  // namespace

ast::SourceFile parse(const std::vector<Token>& tokens) { return Parser(tokens).run(); }

ast::SourceFile parse_source(std::string_view source) {
  std::vector<Token> toks;
  try {
    toks = preprocess(tokenize(source));
  } catch (const TokenizeError& e) {
    throw SyntaxError(e.line(), "lexical error: " + e.message());
  }
  return parse(toks);
}

}  // namespace minivl
