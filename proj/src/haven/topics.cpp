#include "haven/topics.hpp"

#include <algorithm>
#include <map>

#include "haven/error.hpp"
#include "haven/symbolic.hpp"
#include "minivl/lexer.hpp"

namespace haven {

const char* to_string(Topic t) {
  switch (t) {
    case Topic::Fsm: return "Fsm";
    case Topic::Counter: return "Counter";
    case Topic::ShiftRegister: return "ShiftRegister";
    case Topic::ClockDivider: return "ClockDivider";
    case Topic::Alu: return "Alu";
    case Topic::Other: return "Other";
  }
  return "?";
}

const char* to_string(Attribute a) {
  switch (a) {
    case Attribute::SyncReset: return "SyncReset";
    case Attribute::AsyncReset: return "AsyncReset";
    case Attribute::PosEdge: return "PosEdge";
    case Attribute::NegEdge: return "NegEdge";
    case Attribute::ActiveHighEnable: return "ActiveHighEnable";
    case Attribute::ActiveLowEnable: return "ActiveLowEnable";
  }
  return "?";
}

std::optional<Topic> topic_from_string(const std::string& name) {
  for (Topic t : {Topic::Fsm, Topic::Counter, Topic::ShiftRegister, Topic::ClockDivider, Topic::Alu, Topic::Other})
    if (name == to_string(t)) return t;
  return std::nullopt;
}

bool is_known_tag(const std::string& tag) {
  if (topic_from_string(tag) && tag != "Other") return true;
  for (Attribute a : {Attribute::SyncReset, Attribute::AsyncReset, Attribute::PosEdge, Attribute::NegEdge,
                      Attribute::ActiveHighEnable, Attribute::ActiveLowEnable})
    if (tag == to_string(a)) return true;
  return false;
}

std::vector<std::string> TopicProfile::tags() const {
  std::vector<std::string> out;
  for (Topic t : topics)
    if (t != Topic::Other) out.push_back(to_string(t));
  for (Attribute a : attributes) out.push_back(to_string(a));
  return out;
}

Json TopicProfile::to_json() const {
  Json j;
  j["topics"] = Json::array();
  for (Topic t : topics) j["topics"].push_back(to_string(t));
  j["attributes"] = Json::array();
  for (Attribute a : attributes) j["attributes"].push_back(to_string(a));
  j["evidence"] = Json::array();
  for (const auto& e : evidence) j["evidence"].push_back(Json{{"finding", e.finding}, {"line", e.line}, {"detail", e.detail}});
  return j;
}

namespace {

using minivl::Token;
using minivl::TokenKind;
using Toks = std::vector<Token>;

bool contains(const std::string& s, const char* part) { return s.find(part) != std::string::npos; }

bool is_reset_name(const std::string& name) {
  std::string n = to_lower(name);
  return contains(n, "rst") || contains(n, "reset") || n == "clr" || n == "clear" || starts_with(n, "clr_") ||
         n == "clr_n";
}

bool is_clock_name(const std::string& name) {
  std::string n = to_lower(name);
  return contains(n, "clk") || contains(n, "clock");
}

// Names used for divided clocks, clock enables and rate strobes.
bool is_divided_clock_name(const std::string& name) {
  std::string n = to_lower(name);
  return is_clock_name(n) || contains(n, "div") || contains(n, "tick") || contains(n, "baud");
}

bool is_enable_name(const std::string& name) {
  std::string n = to_lower(name);
  if (is_reset_name(n)) return false;
  return n == "en" || n == "ena" || n == "enb" || n == "en_n" || contains(n, "enable") || starts_with(n, "en_") ||
         ends_with(n, "_en") || ends_with(n, "_ena") || contains(n, "_en_");
}

bool is_state_name(const std::string& name) {
  std::string n = to_lower(name);
  return contains(n, "state") || n == "ps" || n == "cs" || n == "ns" || n == "cur_st" || n == "nxt_st" ||
         ends_with(n, "_st");
}

bool is_next_state_name(const std::string& name) {
  std::string n = to_lower(name);
  return contains(n, "next") || contains(n, "nxt") || n == "ns";
}

struct Assign {
  std::string lhs;  // empty for concatenation targets
  bool indexed = false;
  size_t rhs_begin = 0, rhs_end = 0;
  int line = 0;
};

struct SensItem {
  std::string edge;  // "posedge", "negedge" or ""
  std::string name;
};

struct AlwaysBlock {
  int line = 0;
  std::vector<SensItem> sens;
  bool star = false;
  size_t body_begin = 0, body_end = 0;
  int edge_count() const {
    return static_cast<int>(std::count_if(sens.begin(), sens.end(), [](const SensItem& s) { return !s.edge.empty(); }));
  }
};

class Analyzer {
 public:
  explicit Analyzer(Toks toks) : t_(std::move(toks)) {}

  TopicProfile run();

 private:
  const Token& at(size_t i) const {
    static const Token eof;
    return i < t_.size() ? t_[i] : eof;
  }
  bool op(size_t i, const char* s) const { return at(i).is_op(s); }
  bool kw(size_t i, const char* s) const { return at(i).kind == TokenKind::Identifier && at(i).text == s; }

  size_t skip_parens(size_t i) const;  // i at '(' -> index after matching ')'
  size_t skip_brackets(size_t i) const;  // i at '[' -> index after the last of consecutive [..]
  size_t skip_stmt(size_t i) const;
  size_t skip_event(size_t i) const;   // i at '@'
  std::vector<Assign> assignments(size_t b, size_t e) const;
  bool range_has_ident(size_t b, size_t e, const std::string& name) const;
  std::set<std::string> operator_kinds(size_t b, size_t e) const;

  void add_topic(Topic t, int line, const std::string& detail) {
    p_.topics.insert(t);
    p_.evidence.push_back(Evidence{to_string(t), line, detail});
  }
  void add_attr(Attribute a, int line, const std::string& detail) {
    p_.attributes.insert(a);
    p_.evidence.push_back(Evidence{to_string(a), line, detail});
  }
  bool has_topic(Topic t) const { return p_.topics.count(t) != 0; }

  void analyze_always(const AlwaysBlock& blk);
  void analyze_cases(size_t b, size_t e);
  void analyze_if_chains(size_t b, size_t e);
  void analyze_enables(size_t b, size_t e, bool clocked);
  void scan_guards(size_t b, size_t e);
  void note_enable(size_t k);
  std::optional<size_t> lone_guard(size_t open, size_t close) const;
  void analyze_ternaries(const std::vector<Assign>& assigns);

  Toks t_;
  TopicProfile p_;
  std::set<std::string> params_;
  std::set<std::string> loop_vars_;
  std::vector<std::string> counter_regs_;
  std::vector<Assign> continuous_;
};

size_t Analyzer::skip_parens(size_t i) const {
  int depth = 0;
  for (; i < t_.size(); ++i) {
    if (op(i, "(")) ++depth;
    if (op(i, ")") && --depth == 0) return i + 1;
  }
  return t_.size();
}

size_t Analyzer::skip_brackets(size_t i) const {
  int depth = 0;
  for (; i < t_.size(); ++i) {
    if (op(i, "[")) ++depth;
    if (op(i, "]") && --depth == 0 && !op(i + 1, "[")) return i + 1;
  }
  return t_.size();
}

size_t Analyzer::skip_event(size_t i) const {
  ++i;  // '@'
  if (op(i, "*")) return i + 1;
  if (op(i, "(")) return skip_parens(i);
  return i + 1;  // @ident
}

size_t Analyzer::skip_stmt(size_t i) const {
  if (i >= t_.size()) return i;
  if (kw(i, "begin") || kw(i, "fork")) {
    int depth = 0;
    for (; i < t_.size(); ++i) {
      if (kw(i, "begin") || kw(i, "fork")) ++depth;
      if ((kw(i, "end") || kw(i, "join")) && --depth == 0) {
        ++i;
        if (op(i, ":")) i += 2;
        return i;
      }
    }
    return i;
  }
  if (kw(i, "if")) {
    i = skip_stmt(skip_parens(i + 1));
    if (kw(i, "else")) i = skip_stmt(i + 1);
    return i;
  }
  if (kw(i, "case") || kw(i, "casez") || kw(i, "casex")) {
    int depth = 0;
    for (; i < t_.size(); ++i) {
      if (kw(i, "case") || kw(i, "casez") || kw(i, "casex")) ++depth;
      if (kw(i, "endcase") && --depth == 0) return i + 1;
    }
    return i;
  }
  if (kw(i, "for") || kw(i, "while") || kw(i, "repeat")) return skip_stmt(skip_parens(i + 1));
  if (kw(i, "forever")) return skip_stmt(i + 1);
  if (op(i, "@")) return skip_stmt(skip_event(i));
  if (op(i, "#")) {
    ++i;
    if (op(i, "(")) i = skip_parens(i);
    else ++i;
    return skip_stmt(i);
  }
  if (op(i, ";")) return i + 1;
  int depth = 0;
  for (; i < t_.size(); ++i) {
    if (op(i, "(") || op(i, "[") || op(i, "{")) ++depth;
    if (op(i, ")") || op(i, "]") || op(i, "}")) --depth;
    if (depth <= 0 && op(i, ";")) return i + 1;
    if (kw(i, "end") || kw(i, "endcase") || kw(i, "endmodule")) return i;
  }
  return i;
}

std::vector<Assign> Analyzer::assignments(size_t b, size_t e) const {
  std::vector<Assign> out;
  for (size_t i = b; i < e; ++i) {
    bool stmt_start = i == b || op(i - 1, ";") || kw(i - 1, "begin") || kw(i - 1, "else") || op(i - 1, ")") ||
                      op(i - 1, ":") || kw(i - 1, "end") || kw(i - 1, "assign");
    if (!stmt_start) continue;
    size_t j = i;
    std::string lhs;
    bool idx = false;
    if (at(j).kind == TokenKind::Identifier && !minivl::is_keyword(at(j).text)) {
      lhs = at(j).text;
      ++j;
      idx = op(j, "[");
      while (op(j, "[")) {
        int depth = 0;
        for (; j < e; ++j) {
          if (op(j, "[")) ++depth;
          if (op(j, "]") && --depth == 0) break;
        }
        ++j;
      }
    } else if (op(j, "{")) {
      int depth = 0;
      for (; j < e; ++j) {
        if (op(j, "{")) ++depth;
        if (op(j, "}") && --depth == 0) break;
      }
      ++j;
    } else {
      continue;
    }
    if (!(op(j, "<=") || op(j, "="))) continue;
    size_t r = j + 1, k = r;
    int depth = 0;
    for (; k < e; ++k) {
      if (op(k, "(") || op(k, "[") || op(k, "{")) ++depth;
      if (op(k, ")") || op(k, "]") || op(k, "}")) --depth;
      if (depth < 0 || (depth == 0 && op(k, ";"))) break;
    }
    out.push_back(Assign{lhs, idx, r, k, at(i).line});
    i = k;
  }
  return out;
}

bool Analyzer::range_has_ident(size_t b, size_t e, const std::string& name) const {
  for (size_t i = b; i < e; ++i)
    if (at(i).kind == TokenKind::Identifier && at(i).text == name) return true;
  return false;
}

std::set<std::string> Analyzer::operator_kinds(size_t b, size_t e) const {
  static const std::set<std::string> kinds = {"+", "-", "*", "/", "%", "&", "|", "^", "~", "<<", ">>", "<<<", ">>>", "~^", "^~", "~&", "~|"};
  std::set<std::string> out;
  for (size_t i = b; i < e; ++i) {
    if (at(i).kind != TokenKind::Operator || !kinds.count(at(i).text)) continue;
    out.insert(at(i).text);
  }
  return out;
}

void Analyzer::analyze_always(const AlwaysBlock& blk) {
  int edges = blk.edge_count();
  bool clocked = edges > 0;

  const SensItem* clock = nullptr;
  const SensItem* reset = nullptr;
  for (const auto& s : blk.sens) {
    if (s.edge.empty()) continue;
    if (is_reset_name(s.name)) {
      if (!reset) reset = &s;
    } else if (!clock) {
      clock = &s;
    }
  }
  if (clock) {
    if (clock->edge == "posedge") add_attr(Attribute::PosEdge, blk.line, "posedge " + clock->name);
    else add_attr(Attribute::NegEdge, blk.line, "negedge " + clock->name);
  }
  if (reset && edges >= 2) add_attr(Attribute::AsyncReset, blk.line, reset->edge + " " + reset->name + " in sensitivity list");
  if (edges == 1 && clock) {
    for (size_t i = blk.body_begin; i < blk.body_end; ++i) {
      if (!kw(i, "if")) continue;
      size_t close = skip_parens(i + 1);
      for (size_t k = i + 1; k < close; ++k)
        if (at(k).kind == TokenKind::Identifier && is_reset_name(at(k).text)) {
          add_attr(Attribute::SyncReset, blk.line, at(k).text + " tested under " + clock->edge + " " + clock->name);
          i = blk.body_end;
          break;
        }
    }
  }

  auto assigns = assignments(blk.body_begin, blk.body_end);
  if (clocked) {
    bool counter = false;
    for (const auto& a : assigns) {
      if (a.lhs.empty() || loop_vars_.count(a.lhs)) continue;
      if (a.indexed && at(a.rhs_begin).text == a.lhs && op(a.rhs_begin + 1, "[") &&
          skip_brackets(a.rhs_begin + 1) == a.rhs_end && !has_topic(Topic::ShiftRegister)) {
        add_topic(Topic::ShiftRegister, a.line, a.lhs + " elements move to neighbouring indices");
        continue;
      }
      bool self = range_has_ident(a.rhs_begin, a.rhs_end, a.lhs);
      if (!self) continue;
      bool arith = false, shift = false, concat = op(a.rhs_begin, "{"), invert = false;
      int depth = 0;
      for (size_t k = a.rhs_begin; k < a.rhs_end; ++k) {
        if (op(k, "[")) ++depth;
        if (op(k, "]")) --depth;
        if (depth > 0) continue;
        if (op(k, "+") || op(k, "-")) arith = true;
        if (op(k, "<<") || op(k, ">>") || op(k, "<<<") || op(k, ">>>")) shift = true;
      }
      if ((op(a.rhs_begin, "~") || op(a.rhs_begin, "!")) && a.rhs_end == a.rhs_begin + 2) invert = true;
      if (arith && !is_state_name(a.lhs)) {
        if (std::find(counter_regs_.begin(), counter_regs_.end(), a.lhs) == counter_regs_.end())
          counter_regs_.push_back(a.lhs);
        if (!counter) add_topic(Topic::Counter, a.line, a.lhs + " updated from itself with +/-");
        counter = true;
      }
      if ((concat || shift) && !arith && !has_topic(Topic::ShiftRegister))
        add_topic(Topic::ShiftRegister, a.line, a.lhs + " shifted through " + (concat ? "concatenation" : "shift operator"));
      if (invert && is_divided_clock_name(a.lhs) && !has_topic(Topic::ClockDivider))
        add_topic(Topic::ClockDivider, a.line, a.lhs + " toggled");
    }
    if (counter && !has_topic(Topic::ClockDivider)) {
      for (const auto& a : assigns) {
        if (a.lhs.empty() || std::count(counter_regs_.begin(), counter_regs_.end(), a.lhs)) continue;
        bool toggles = (op(a.rhs_begin, "~") || op(a.rhs_begin, "!")) && range_has_ident(a.rhs_begin, a.rhs_end, a.lhs);
        if (is_divided_clock_name(a.lhs) || (toggles && !is_state_name(a.lhs))) {
          add_topic(Topic::ClockDivider, a.line, a.lhs + " derived from counter");
          break;
        }
      }
    }
    // A chain of three or more flops, each loaded from the previous one.
    if (!has_topic(Topic::ShiftRegister)) {
      std::map<std::string, std::string> from;
      for (const auto& a : assigns)
        if (!a.lhs.empty() && !a.indexed && a.rhs_end == a.rhs_begin + 1 && at(a.rhs_begin).kind == TokenKind::Identifier)
          from[a.lhs] = at(a.rhs_begin).text;
      for (const auto& [last, src] : from) {
        int flops = 1;
        std::string cur = src;
        while (from.count(cur) && cur != last && flops <= static_cast<int>(from.size())) {
          ++flops;
          cur = from[cur];
        }
        if (flops >= 3) {
          add_topic(Topic::ShiftRegister, blk.line, std::to_string(flops) + " flops chained into " + last);
          break;
        }
      }
    }
  }
  analyze_cases(blk.body_begin, blk.body_end);
  analyze_if_chains(blk.body_begin, blk.body_end);
  analyze_enables(blk.body_begin, blk.body_end, clocked);
  analyze_ternaries(assigns);
}

void Analyzer::analyze_cases(size_t b, size_t e) {
  for (size_t i = b; i < e; ++i) {
    if (!(kw(i, "case") || kw(i, "casez") || kw(i, "casex"))) continue;
    size_t close = skip_parens(i + 1);
    std::string subject;
    if (close == i + 4 && at(i + 2).kind == TokenKind::Identifier) subject = at(i + 2).text;
    size_t end = skip_stmt(i);
    // Items: label list ':' statement.
    std::vector<std::pair<size_t, size_t>> items;
    size_t k = close;
    while (k < end && !kw(k, "endcase")) {
      if (kw(k, "default")) {
        ++k;
        if (op(k, ":")) ++k;
      } else {
        int depth = 0;
        while (k < end && !(depth == 0 && op(k, ":"))) {
          if (op(k, "(") || op(k, "[") || op(k, "{")) ++depth;
          if (op(k, ")") || op(k, "]") || op(k, "}")) --depth;
          ++k;
        }
        if (k >= end) break;
        ++k;
      }
      size_t stop = skip_stmt(k);
      if (stop <= k) break;
      items.emplace_back(k, stop);
      k = stop;
    }

    bool fsm = false;
    if (!subject.empty()) {
      for (const auto& a : assignments(close, end)) {
        if (a.lhs == subject || is_next_state_name(a.lhs) ||
            (is_state_name(subject) && is_state_name(a.lhs))) {
          fsm = true;
          if (!has_topic(Topic::Fsm)) add_topic(Topic::Fsm, at(i).line, "case over " + subject + " assigns " + a.lhs);
          break;
        }
      }
    }
    if (fsm || has_topic(Topic::Alu)) continue;
    int op_items = 0;
    std::set<std::string> kinds;
    for (const auto& [s, t] : items) {
      bool any = false;
      for (const auto& a : assignments(s, t)) {
        if (a.lhs.empty() || range_has_ident(a.rhs_begin, a.rhs_end, a.lhs)) continue;
        auto k2 = operator_kinds(a.rhs_begin, a.rhs_end);
        if (!k2.empty()) {
          any = true;
          kinds.insert(k2.begin(), k2.end());
        }
      }
      if (any) ++op_items;
    }
    if (op_items >= 2 && kinds.size() >= 2)
      add_topic(Topic::Alu, at(i).line, "case over " + (subject.empty() ? std::string("select") : subject) +
                                            " selects " + std::to_string(op_items) + " operations");
  }
}

void Analyzer::analyze_if_chains(size_t b, size_t e) {
  if (has_topic(Topic::Alu)) return;
  for (size_t i = b; i < e; ++i) {
    if (!kw(i, "if") || (i > 0 && kw(i - 1, "else"))) continue;
    std::string subject;
    int op_items = 0;
    std::set<std::string> kinds;
    size_t k = i;
    while (kw(k, "if")) {
      size_t close = skip_parens(k + 1);
      std::string subj;
      if (at(k + 2).kind == TokenKind::Identifier && op(k + 3, "==")) subj = at(k + 2).text;
      if (subj.empty() || (!subject.empty() && subj != subject)) break;
      subject = subj;
      size_t stop = skip_stmt(close);
      bool any = false;
      for (const auto& a : assignments(close, stop)) {
        if (a.lhs.empty() || range_has_ident(a.rhs_begin, a.rhs_end, a.lhs)) continue;
        auto k2 = operator_kinds(a.rhs_begin, a.rhs_end);
        if (!k2.empty()) {
          any = true;
          kinds.insert(k2.begin(), k2.end());
        }
      }
      if (any) ++op_items;
      if (!kw(stop, "else")) break;
      k = stop + 1;
    }
    if (op_items >= 2 && kinds.size() >= 2 && !is_state_name(subject)) {
      add_topic(Topic::Alu, at(i).line, "if-chain over " + subject + " selects " + std::to_string(op_items) + " operations");
      return;
    }
  }
}

void Analyzer::note_enable(size_t k) {
  bool negated = op(k - 1, "!") || op(k - 1, "~");
  if ((op(k + 1, "==") || op(k + 1, "===")) && at(k + 2).kind == TokenKind::Number) {
    const std::string& v = at(k + 2).text;
    negated = negated != (v.back() == '0');
  }
  if (op(k + 1, "!=") && at(k + 2).kind == TokenKind::Number) negated = !negated && at(k + 2).text.back() != '0';
  Attribute a = negated ? Attribute::ActiveLowEnable : Attribute::ActiveHighEnable;
  if (!p_.attributes.count(a)) add_attr(a, at(k).line, std::string(negated ? "!" : "") + at(k).text + " guards assignment");
}

// Identifier tested alone by an if condition: (x), (!x) or (~x).
std::optional<size_t> Analyzer::lone_guard(size_t open, size_t close) const {
  size_t k = open + 1;
  if (op(k, "!") || op(k, "~")) ++k;
  if (at(k).kind != TokenKind::Identifier || minivl::is_keyword(at(k).text)) return std::nullopt;
  if (k + 1 == close) return k;
  return std::nullopt;
}

void Analyzer::analyze_enables(size_t b, size_t e, bool clocked) {
  for (size_t i = b; i < e; ++i) {
    if (!kw(i, "if")) continue;
    size_t close = skip_parens(i + 1);
    for (size_t k = i + 2; k + 1 < close; ++k)
      if (at(k).kind == TokenKind::Identifier && is_enable_name(at(k).text)) note_enable(k);
  }
  if (clocked) scan_guards(b, e);
}

// Top-level if-chains of a clocked block. The last arm of a chain without a
// final else, guarded by a single signal, holds the register otherwise.
void Analyzer::scan_guards(size_t b, size_t e) {
  size_t i = b;
  if (kw(i, "begin")) {
    ++i;
    if (op(i, ":")) i += 2;
  }
  while (i < e && !kw(i, "end")) {
    size_t next = skip_stmt(i);
    if (next <= i) break;
    if (kw(i, "if")) {
      size_t k = i;
      size_t last_open = 0, last_close = 0;
      bool final_else = false;
      while (true) {
        size_t close = skip_parens(k + 1);
        last_open = k + 1;
        last_close = close;
        auto guard = lone_guard(k + 1, close - 1);
        size_t stop = skip_stmt(close);
        if (guard && is_reset_name(at(*guard).text)) {
          if (kw(stop, "else") && !kw(stop + 1, "if")) scan_guards(stop + 1, skip_stmt(stop + 1));
        }
        if (!kw(stop, "else")) break;
        if (!kw(stop + 1, "if")) {
          final_else = true;
          break;
        }
        k = stop + 1;
      }
      if (!final_else) {
        auto guard = lone_guard(last_open, last_close - 1);
        if (guard && !is_reset_name(at(*guard).text) && !is_clock_name(at(*guard).text)) note_enable(*guard);
      }
    }
    i = next;
  }
}

// y = (s == 0) ? a + b : (s == 1) ? a - b : ...
void Analyzer::analyze_ternaries(const std::vector<Assign>& assigns) {
  if (has_topic(Topic::Alu)) return;
  for (const auto& a : assigns) {
    int arms = 0;
    std::map<std::string, int> subjects;
    std::set<std::string> kinds;
    int depth = 0;
    for (size_t k = a.rhs_begin; k < a.rhs_end; ++k) {
      if (op(k, "?")) ++arms;
      if (op(k, "==") && at(k - 1).kind == TokenKind::Identifier) ++subjects[at(k - 1).text];
      if (op(k, "(")) ++depth;
      if (op(k, ")")) --depth;
      if (depth == 0) {
        auto k2 = operator_kinds(k, k + 1);
        kinds.insert(k2.begin(), k2.end());
      }
    }
    bool same = std::any_of(subjects.begin(), subjects.end(), [](const auto& p) { return p.second >= 2; });
    if (arms >= 2 && same && kinds.size() >= 2) {
      add_topic(Topic::Alu, a.line, "conditional chain assigns " + std::to_string(kinds.size()) + " operations to " + a.lhs);
      return;
    }
  }
}

TopicProfile Analyzer::run() {
  // Parameter names and continuous assignments.
  for (size_t i = 0; i < t_.size(); ++i) {
    if (kw(i, "parameter") || kw(i, "localparam")) {
      for (size_t k = i + 1; k < t_.size() && !op(k, ";") && !op(k, ")"); ++k)
        if (at(k).kind == TokenKind::Identifier && op(k + 1, "=")) params_.insert(at(k).text);
    }
    if (kw(i, "integer") || kw(i, "genvar")) {
      for (size_t k = i + 1; k < t_.size() && !op(k, ";"); ++k)
        if (at(k).kind == TokenKind::Identifier) loop_vars_.insert(at(k).text);
    }
    if (kw(i, "for") && op(i + 1, "(") && at(i + 2).kind == TokenKind::Identifier) loop_vars_.insert(at(i + 2).text);
  }
  std::vector<AlwaysBlock> blocks;
  for (size_t i = 0; i < t_.size(); ++i) {
    if (kw(i, "assign")) {
      size_t stop = skip_stmt(i + 1);
      for (auto& a : assignments(i + 1, stop)) continuous_.push_back(a);
      i = stop - 1;
      continue;
    }
    if (kw(i, "function")) {
      size_t stop = i;
      while (stop < t_.size() && !kw(stop, "endfunction")) ++stop;
      analyze_cases(i, stop);
      analyze_if_chains(i, stop);
      analyze_ternaries(assignments(i, stop));
      i = stop;
      continue;
    }
    if (!(kw(i, "always") || kw(i, "always_ff") || kw(i, "always_comb") || kw(i, "always_latch"))) continue;
    AlwaysBlock blk;
    blk.line = at(i).line;
    size_t k = i + 1;
    if (op(k, "@")) {
      if (op(k + 1, "*")) {
        blk.star = true;
        k += 2;
      } else if (op(k + 1, "(")) {
        size_t close = skip_parens(k + 1);
        SensItem cur;
        for (size_t s = k + 2; s + 1 < close; ++s) {
          if (kw(s, "posedge") || kw(s, "negedge")) cur.edge = at(s).text;
          else if (op(s, "*")) blk.star = true;
          else if (kw(s, "or") || op(s, ",")) {
            if (!cur.name.empty()) blk.sens.push_back(cur);
            cur = SensItem{};
          } else if (at(s).kind == TokenKind::Identifier && cur.name.empty()) {
            cur.name = at(s).text;
          }
        }
        if (!cur.name.empty()) blk.sens.push_back(cur);
        k = close;
      } else {
        k += 2;
      }
    }
    blk.body_begin = k;
    blk.body_end = skip_stmt(k);
    blocks.push_back(blk);
    i = blk.body_end > i ? blk.body_end - 1 : i;
  }
  for (const auto& b : blocks) analyze_always(b);
  analyze_ternaries(continuous_);

  if (!counter_regs_.empty() && !has_topic(Topic::ClockDivider)) {
    for (const auto& a : continuous_) {
      if (!is_divided_clock_name(a.lhs)) continue;
      for (const auto& c : counter_regs_)
        if (range_has_ident(a.rhs_begin, a.rhs_end, c)) {
          add_topic(Topic::ClockDivider, a.line, a.lhs + " derived from counter " + c);
          break;
        }
      if (has_topic(Topic::ClockDivider)) break;
    }
  }
  // Name-based FSM fallback: a state register loaded with named states.
  if (!has_topic(Topic::Fsm)) {
    for (const auto& b : blocks) {
      if (b.edge_count() == 0) continue;
      for (const auto& a : assignments(b.body_begin, b.body_end)) {
        if (a.lhs.empty() || !is_state_name(a.lhs) || a.rhs_end != a.rhs_begin + 1) continue;
        const Token& r = at(a.rhs_begin);
        if (r.kind == TokenKind::Identifier && (params_.count(r.text) || is_state_name(r.text))) {
          add_topic(Topic::Fsm, a.line, a.lhs + " loaded with " + r.text);
          break;
        }
      }
      if (has_topic(Topic::Fsm)) break;
    }
  }
  if (p_.topics.empty()) p_.topics.insert(Topic::Other);
  return p_;
}

}  // namespace

TopicProfile analyze(const std::string& source) {
  Toks toks;
  try {
    for (auto& t : minivl::tokenize(source))
      if (t.kind != TokenKind::Directive && t.kind != TokenKind::EndOfFile) toks.push_back(std::move(t));
  } catch (const minivl::TokenizeError& e) {
    throw Error(ErrorCode::TokenizeError, e.what());
  }
  return Analyzer(std::move(toks)).run();
}

ExemplarStore ExemplarStore::load(const std::filesystem::path& dir, const CompileCheck& check) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::IoError, "exemplar directory " + dir.string() + " not found");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".jsonl") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  ExemplarStore store;
  std::set<std::string> ids;
  for (const auto& f : files) {
    for (const auto& j : read_jsonl(f)) {
      Exemplar e;
      try {
        e.id = j.at("id").get<std::string>();
        e.topic = j.at("topic").get<std::string>();
        e.instruction = j.at("instruction").get<std::string>();
        e.code = j.at("code").get<std::string>();
        std::string src = j.value("source", "Manual");
        e.source = src == "Textbook" ? ExemplarSource::Textbook : ExemplarSource::Manual;
      } catch (const Json::exception& ex) {
        throw Error(ErrorCode::CorpusInvalid, f.string() + ": " + ex.what());
      }
      auto where = f.filename().string() + " exemplar '" + e.id + "'";
      if (!ids.insert(e.id).second) throw Error(ErrorCode::CorpusInvalid, where + ": duplicate id");
      size_t start = 0;
      while (start <= e.topic.size()) {
        size_t comma = e.topic.find(',', start);
        std::string tag = trim(e.topic.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (!is_known_tag(tag)) throw Error(ErrorCode::CorpusInvalid, where + ": unknown tag '" + tag + "'");
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      if (trim(e.instruction).empty()) throw Error(ErrorCode::CorpusInvalid, where + ": empty instruction");
      if (!has_module_header(e.instruction)) throw Error(ErrorCode::CorpusInvalid, where + ": instruction lacks a module header");
      auto v = check(e.code);
      if (!v.ok) throw Error(ErrorCode::CorpusInvalid, where + ": code does not compile: " + trim(v.diagnostics));
      store.add(std::move(e));
    }
  }
  return store;
}

std::vector<Exemplar> match_exemplars(const TopicProfile& profile, const ExemplarStore& store) {
  auto tags = profile.tags();
  std::vector<std::pair<int, const Exemplar*>> hits;
  for (const auto& e : store.all()) {
    int count = 0;
    size_t start = 0;
    while (start <= e.topic.size()) {
      size_t comma = e.topic.find(',', start);
      std::string tag = trim(e.topic.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (std::find(tags.begin(), tags.end(), tag) != tags.end()) ++count;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (count > 0) hits.emplace_back(count, &e);
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second->id < b.second->id;
  });
  std::vector<Exemplar> out;
  for (const auto& [c, e] : hits) out.push_back(*e);
  return out;
}

}  // namespace haven
