#include "minivl/simulator.hpp"

#include <deque>
#include <map>

#include "eval.hpp"

namespace minivl {

namespace {

struct StopSimulation {};

struct Frame {
  const CStmt* stmt = nullptr;
  size_t pc = 0;
  int64_t counter = 0;
};

struct Proc {
  const CStmt* root = nullptr;
  bool is_always = false;
  std::string scope;
  std::vector<Frame> stack;
  bool queued = false;
  bool done = false;
  bool waiting = false;
  uint64_t wait_gen = 0;
  const CStmt* wait_stmt = nullptr;
  std::vector<Logic> last;
  std::vector<ResolvedWrite> pending;
};

enum class EventKind { Resume, Assign, Nba };

struct Event {
  EventKind kind = EventKind::Resume;
  int id = -1;
  std::vector<ResolvedWrite> writes;
};

struct Strobe {
  const CStmt* stmt;
  std::string scope;
};

int decimal_digits(uint64_t v) {
  int n = 1;
  while (v >= 10) {
    v /= 10;
    ++n;
  }
  return n;
}

char unknown_digit(const Logic& v, int lsb, int bits) {
  uint64_t m = Logic::mask(bits) << lsb;
  uint64_t xz = v.xz & m;
  if (xz == 0) return 0;
  bool all_unknown = xz == (m & Logic::mask(v.width));
  bool any_x = (xz & ~v.val) != 0;
  bool any_z = (xz & v.val) != 0;
  if (all_unknown && !any_z) return 'x';
  if (all_unknown && !any_x) return 'z';
  return any_x ? 'X' : 'Z';
}

std::string format_radix(const Logic& v, int bits_per_digit, bool minimal) {
  static const char* kDigits = "0123456789abcdef";
  int digits = (v.width + bits_per_digit - 1) / bits_per_digit;
  std::string out;
  for (int d = digits - 1; d >= 0; --d) {
    int lsb = d * bits_per_digit;
    int bits = std::min(bits_per_digit, v.width - lsb);
    char u = unknown_digit(v, lsb, bits);
    if (u) {
      out += u;
    } else {
      out += kDigits[(v.val >> lsb) & Logic::mask(bits)];
    }
  }
  if (minimal) {
    size_t first = out.find_first_not_of('0');
    out = first == std::string::npos ? "0" : out.substr(first);
  }
  return out;
}

std::string format_decimal(const Logic& v, bool minimal) {
  int natural;
  if (v.is_signed) {
    natural = decimal_digits(uint64_t{1} << (v.width - 1)) + 1;
  } else {
    natural = decimal_digits(Logic::mask(v.width));
  }
  std::string text;
  if (v.has_unknown()) {
    text = std::string(1, unknown_digit(v, 0, v.width));
  } else if (v.is_signed && v.to_int64() < 0) {
    int64_t s = v.to_int64();
    uint64_t mag = s == INT64_MIN ? uint64_t{1} << 63 : static_cast<uint64_t>(-s);
    text = "-" + std::to_string(mag);
  } else {
    text = std::to_string(v.val & Logic::mask(v.width));
  }
  if (!minimal && static_cast<int>(text.size()) < natural)
    text = std::string(static_cast<size_t>(natural) - text.size(), ' ') + text;
  return text;
}

std::string format_string(const Logic& v) {
  std::string out;
  for (int lsb = ((v.width + 7) / 8 - 1) * 8; lsb >= 0; lsb -= 8) {
    auto c = static_cast<char>((v.val >> lsb) & 0xff);
    if (c != 0) out += c;
  }
  return out;
}

bool case_equal(const Logic& a, const Logic& b, const std::string& kind) {
  uint64_t m = Logic::mask(a.width);
  uint64_t dc = 0;
  if (kind == "casez") dc = (a.xz & a.val) | (b.xz & b.val);
  if (kind == "casex") dc = a.xz | b.xz;
  uint64_t care = m & ~dc;
  return (((a.val ^ b.val) | (a.xz ^ b.xz)) & care) == 0;
}

class Simulator {
 public:
  Simulator(Design design, const SimOptions& options)
      : design_(std::move(design)), opt_(options), eval_(&design_) {
    eval_.set_call_hook([this](int f, const std::vector<Logic>& args) { return call_function(f, args); });
  }

  SimResult run() {
    SimResult result;
    size_t n = design_.signals.size();
    assigns_by_sig_.resize(n);
    waiters_.resize(n);
    assign_queued_.assign(design_.assigns.size(), false);
    for (size_t i = 0; i < design_.assigns.size(); ++i)
      for (int s : design_.assigns[i].sensitivity) assigns_by_sig_[static_cast<size_t>(s)].push_back(static_cast<int>(i));

    for (const auto& p : design_.processes) {
      Proc proc;
      proc.root = &p.body;
      proc.is_always = p.is_always;
      proc.scope = p.scope;
      proc.stack.push_back(Frame{proc.root, 0, 0});
      procs_.push_back(std::move(proc));
    }
    for (size_t i = 0; i < procs_.size(); ++i) enqueue_proc(static_cast<int>(i));
    for (size_t i = 0; i < design_.assigns.size(); ++i) enqueue_assign(static_cast<int>(i));

    try {
      while (true) {
        run_timestep();
        if (future_.empty()) break;
        auto it = future_.begin();
        if (it->first > opt_.max_time) {
          throw RuntimeError("simulation time limit of " + std::to_string(opt_.max_time) +
                             " reached without $finish");
        }
        now_ = it->first;
        for (auto& ev : it->second) {
          if (ev.kind == EventKind::Nba)
            nba_.push_back(std::move(ev.writes));
          else
            active_.push_back(std::move(ev));
        }
        future_.erase(it);
      }
    } catch (const StopSimulation&) {
      result.finished = true;
    } catch (const RuntimeError& e) {
      exit_code_ = 2;
      result.diagnostics.push_back(Diagnostic{"", 0, std::string(e.what()) + " (at time " + std::to_string(now_) + ")"});
    }
    result.exit_code = exit_code_;
    result.output = std::move(out_);
    result.end_time = now_;
    return result;
  }

 private:
  Signal& sig(int id) { return design_.signals[static_cast<size_t>(id)]; }

  void count_step() {
    if (++steps_ > opt_.max_steps)
      throw RuntimeError("step limit of " + std::to_string(opt_.max_steps) + " exceeded (infinite loop?)");
  }

  void enqueue_proc(int id) {
    Proc& p = procs_[static_cast<size_t>(id)];
    if (p.queued || p.done) return;
    p.queued = true;
    active_.push_back(Event{EventKind::Resume, id, {}});
  }

  void enqueue_assign(int id) {
    if (assign_queued_[static_cast<size_t>(id)]) return;
    assign_queued_[static_cast<size_t>(id)] = true;
    active_.push_back(Event{EventKind::Assign, id, {}});
  }

  void run_timestep() {
    uint64_t deltas = 0;
    while (true) {
      while (!active_.empty()) {
        Event ev = std::move(active_.front());
        active_.pop_front();
        if (ev.kind == EventKind::Assign) {
          assign_queued_[static_cast<size_t>(ev.id)] = false;
          run_assign(design_.assigns[static_cast<size_t>(ev.id)]);
        } else {
          Proc& p = procs_[static_cast<size_t>(ev.id)];
          p.queued = false;
          step_proc(ev.id);
        }
      }
      if (!nba_.empty()) {
        if (++deltas > opt_.max_deltas)
          throw RuntimeError("delta cycle limit exceeded (combinational loop?)");
        auto batch = std::move(nba_);
        nba_.clear();
        for (const auto& writes : batch)
          for (const auto& w : writes) write(w);
        continue;
      }
      if (!strobes_.empty()) {
        auto strobes = std::move(strobes_);
        strobes_.clear();
        eval_.set_time(now_);
        for (const auto& s : strobes) emit(format_args(*s.stmt, 0, s.scope, 'd') + "\n");
      }
      break;
    }
  }

  void run_assign(const ContAssign& a) {
    count_step();
    eval_.set_time(now_);
    Logic v = eval_.eval_for(a.rhs, a.lhs.width);
    for (const auto& w : eval_.resolve(a.lhs, v)) write(w);
  }

  void write(const ResolvedWrite& w) {
    if (apply_write(sig(w.sig), w)) notify(w.sig);
  }

  void notify(int id) {
    for (int a : assigns_by_sig_[static_cast<size_t>(id)]) enqueue_assign(a);
    auto& list = waiters_[static_cast<size_t>(id)];
    if (list.empty()) return;
    auto current = std::move(list);
    list.clear();
    std::vector<std::pair<int, uint64_t>> keep;
    for (const auto& [pid, gen] : current) {
      Proc& p = procs_[static_cast<size_t>(pid)];
      if (!p.waiting || p.wait_gen != gen) continue;
      if (triggered(p, id)) {
        p.waiting = false;
        enqueue_proc(pid);
      } else {
        keep.emplace_back(pid, gen);
      }
    }
    auto& again = waiters_[static_cast<size_t>(id)];
    again.insert(again.end(), keep.begin(), keep.end());
  }

  static int lsb_state(const Logic& v) {
    if (!v.bit_known(0)) return 2;
    return v.bit(0);
  }

  bool triggered(Proc& p, int changed_sig) {
    const CStmt& s = *p.wait_stmt;
    if (s.kind == CStmtKind::Wait) return eval_.eval(s.cond).truthiness() == 1;
    bool fire = false;
    for (size_t i = 0; i < s.events.size(); ++i) {
      const EventSpec& ev = s.events[i];
      if (ev.expr.kind == CExprKind::Sig && sig(ev.expr.sig).is_array) {
        if (ev.expr.sig == changed_sig) fire = true;
        continue;
      }
      Logic now = eval_.eval(ev.expr);
      Logic& old = p.last[i];
      if (ev.edge == ast::EdgeKind::Any) {
        if (!now.identical(old)) fire = true;
      } else {
        int a = lsb_state(old), b = lsb_state(now);
        if (ev.edge == ast::EdgeKind::Pos && ((a == 0 && b != 0) || (a == 2 && b == 1))) fire = true;
        if (ev.edge == ast::EdgeKind::Neg && ((a == 1 && b != 1) || (a == 2 && b == 0))) fire = true;
      }
      old = now;
    }
    return fire;
  }

  void arm(int pid, const CStmt& s) {
    Proc& p = procs_[static_cast<size_t>(pid)];
    p.waiting = true;
    ++p.wait_gen;
    p.wait_stmt = &s;
    p.last.clear();
    for (const auto& ev : s.events) {
      bool is_mem = ev.expr.kind == CExprKind::Sig && sig(ev.expr.sig).is_array;
      p.last.push_back(is_mem ? Logic{} : eval_.eval(ev.expr));
      for (int id : ev.sensitivity) waiters_[static_cast<size_t>(id)].emplace_back(pid, p.wait_gen);
    }
  }

  uint64_t delay_amount(const CExpr& e) {
    Logic d = eval_.eval(e);
    if (d.has_unknown()) return 0;
    return d.val & Logic::mask(d.width);
  }

  void schedule_resume(int pid, uint64_t d) {
    if (d == 0) {
      Proc& p = procs_[static_cast<size_t>(pid)];
      p.queued = true;
      active_.push_back(Event{EventKind::Resume, pid, {}});
      return;
    }
    future_[now_ + d].push_back(Event{EventKind::Resume, pid, {}});
  }

  int match_case(const CStmt& s) {
    int w = s.cond.width;
    bool is_signed = s.cond.is_signed;
    for (const auto& labels : s.labels)
      for (const auto& l : labels) {
        w = std::max(w, l.width);
        is_signed = is_signed && l.is_signed;
      }
    Logic subject = eval_.eval(s.cond, w, is_signed);
    int fallback = -1;
    for (size_t i = 0; i < s.labels.size(); ++i) {
      if (s.labels[i].empty()) {
        fallback = static_cast<int>(i);
        continue;
      }
      for (const auto& l : s.labels[i])
        if (case_equal(subject, eval_.eval(l, w, is_signed), s.case_kind)) return static_cast<int>(i);
    }
    return fallback;
  }

  void step_proc(int pid) {
    eval_.set_time(now_);
    Proc& p = procs_[static_cast<size_t>(pid)];
    auto push = [&p](const CStmt* s) { p.stack.push_back(Frame{s, 0, 0}); };
    while (true) {
      if (p.stack.empty()) {
        if (!p.is_always) {
          p.done = true;
          return;
        }
        push(p.root);
      }
      count_step();
      Frame& f = p.stack.back();
      const CStmt& s = *f.stmt;
      switch (s.kind) {
        case CStmtKind::Null:
          p.stack.pop_back();
          break;
        case CStmtKind::Block:
          if (f.pc < s.body.size())
            push(&s.body[f.pc++]);
          else
            p.stack.pop_back();
          break;
        case CStmtKind::If:
          if (f.pc == 0) {
            f.pc = 1;
            int t = eval_.eval(s.cond).truthiness();
            if (t == 1)
              push(&s.body[0]);
            else if (s.body.size() > 1)
              push(&s.body[1]);
          } else {
            p.stack.pop_back();
          }
          break;
        case CStmtKind::Case:
          if (f.pc == 0) {
            f.pc = 1;
            int idx = match_case(s);
            if (idx >= 0) push(&s.body[static_cast<size_t>(idx)]);
          } else {
            p.stack.pop_back();
          }
          break;
        case CStmtKind::For:
          if (f.pc == 0) {
            f.pc = 1;
            push(&s.body[1]);
          } else if (f.pc == 1) {
            if (eval_.eval(s.cond).truthiness() == 1) {
              f.pc = 2;
              push(&s.body[0]);
            } else {
              p.stack.pop_back();
            }
          } else {
            f.pc = 1;
            push(&s.body[2]);
          }
          break;
        case CStmtKind::While:
          if (eval_.eval(s.cond).truthiness() == 1)
            push(&s.body[0]);
          else
            p.stack.pop_back();
          break;
        case CStmtKind::Repeat:
          if (f.pc == 0) {
            Logic n = eval_.eval(s.cond);
            f.counter = n.has_unknown() ? 0 : n.to_int64();
            f.pc = 1;
          } else if (f.counter-- > 0) {
            push(&s.body[0]);
          } else {
            p.stack.pop_back();
          }
          break;
        case CStmtKind::Forever:
          push(&s.body[0]);
          break;
        case CStmtKind::Delay:
          if (f.pc == 0) {
            f.pc = 1;
            schedule_resume(pid, delay_amount(s.delay));
            return;
          }
          if (f.pc == 1) {
            f.pc = 2;
            push(&s.body[0]);
          } else {
            p.stack.pop_back();
          }
          break;
        case CStmtKind::Event:
          if (f.pc == 0) {
            f.pc = 1;
            arm(pid, s);
            return;
          }
          if (f.pc == 1) {
            f.pc = 2;
            push(&s.body[0]);
          } else {
            p.stack.pop_back();
          }
          break;
        case CStmtKind::Wait:
          if (f.pc == 0) {
            if (eval_.eval(s.cond).truthiness() == 1) {
              f.pc = 2;
              push(&s.body[0]);
            } else {
              f.pc = 1;
              arm(pid, s);
              return;
            }
          } else if (f.pc == 1) {
            f.pc = 0;
          } else {
            p.stack.pop_back();
          }
          break;
        case CStmtKind::Assign:
          if (s.nonblocking) {
            auto writes = eval_.resolve(s.lhs, eval_.eval_for(s.rhs, s.lhs.width));
            uint64_t d = s.has_delay ? delay_amount(s.delay) : 0;
            if (d == 0)
              nba_.push_back(std::move(writes));
            else
              future_[now_ + d].push_back(Event{EventKind::Nba, -1, std::move(writes)});
            p.stack.pop_back();
          } else if (!s.has_delay) {
            for (const auto& w : eval_.resolve(s.lhs, eval_.eval_for(s.rhs, s.lhs.width))) write(w);
            p.stack.pop_back();
          } else if (f.pc == 0) {
            f.pc = 1;
            p.pending = eval_.resolve(s.lhs, eval_.eval_for(s.rhs, s.lhs.width));
            schedule_resume(pid, delay_amount(s.delay));
            return;
          } else {
            auto pending = std::move(p.pending);
            p.pending.clear();
            for (const auto& w : pending) write(w);
            p.stack.pop_back();
          }
          break;
        case CStmtKind::SysTask:
          p.stack.pop_back();
          system_task(s, p.scope);
          break;
        case CStmtKind::Disable: {
          p.stack.pop_back();
          for (size_t i = p.stack.size(); i-- > 0;) {
            const CStmt* b = p.stack[i].stmt;
            if (b->kind == CStmtKind::Block && b->name == s.name) {
              p.stack.resize(i);
              break;
            }
          }
          break;
        }
      }
    }
  }

  // Functions run to completion without suspending.
  Logic call_function(int f, const std::vector<Logic>& args) {
    if (++call_depth_ > 256) throw RuntimeError("function call depth exceeds 256");
    const Function& fn = design_.functions[static_cast<size_t>(f)];
    for (size_t i = 0; i < fn.arg_sigs.size() && i < args.size(); ++i) {
      Signal& s = sig(fn.arg_sigs[i]);
      Logic v = args[i].resized(s.width);
      v.is_signed = s.is_signed;
      s.value = v;
    }
    Signal& r = sig(fn.result_sig);
    r.value = Logic::all_x(r.width);
    r.value.is_signed = r.is_signed;
    exec_sync(fn.body, fn.name);
    disable_target_.clear();
    --call_depth_;
    Logic out = sig(fn.result_sig).value;
    out.is_signed = sig(fn.result_sig).is_signed;
    return out;
  }

  void exec_sync(const CStmt& s, const std::string& scope) {
    count_step();
    switch (s.kind) {
      case CStmtKind::Null:
        return;
      case CStmtKind::Block:
        for (const auto& b : s.body) {
          exec_sync(b, scope);
          if (!disable_target_.empty()) {
            if (disable_target_ == s.name) disable_target_.clear();
            return;
          }
        }
        return;
      case CStmtKind::If: {
        int t = eval_.eval(s.cond).truthiness();
        if (t == 1)
          exec_sync(s.body[0], scope);
        else if (s.body.size() > 1)
          exec_sync(s.body[1], scope);
        return;
      }
      case CStmtKind::Case: {
        int idx = match_case(s);
        if (idx >= 0) exec_sync(s.body[static_cast<size_t>(idx)], scope);
        return;
      }
      case CStmtKind::For:
        exec_sync(s.body[1], scope);
        while (disable_target_.empty() && eval_.eval(s.cond).truthiness() == 1) {
          exec_sync(s.body[0], scope);
          if (!disable_target_.empty()) return;
          exec_sync(s.body[2], scope);
          count_step();
        }
        return;
      case CStmtKind::While:
        while (disable_target_.empty() && eval_.eval(s.cond).truthiness() == 1) {
          exec_sync(s.body[0], scope);
          count_step();
        }
        return;
      case CStmtKind::Repeat: {
        Logic n = eval_.eval(s.cond);
        int64_t count = n.has_unknown() ? 0 : n.to_int64();
        for (int64_t i = 0; i < count && disable_target_.empty(); ++i) exec_sync(s.body[0], scope);
        return;
      }
      case CStmtKind::Forever:
        while (disable_target_.empty()) exec_sync(s.body[0], scope);
        return;
      case CStmtKind::Assign: {
        auto writes = eval_.resolve(s.lhs, eval_.eval_for(s.rhs, s.lhs.width));
        if (s.nonblocking)
          nba_.push_back(std::move(writes));
        else
          for (const auto& w : writes) write(w);
        return;
      }
      case CStmtKind::SysTask:
        system_task(s, scope);
        return;
      case CStmtKind::Disable:
        disable_target_ = s.name;
        return;
      case CStmtKind::Delay:
      case CStmtKind::Event:
      case CStmtKind::Wait:
        throw RuntimeError("timing control inside a function");
    }
  }

  void emit(const std::string& text) {
    out_ += text;
    if (out_.size() > opt_.max_output) throw RuntimeError("output limit exceeded");
  }

  void system_task(const CStmt& s, const std::string& scope) {
    const std::string& n = s.name;
    if (n == "$finish" || n == "$stop") throw StopSimulation{};
    if (n == "$strobe") {
      strobes_.push_back(Strobe{&s, scope});
      return;
    }
    if (n == "$write") {
      emit(format_args(s, 0, scope, 'd'));
      return;
    }
    if (n == "$display" || n == "$displayb" || n == "$displayh") {
      char radix = n == "$displayb" ? 'b' : n == "$displayh" ? 'h' : 'd';
      emit(format_args(s, 0, scope, radix) + "\n");
      return;
    }
    if (n == "$fatal") {
      // optional leading finish number
      size_t first = 0;
      if (!s.args.empty() && s.arg_present[0] && s.args[0].kind != CExprKind::String) first = 1;
      emit("Fatal: " + format_args(s, first, scope, 'd') + "\n");
      exit_code_ = 1;
      throw StopSimulation{};
    }
    std::string prefix = n == "$error" ? "Error: " : n == "$warning" ? "Warning: " : "Info: ";
    emit(prefix + format_args(s, 0, scope, 'd') + "\n");
  }

  std::string format_value(const Logic& v, char spec, bool minimal, const std::string& scope) {
    switch (spec) {
      case 'd':
        return format_decimal(v, minimal);
      case 'b':
        return format_radix(v, 1, minimal);
      case 'o':
        return format_radix(v, 3, minimal);
      case 'h':
      case 'x':
        return format_radix(v, 4, minimal);
      case 't': {
        std::string t = format_decimal(v.as_signed(false), true);
        if (!minimal && t.size() < 20) t = std::string(20 - t.size(), ' ') + t;
        return t;
      }
      case 's':
        return format_string(v);
      case 'c':
        return std::string(1, static_cast<char>(v.val & 0xff));
      case 'm':
        return scope;
      default:
        return format_decimal(v, minimal);
    }
  }

  std::string format_args(const CStmt& s, size_t first, const std::string& scope, char radix) {
    std::string out;
    size_t i = first;
    while (i < s.args.size()) {
      if (!s.arg_present[i]) {
        out += ' ';
        ++i;
        continue;
      }
      const CExpr& a = s.args[i];
      if (a.kind == CExprKind::String) {
        i = apply_format(a.str, s, i + 1, scope, out);
        continue;
      }
      out += format_value(eval_.eval(a), radix, false, scope);
      ++i;
    }
    return out;
  }

  size_t apply_format(const std::string& fmt, const CStmt& s, size_t next, const std::string& scope,
                      std::string& out) {
    for (size_t k = 0; k < fmt.size(); ++k) {
      char c = fmt[k];
      if (c != '%') {
        out += c;
        continue;
      }
      if (++k >= fmt.size()) {
        out += '%';
        break;
      }
      bool left = false;
      if (fmt[k] == '-') {
        left = true;
        ++k;
      }
      std::string digits;
      while (k < fmt.size() && std::isdigit(static_cast<unsigned char>(fmt[k]))) digits += fmt[k++];
      if (k >= fmt.size()) break;
      char spec = static_cast<char>(std::tolower(static_cast<unsigned char>(fmt[k])));
      if (spec == '%') {
        out += '%';
        continue;
      }
      if (spec == 'm') {
        out += scope;
        continue;
      }
      if (next >= s.args.size()) {
        out += "<missing>";
        continue;
      }
      Logic v = s.arg_present[next] ? eval_.eval(s.args[next]) : Logic::all_z(1);
      if (s.arg_present[next] && s.args[next].kind == CExprKind::String && spec == 's') {
        ++next;
        out += pad(s.args[next - 1].str, digits, left);
        continue;
      }
      ++next;
      bool minimal = !digits.empty();
      out += pad(format_value(v, spec, minimal, scope), digits, left);
    }
    return next;
  }

  static std::string pad(std::string text, const std::string& digits, bool left) {
    if (digits.empty()) return text;
    size_t w = static_cast<size_t>(std::stoul(digits));
    if (text.size() >= w) return text;
    if (left) return text + std::string(w - text.size(), ' ');
    return std::string(w - text.size(), ' ') + text;
  }

  Design design_;
  SimOptions opt_;
  Evaluator eval_;
  uint64_t now_ = 0;
  uint64_t steps_ = 0;
  int call_depth_ = 0;
  int exit_code_ = 0;
  std::string out_;
  std::string disable_target_;
  std::vector<Proc> procs_;
  std::deque<Event> active_;
  std::vector<std::vector<ResolvedWrite>> nba_;
  std::map<uint64_t, std::vector<Event>> future_;
  std::vector<Strobe> strobes_;
  std::vector<std::vector<int>> assigns_by_sig_;
  std::vector<std::vector<std::pair<int, uint64_t>>> waiters_;
  std::vector<bool> assign_queued_;
};

}  // namespace

SimResult simulate(Design design, const SimOptions& options) {
  return Simulator(std::move(design), options).run();
}

}  // namespace minivl
