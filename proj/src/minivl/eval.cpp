#include "eval.hpp"

namespace minivl {

namespace {

Logic extract(const Logic& v, int lsb, int width) {
  Logic r;
  r.width = width;
  if (lsb >= 64) {
    r.xz = Logic::mask(width);
    return r;
  }
  r.val = (v.val >> lsb) & Logic::mask(width);
  r.xz = (v.xz >> lsb) & Logic::mask(width);
  // Bits beyond the source vector read as X.
  int avail = v.width - lsb;
  if (avail < width) {
    uint64_t beyond = Logic::mask(width) & ~Logic::mask(std::max(avail, 0));
    r.xz |= beyond;
    r.val &= ~beyond;
  }
  return r;
}

}  // namespace

Logic Evaluator::load(const CExpr& e) const {
  if (!design_) throw RuntimeError("not a constant expression");
  const Signal& s = design_->signals[static_cast<size_t>(e.sig)];
  switch (e.kind) {
    case CExprKind::Sig:
      return s.value;
    case CExprKind::BitSelect: {
      Logic idx = eval(e.args[0]);
      if (idx.has_unknown()) return Logic::all_x(1);
      int pos = s.position(idx.to_int64());
      if (pos < 0) return Logic::all_x(1);
      return extract(s.value, pos, 1);
    }
    case CExprKind::PartSelect:
      return extract(s.value, e.offset, e.width);
    case CExprKind::IndexedSelect: {
      Logic idx = eval(e.args[0]);
      if (idx.has_unknown()) return Logic::all_x(e.width);
      int64_t start = idx.to_int64();
      // [start +: w] covers start..start+w-1 ; [start -: w] covers start-w+1..start
      int64_t lo_index = e.op == "-:" ? start - e.width + 1 : start;
      int64_t hi_index = lo_index + e.width - 1;
      int p1 = s.position(lo_index), p2 = s.position(hi_index);
      if (p1 < 0 || p2 < 0) return Logic::all_x(e.width);
      return extract(s.value, std::min(p1, p2), e.width);
    }
    case CExprKind::MemWord: {
      Logic idx = eval(e.args[0]);
      if (idx.has_unknown()) return Logic::all_x(e.width);
      int slot = s.word_slot(idx.to_int64());
      if (slot < 0) return Logic::all_x(e.width);
      return s.words[static_cast<size_t>(slot)];
    }
    default:
      throw RuntimeError("bad load");
  }
}

Logic Evaluator::eval(const CExpr& e, int ctx_width, bool ctx_signed) const {
  int w = std::max(e.width, ctx_width);
  auto finish = [&](Logic v) {
    v.is_signed = v.is_signed && ctx_signed;
    return v.resized(w);
  };
  switch (e.kind) {
    case CExprKind::Const: {
      Logic v = e.cval;
      v.is_signed = e.is_signed && ctx_signed;
      return v.resized(w);
    }
    case CExprKind::String:
      return Logic::known(e.cval.val, e.width).resized(w);
    case CExprKind::Sig:
    case CExprKind::BitSelect:
    case CExprKind::PartSelect:
    case CExprKind::IndexedSelect:
    case CExprKind::MemWord: {
      Logic v = load(e);
      v.is_signed = e.is_signed && ctx_signed;
      return v.resized(w);
    }
    case CExprKind::Unary: {
      const std::string& op = e.op;
      if (op == "~") return ops::bit_not(eval(e.args[0], w, ctx_signed));
      if (op == "-") return ops::negate(eval(e.args[0], w, ctx_signed), w);
      if (op == "+") return eval(e.args[0], w, ctx_signed);
      if (op == "!") return ops::logical_not(eval(e.args[0])).resized(w);
      return ops::reduce(op, eval(e.args[0])).resized(w);
    }
    case CExprKind::Binary: {
      const std::string& op = e.op;
      if (op == "&&" || op == "||") {
        Logic a = eval(e.args[0]);
        // short-circuit keeps function side effects sane
        if (op == "&&" && a.truthiness() == 0) return Logic::known(0, w);
        if (op == "||" && a.truthiness() == 1) return Logic::known(1, w);
        Logic b = eval(e.args[1]);
        return (op == "&&" ? ops::logical_and(a, b) : ops::logical_or(a, b)).resized(w);
      }
      if (op == "==" || op == "!=" || op == "===" || op == "!==" || op == "<" || op == "<=" ||
          op == ">" || op == ">=") {
        const CExpr& l = e.args[0];
        const CExpr& r = e.args[1];
        int ow = std::max(l.width, r.width);
        bool os = l.is_signed && r.is_signed;
        return ops::compare(op, eval(l, ow, os), eval(r, ow, os)).resized(w);
      }
      if (op == "<<" || op == ">>" || op == "<<<" || op == ">>>") {
        Logic a = eval(e.args[0], w, ctx_signed);
        return finish(ops::shift(op, a, eval(e.args[1]), w));
      }
      if (op == "**") {
        Logic a = eval(e.args[0], w, ctx_signed);
        Logic b = eval(e.args[1]);
        b.is_signed = b.is_signed && a.is_signed;
        Logic r = ops::arith(op, a, b.resized(w), w);
        return finish(r);
      }
      Logic a = eval(e.args[0], w, ctx_signed);
      Logic b = eval(e.args[1], w, ctx_signed);
      if (op == "&") return finish(ops::bit_and(a, b));
      if (op == "|") return finish(ops::bit_or(a, b));
      if (op == "^") return finish(ops::bit_xor(a, b));
      if (op == "~^" || op == "^~") return finish(ops::bit_xnor(a, b));
      return finish(ops::arith(op, a, b, w));
    }
    case CExprKind::Ternary: {
      Logic c = eval(e.args[0]);
      int t = c.truthiness();
      if (t == 1) return eval(e.args[1], w, ctx_signed);
      if (t == 0) return eval(e.args[2], w, ctx_signed);
      return ops::merge(eval(e.args[1], w, ctx_signed), eval(e.args[2], w, ctx_signed));
    }
    case CExprKind::Concat:
    case CExprKind::Replicate: {
      Logic acc;
      acc.width = 0;
      for (int rep = 0; rep < e.repeat; ++rep) {
        for (const CExpr& part : e.args) {
          Logic p = eval(part);
          if (acc.width + p.width > 64) throw RuntimeError("concatenation wider than 64 bits");
          uint64_t pm = Logic::mask(p.width);
          acc.val = (p.width >= 64 ? 0 : acc.val << p.width) | (p.val & pm);
          acc.xz = (p.width >= 64 ? 0 : acc.xz << p.width) | (p.xz & pm);
          acc.width += p.width;
        }
      }
      acc.is_signed = false;
      if (acc.width == 0) acc.width = 1;
      return acc.resized(w);
    }
    case CExprKind::Call: {
      if (!call_) throw RuntimeError("function call in constant expression");
      std::vector<Logic> args;
      for (const CExpr& a : e.args) args.push_back(eval(a));
      Logic r = call_(e.func, args);
      r.is_signed = e.is_signed && ctx_signed;
      return r.resized(w);
    }
    case CExprKind::SysTime:
      if (!design_) throw RuntimeError("$time in constant expression");
      return Logic::known(now_, 64).resized(w);
    case CExprKind::SysRandom: {
      // xorshift32: deterministic across runs
      uint32_t x = random_state_;
      x ^= x << 13;
      x ^= x >> 17;
      x ^= x << 5;
      random_state_ = x;
      Logic v = Logic::known(x, 32, e.is_signed && ctx_signed);
      return v.resized(w);
    }
    case CExprKind::SysSigned:
    case CExprKind::SysUnsigned: {
      Logic v = eval(e.args[0]);
      v.is_signed = e.kind == CExprKind::SysSigned && ctx_signed;
      return v.resized(w);
    }
  }
  throw RuntimeError("unhandled expression");
}

std::vector<ResolvedWrite> Evaluator::resolve(const LValue& lv, const Logic& value) const {
  std::vector<ResolvedWrite> out;
  int shift = lv.width;
  for (const LvPart& part : lv.parts) {
    shift -= part.width;
    Logic piece = extract(value.resized(lv.width), shift, part.width);
    const Signal& s = design_->signals[static_cast<size_t>(part.sig)];
    ResolvedWrite w;
    w.sig = part.sig;
    w.width = part.width;
    w.value = piece;
    switch (part.kind) {
      case LvPart::Kind::Whole:
        w.lsb = 0;
        break;
      case LvPart::Kind::Part:
        w.lsb = part.offset;
        break;
      case LvPart::Kind::Bit: {
        Logic idx = eval(*part.index);
        if (idx.has_unknown()) continue;
        int pos = s.position(idx.to_int64());
        if (pos < 0) continue;
        w.lsb = pos;
        break;
      }
      case LvPart::Kind::Indexed: {
        Logic idx = eval(*part.index);
        if (idx.has_unknown()) continue;
        int64_t start = idx.to_int64();
        int64_t lo_index = part.down ? start - part.width + 1 : start;
        int p1 = s.position(lo_index), p2 = s.position(lo_index + part.width - 1);
        if (p1 < 0 || p2 < 0) continue;
        w.lsb = std::min(p1, p2);
        break;
      }
      case LvPart::Kind::Word: {
        Logic idx = eval(*part.index);
        if (idx.has_unknown()) continue;
        int slot = s.word_slot(idx.to_int64());
        if (slot < 0) continue;
        w.slot = slot;
        w.lsb = 0;
        break;
      }
    }
    out.push_back(w);
  }
  return out;
}

bool apply_write(Signal& s, const ResolvedWrite& w) {
  Logic& target = w.slot >= 0 ? s.words[static_cast<size_t>(w.slot)] : s.value;
  uint64_t m = Logic::mask(w.width);
  uint64_t field = w.lsb >= 64 ? 0 : (m << w.lsb) & Logic::mask(target.width);
  uint64_t nv = (target.val & ~field) | ((w.value.val & m) << w.lsb & field);
  uint64_t nx = (target.xz & ~field) | ((w.value.xz & m) << w.lsb & field);
  bool changed = nv != target.val || nx != target.xz;
  target.val = nv;
  target.xz = nx;
  return changed;
}

}  // namespace minivl
