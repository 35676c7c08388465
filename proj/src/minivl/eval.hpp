#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "minivl/design.hpp"

namespace minivl {

class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A resolved write into one signal: bits [lsb, lsb+width) of word `slot`
// (slot < 0 for plain vectors).
struct ResolvedWrite {
  int sig = -1;
  int slot = -1;
  int lsb = 0;
  int width = 0;
  Logic value;
};

class Evaluator {
 public:
  using CallHook = std::function<Logic(int func, const std::vector<Logic>& args)>;

  // `design` may be null for constant evaluation; any signal reference then throws.
  explicit Evaluator(const Design* design) : design_(design) {}

  void set_call_hook(CallHook hook) { call_ = std::move(hook); }
  void set_time(uint64_t t) { now_ = t; }

  // Value of `e` in a context of `ctx_width` bits and signedness `ctx_signed`;
  // the result has width max(e.width, ctx_width).
  Logic eval(const CExpr& e, int ctx_width, bool ctx_signed) const;
  // Self-determined evaluation.
  Logic eval(const CExpr& e) const { return eval(e, e.width, e.is_signed); }
  // Evaluation for assignment into a `target_width`-bit destination.
  Logic eval_for(const CExpr& e, int target_width) const {
    return eval(e, std::max(e.width, target_width), e.is_signed).resized(target_width);
  }

  // Splits `value` (already sized to lv.width) into concrete writes; index
  // expressions are evaluated now. Writes with unknown or out-of-range indices are dropped.
  std::vector<ResolvedWrite> resolve(const LValue& lv, const Logic& value) const;

 private:
  Logic load(const CExpr& e) const;
  const Design* design_;
  CallHook call_;
  uint64_t now_ = 0;
  mutable uint32_t random_state_ = 0x1234567u;
};

// Applies a resolved write to a signal; returns true when the stored value changed.
bool apply_write(Signal& s, const ResolvedWrite& w);

}  // namespace minivl
