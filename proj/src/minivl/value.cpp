#include "minivl/value.hpp"

#include <cctype>
#include <stdexcept>

namespace minivl {

Logic Logic::resized(int w) const {
  Logic r;
  r.width = w;
  r.is_signed = is_signed;
  uint64_t m = mask(w);
  uint64_t v = val & mask(width);
  uint64_t x = xz & mask(width);
  if (w > width && is_signed && width > 0) {
    uint64_t ext = mask(w) & ~mask(width);
    if ((v >> (width - 1)) & 1) v |= ext;
    if ((x >> (width - 1)) & 1) x |= ext;
  }
  r.val = v & m;
  r.xz = x & m;
  return r;
}

int64_t Logic::to_int64() const {
  uint64_t v = val & mask(width);
  if (is_signed && width < 64 && ((v >> (width - 1)) & 1)) v |= ~mask(width);
  return static_cast<int64_t>(v);
}

int Logic::truthiness() const {
  uint64_t m = mask(width);
  if ((val & ~xz & m) != 0) return 1;
  if ((xz & m) == 0) return 0;
  return -1;
}

std::string Logic::to_binary() const {
  std::string s;
  for (int i = width - 1; i >= 0; --i) {
    if (bit_known(i)) {
      s += bit(i) ? '1' : '0';
    } else {
      s += bit(i) ? 'z' : 'x';
    }
  }
  return s;
}

Logic parse_number(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (c != '_') text += c;
  size_t tick = text.find('\'');
  if (tick == std::string::npos) {
    if (text.find('.') != std::string::npos) throw std::invalid_argument("real literals are not supported");
    if (text.empty()) throw std::invalid_argument("empty number");
    uint64_t v = 0;
    for (char c : text) {
      if (!std::isdigit(static_cast<unsigned char>(c))) throw std::invalid_argument("bad decimal literal " + raw);
      v = v * 10 + static_cast<uint64_t>(c - '0');
    }
    // Unsized decimal literals are 32-bit signed; larger values widen.
    int width = 32;
    if (v > 0xffffffffULL) width = 64;
    return Logic::known(v, width, true);
  }
  int width = 32;
  bool sized = tick > 0;
  if (sized) {
    width = std::stoi(text.substr(0, tick));
    if (width <= 0) throw std::invalid_argument("zero-width literal");
    if (width > Logic::kMaxWidth) throw std::invalid_argument("literal wider than 64 bits is not supported");
  }
  size_t p = tick + 1;
  if (p < text.size() && (text[p] == '0' || text[p] == '1' || text[p] == 'x' || text[p] == 'X' ||
                          text[p] == 'z' || text[p] == 'Z') &&
      text.size() == p + 1 && !sized) {
    // '0 '1 'x 'z : fill to context; approximated as 64-bit fill
    char c = static_cast<char>(std::tolower(text[p]));
    Logic r;
    r.width = 1;
    if (c == '1') r.val = 1;
    if (c == 'x') r.xz = 1;
    if (c == 'z') r.val = r.xz = 1;
    return r;
  }
  bool is_signed = false;
  if (p < text.size() && (text[p] == 's' || text[p] == 'S')) {
    is_signed = true;
    ++p;
  }
  if (p >= text.size()) throw std::invalid_argument("missing base in " + raw);
  char base = static_cast<char>(std::tolower(text[p++]));
  std::string digits = text.substr(p);
  if (digits.empty()) throw std::invalid_argument("missing digits in " + raw);
  uint64_t val = 0, xz = 0;
  int bits_per = base == 'b' ? 1 : base == 'o' ? 3 : base == 'h' ? 4 : 0;
  if (base == 'd') {
    char d0 = static_cast<char>(std::tolower(digits[0]));
    if (digits.size() == 1 && (d0 == 'x' || d0 == 'z' || d0 == '?')) {
      Logic r = d0 == 'x' ? Logic::all_x(width) : Logic::all_z(width);
      r.is_signed = is_signed;
      return r;
    }
    for (char c : digits) {
      if (!std::isdigit(static_cast<unsigned char>(c))) throw std::invalid_argument("bad decimal digit in " + raw);
      val = val * 10 + static_cast<uint64_t>(c - '0');
    }
  } else if (bits_per > 0) {
    int total = 0;
    for (char c : digits) {
      char l = static_cast<char>(std::tolower(c));
      uint64_t dv = 0, dx = 0;
      uint64_t dmask = (uint64_t{1} << bits_per) - 1;
      if (l == 'x') {
        dx = dmask;
      } else if (l == 'z' || l == '?') {
        dv = dx = dmask;
      } else {
        int d;
        if (std::isdigit(static_cast<unsigned char>(l))) {
          d = l - '0';
        } else if (l >= 'a' && l <= 'f') {
          d = 10 + (l - 'a');
        } else {
          throw std::invalid_argument("bad digit in " + raw);
        }
        if (d >= (1 << bits_per)) throw std::invalid_argument("digit out of range in " + raw);
        dv = static_cast<uint64_t>(d);
      }
      total += bits_per;
      if (total > 64 + bits_per) throw std::invalid_argument("literal wider than 64 bits is not supported");
      val = (val << bits_per) | dv;
      xz = (xz << bits_per) | dx;
    }
    // Leftmost x/z digit extends when the literal is narrower than its size.
    if (sized && total < width && !digits.empty()) {
      char l = static_cast<char>(std::tolower(digits[0]));
      if (l == 'x' || l == 'z' || l == '?') {
        uint64_t ext = Logic::mask(width) & ~Logic::mask(total);
        xz |= ext;
        if (l != 'x') val |= ext;
      }
    }
  } else {
    throw std::invalid_argument("unknown base in " + raw);
  }
  Logic r;
  r.width = width;
  r.is_signed = is_signed;
  r.val = val & Logic::mask(width);
  r.xz = xz & Logic::mask(width);
  return r;
}

namespace ops {

namespace {
int wmax(const Logic& a, const Logic& b) { return a.width > b.width ? a.width : b.width; }
Logic one_bit(int t) {
  if (t < 0) return Logic::all_x(1);
  return Logic::known(static_cast<uint64_t>(t), 1);
}
}  // namespace

Logic bit_not(const Logic& a) {
  Logic r = a;
  uint64_t m = Logic::mask(a.width);
  r.val = ~a.val & ~a.xz & m;
  r.xz = a.xz & m;
  return r;
}

Logic bit_and(const Logic& a0, const Logic& b0) {
  int w = wmax(a0, b0);
  Logic a = a0.resized(w), b = b0.resized(w);
  uint64_t a0s = ~a.val & ~a.xz, b0s = ~b.val & ~b.xz;  // known zeros
  uint64_t a1s = a.val & ~a.xz, b1s = b.val & ~b.xz;
  uint64_t m = Logic::mask(w);
  uint64_t zero = (a0s | b0s) & m;
  uint64_t one = a1s & b1s & m;
  Logic r;
  r.width = w;
  r.is_signed = a.is_signed && b.is_signed;
  r.val = one;
  r.xz = m & ~zero & ~one;
  r.val &= ~r.xz;
  return r;
}

Logic bit_or(const Logic& a0, const Logic& b0) {
  int w = wmax(a0, b0);
  Logic a = a0.resized(w), b = b0.resized(w);
  uint64_t a0s = ~a.val & ~a.xz, b0s = ~b.val & ~b.xz;
  uint64_t a1s = a.val & ~a.xz, b1s = b.val & ~b.xz;
  uint64_t m = Logic::mask(w);
  uint64_t one = (a1s | b1s) & m;
  uint64_t zero = a0s & b0s & m;
  Logic r;
  r.width = w;
  r.is_signed = a.is_signed && b.is_signed;
  r.val = one;
  r.xz = m & ~zero & ~one;
  return r;
}

Logic bit_xor(const Logic& a0, const Logic& b0) {
  int w = wmax(a0, b0);
  Logic a = a0.resized(w), b = b0.resized(w);
  Logic r;
  r.width = w;
  r.is_signed = a.is_signed && b.is_signed;
  r.xz = (a.xz | b.xz) & Logic::mask(w);
  r.val = (a.val ^ b.val) & ~r.xz & Logic::mask(w);
  return r;
}

Logic bit_xnor(const Logic& a, const Logic& b) { return bit_not(bit_xor(a, b)); }

Logic reduce(const std::string& op, const Logic& a) {
  uint64_t m = Logic::mask(a.width);
  uint64_t ones = a.val & ~a.xz & m;
  uint64_t zeros = ~a.val & ~a.xz & m;
  bool unknown = (a.xz & m) != 0;
  int t;
  if (op == "&" || op == "~&") {
    t = zeros ? 0 : unknown ? -1 : 1;
    if (op == "~&" && t >= 0) t = !t;
  } else if (op == "|" || op == "~|") {
    t = ones ? 1 : unknown ? -1 : 0;
    if (op == "~|" && t >= 0) t = !t;
  } else {
    if (unknown) {
      t = -1;
    } else {
      t = __builtin_popcountll(ones) & 1;
      if (op != "^") t = !t;
    }
  }
  return one_bit(t);
}

Logic logical_not(const Logic& a) {
  int t = a.truthiness();
  return one_bit(t < 0 ? -1 : !t);
}

Logic logical_and(const Logic& a, const Logic& b) {
  int x = a.truthiness(), y = b.truthiness();
  if (x == 0 || y == 0) return one_bit(0);
  if (x == 1 && y == 1) return one_bit(1);
  return one_bit(-1);
}

Logic logical_or(const Logic& a, const Logic& b) {
  int x = a.truthiness(), y = b.truthiness();
  if (x == 1 || y == 1) return one_bit(1);
  if (x == 0 && y == 0) return one_bit(0);
  return one_bit(-1);
}

Logic arith(const std::string& op, const Logic& a0, const Logic& b0, int w) {
  bool s = a0.is_signed && b0.is_signed;
  Logic a = a0.resized(w), b = b0.resized(w);
  if (a.has_unknown() || b.has_unknown()) return Logic::all_x(w).as_signed(s);
  uint64_t x = a.val, y = b.val;
  int64_t sx = a.as_signed(s).to_int64(), sy = b.as_signed(s).to_int64();
  if (s && w < 64) {
    sx = a.as_signed(true).to_int64();
    sy = b.as_signed(true).to_int64();
  }
  uint64_t r = 0;
  if (op == "+") {
    r = x + y;
  } else if (op == "-") {
    r = x - y;
  } else if (op == "*") {
    r = x * y;
  } else if (op == "/" || op == "%") {
    if (y == 0) return Logic::all_x(w).as_signed(s);
    if (s) {
      r = static_cast<uint64_t>(op == "/" ? sx / sy : sx % sy);
    } else {
      r = op == "/" ? x / y : x % y;
    }
  } else if (op == "**") {
    r = 1;
    uint64_t base = x;
    uint64_t e = y;
    if (s && sy < 0) {
      // integer power with negative exponent
      r = (sx == 1) ? 1 : (sx == -1 ? ((sy & 1) ? static_cast<uint64_t>(-1) : 1) : 0);
    } else {
      while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
      }
    }
  } else {
    throw std::invalid_argument("unknown arithmetic operator " + op);
  }
  return Logic::known(r, w, s);
}

Logic negate(const Logic& a0, int w) {
  Logic a = a0.resized(w);
  if (a.has_unknown()) return Logic::all_x(w).as_signed(a.is_signed);
  return Logic::known(~a.val + 1, w, a.is_signed);
}

Logic compare(const std::string& op, const Logic& a0, const Logic& b0) {
  int w = wmax(a0, b0);
  bool s = a0.is_signed && b0.is_signed;
  Logic a = a0.resized(w).as_signed(s), b = b0.resized(w).as_signed(s);
  if (op == "===" || op == "!==") {
    bool same = a.val == b.val && a.xz == b.xz;
    return one_bit(op == "===" ? same : !same);
  }
  if (op == "==" || op == "!=") {
    uint64_t known = ~a.xz & ~b.xz & Logic::mask(w);
    if (((a.val ^ b.val) & known) != 0) return one_bit(op == "!=");
    if (a.has_unknown() || b.has_unknown()) return one_bit(-1);
    return one_bit(op == "==");
  }
  if (a.has_unknown() || b.has_unknown()) return one_bit(-1);
  bool r;
  if (s) {
    int64_t x = a.to_int64(), y = b.to_int64();
    r = op == "<" ? x < y : op == "<=" ? x <= y : op == ">" ? x > y : x >= y;
  } else {
    uint64_t x = a.val, y = b.val;
    r = op == "<" ? x < y : op == "<=" ? x <= y : op == ">" ? x > y : x >= y;
  }
  return one_bit(r);
}

Logic shift(const std::string& op, const Logic& a0, const Logic& amount, int w) {
  Logic a = a0.resized(w);
  if (amount.has_unknown()) return Logic::all_x(w);
  uint64_t n = amount.val & Logic::mask(amount.width);
  Logic r = a;
  if (op == "<<" || op == "<<<") {
    if (n >= 64) {
      r.val = r.xz = 0;
    } else {
      r.val <<= n;
      r.xz <<= n;
    }
  } else {
    bool arith_shift = op == ">>>" && a.is_signed;
    int top = w - 1;
    uint64_t sign_v = (a.val >> top) & 1, sign_x = (a.xz >> top) & 1;
    if (n >= 64) {
      r.val = r.xz = 0;
    } else {
      r.val >>= n;
      r.xz >>= n;
    }
    if (arith_shift && n > 0) {
      uint64_t fill = n >= static_cast<uint64_t>(w) ? Logic::mask(w) : (Logic::mask(w) & ~Logic::mask(w - static_cast<int>(n)));
      if (sign_v) r.val |= fill;
      if (sign_x) r.xz |= fill;
    }
  }
  r.val &= Logic::mask(w);
  r.xz &= Logic::mask(w);
  return r;
}

Logic merge(const Logic& a0, const Logic& b0) {
  int w = wmax(a0, b0);
  Logic a = a0.resized(w), b = b0.resized(w);
  Logic r;
  r.width = w;
  uint64_t same = ~(a.val ^ b.val) & ~(a.xz ^ b.xz) & ~a.xz & Logic::mask(w);
  r.val = a.val & same;
  r.xz = Logic::mask(w) & ~same;
  return r;
}

}  // namespace ops

}  // namespace minivl
