#pragma once

#include <cstdint>
#include <string>

namespace minivl {

// Four-state vector of 1..64 bits. Bit i is known when xz bit i is clear
// (its value is then bit i of val); an unknown bit is X when val is clear
// and Z when val is set.
struct Logic {
  uint64_t val = 0;
  uint64_t xz = 0;
  int width = 1;
  bool is_signed = false;

  static constexpr int kMaxWidth = 64;

  static uint64_t mask(int width) {
    return width >= 64 ? ~uint64_t{0} : ((uint64_t{1} << width) - 1);
  }
  static Logic known(uint64_t v, int width, bool is_signed = false) {
    return Logic{v & mask(width), 0, width, is_signed};
  }
  static Logic all_x(int width) { return Logic{0, mask(width), width, false}; }
  static Logic all_z(int width) { return Logic{mask(width), mask(width), width, false}; }

  bool has_unknown() const { return (xz & mask(width)) != 0; }
  bool bit_known(int i) const { return ((xz >> i) & 1) == 0; }
  int bit(int i) const { return static_cast<int>((val >> i) & 1); }

  // Sign- or zero-extends (per is_signed) or truncates to `w` bits.
  Logic resized(int w) const;
  Logic as_signed(bool s) const {
    Logic r = *this;
    r.is_signed = s;
    return r;
  }
  int64_t to_int64() const;
  // 1 when any bit is known 1; 0 when all bits are known 0; -1 otherwise.
  int truthiness() const;

  bool identical(const Logic& o) const {
    return width == o.width && val == o.val && (xz & mask(width)) == (o.xz & mask(o.width));
  }

  std::string to_binary() const;
};

// Parses a Verilog number literal ("4'b10x1", "'hff", "12", "8'sd3").
// Throws std::invalid_argument on malformed text or widths above 64.
Logic parse_number(const std::string& text);

namespace ops {
Logic bit_not(const Logic& a);
Logic bit_and(const Logic& a, const Logic& b);
Logic bit_or(const Logic& a, const Logic& b);
Logic bit_xor(const Logic& a, const Logic& b);
Logic bit_xnor(const Logic& a, const Logic& b);
Logic reduce(const std::string& op, const Logic& a);
Logic logical_not(const Logic& a);
Logic logical_and(const Logic& a, const Logic& b);
Logic logical_or(const Logic& a, const Logic& b);
Logic arith(const std::string& op, const Logic& a, const Logic& b, int width);
Logic negate(const Logic& a, int width);
Logic compare(const std::string& op, const Logic& a, const Logic& b);
Logic shift(const std::string& op, const Logic& a, const Logic& amount, int width);
Logic merge(const Logic& a, const Logic& b);  // ?: with unknown condition
}  // namespace ops

}  // namespace minivl
