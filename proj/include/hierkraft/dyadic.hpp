#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

namespace hierkraft {

// Size exponent: an interval of exponent e has measure 2^-e.
using Exponent = std::uint32_t;

/*
 * Exact non-negative dyadic rational mantissa * 2^-exponent.
 *
 * Kept canonical: the mantissa is odd, or the value is zero with exponent 0.
 * Mantissas live in a multiprecision integer that stays inline for values up
 * to 128 bits, so ordinary ledger arithmetic never allocates.
 */
class DyadicAmount {
 public:
  using Integer = boost::multiprecision::cpp_int;

  DyadicAmount() = default;
  DyadicAmount(Integer mantissa, std::uint64_t exponent);

  static DyadicAmount zero() { return {}; }
  static DyadicAmount one() { return DyadicAmount(1, 0); }
  // 2^-e
  static DyadicAmount pow2_neg(std::uint64_t e) { return DyadicAmount(1, e); }

  const Integer& mantissa() const noexcept { return mantissa_; }
  std::uint64_t exponent() const noexcept { return exponent_; }
  bool is_zero() const noexcept { return mantissa_.is_zero(); }

  DyadicAmount& operator+=(const DyadicAmount& rhs);
  // Throws LedgerUnderflow when rhs > *this.
  DyadicAmount& operator-=(const DyadicAmount& rhs);

  friend DyadicAmount operator+(DyadicAmount a, const DyadicAmount& b) { return a += b; }
  friend DyadicAmount operator-(DyadicAmount a, const DyadicAmount& b) { return a -= b; }

  friend bool operator==(const DyadicAmount& a, const DyadicAmount& b) {
    return a.exponent_ == b.exponent_ && a.mantissa_ == b.mantissa_;
  }
  friend std::strong_ordering operator<=>(const DyadicAmount& a, const DyadicAmount& b);

  // "0", "1", "5/16", "3/2".
  std::string to_string() const;

 private:
  void normalize();

  Integer mantissa_ = 0;
  std::uint64_t exponent_ = 0;
};

enum class Relation { equal, a_contains_b, b_contains_a, disjoint };

/*
 * Aligned interval [0.bits, 0.bits + 2^-|bits|) of the unit interval, kept as
 * its bit string. The empty string is the whole unit interval. Ordering is
 * lexicographic on the bits.
 */
class DyadicInterval {
 public:
  DyadicInterval() = default;
  // Throws InputError on any symbol other than '0' or '1'.
  explicit DyadicInterval(std::string bits);

  static DyadicInterval unit() { return {}; }
  // Accepts the file-format spelling: "-" is the unit interval.
  static DyadicInterval parse_field(std::string_view field);

  const std::string& bits() const noexcept { return bits_; }
  Exponent depth() const noexcept { return static_cast<Exponent>(bits_.size()); }
  bool is_unit() const noexcept { return bits_.empty(); }

  DyadicAmount measure() const { return DyadicAmount::pow2_neg(bits_.size()); }
  // Left endpoint 0.bits.
  DyadicAmount lower_endpoint() const;

  DyadicInterval child(char bit) const;
  DyadicInterval left() const { return child('0'); }
  DyadicInterval right() const { return child('1'); }
  std::pair<DyadicInterval, DyadicInterval> split() const { return {left(), right()}; }
  // Ancestor at the given depth; requires d <= depth().
  DyadicInterval prefix(Exponent d) const;

  // Containment is prefix order; equal intervals contain each other.
  bool contains(const DyadicInterval& other) const noexcept;
  bool disjoint(const DyadicInterval& other) const noexcept {
    return !contains(other) && !other.contains(*this);
  }

  // Bits, or "-" for the unit interval.
  std::string field() const { return bits_.empty() ? std::string("-") : bits_; }

  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
  friend auto operator<=>(const DyadicInterval&, const DyadicInterval&) = default;

 private:
  std::string bits_;
};

DyadicInterval make_interval(std::string_view bits);
Relation relation(const DyadicInterval& a, const DyadicInterval& b) noexcept;
const char* relation_name(Relation r) noexcept;

bool is_bit_string(std::string_view s) noexcept;

}  // namespace hierkraft
