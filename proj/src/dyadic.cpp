#include "hierkraft/dyadic.hpp"

#include <algorithm>

#include "hierkraft/error.hpp"

namespace hierkraft {

DyadicAmount::DyadicAmount(Integer mantissa, std::uint64_t exponent)
    : mantissa_(std::move(mantissa)), exponent_(exponent) {
  if (mantissa_ < 0) throw LedgerUnderflow("negative dyadic amount");
  normalize();
}

void DyadicAmount::normalize() {
  if (mantissa_.is_zero()) {
    exponent_ = 0;
    return;
  }
  auto tz = boost::multiprecision::lsb(mantissa_);
  if (tz == 0 || exponent_ == 0) return;
  auto shift = std::min<std::uint64_t>(tz, exponent_);
  mantissa_ >>= shift;
  exponent_ -= shift;
}

DyadicAmount& DyadicAmount::operator+=(const DyadicAmount& rhs) {
  if (rhs.is_zero()) return *this;
  if (exponent_ == rhs.exponent_) {
    mantissa_ += rhs.mantissa_;
  } else if (exponent_ > rhs.exponent_) {
    mantissa_ += rhs.mantissa_ << (exponent_ - rhs.exponent_);
  } else {
    mantissa_ <<= (rhs.exponent_ - exponent_);
    mantissa_ += rhs.mantissa_;
    exponent_ = rhs.exponent_;
  }
  normalize();
  return *this;
}

DyadicAmount& DyadicAmount::operator-=(const DyadicAmount& rhs) {
  if (rhs.is_zero()) return *this;
  if (*this < rhs) {
    throw LedgerUnderflow("ledger underflow: " + to_string() + " - " + rhs.to_string());
  }
  if (exponent_ >= rhs.exponent_) {
    mantissa_ -= rhs.mantissa_ << (exponent_ - rhs.exponent_);
  } else {
    mantissa_ <<= (rhs.exponent_ - exponent_);
    mantissa_ -= rhs.mantissa_;
    exponent_ = rhs.exponent_;
  }
  normalize();
  return *this;
}

std::strong_ordering operator<=>(const DyadicAmount& a, const DyadicAmount& b) {
  int c;
  if (a.exponent_ == b.exponent_) {
    c = a.mantissa_.compare(b.mantissa_);
  } else if (a.exponent_ > b.exponent_) {
    c = a.mantissa_.compare(DyadicAmount::Integer(b.mantissa_ << (a.exponent_ - b.exponent_)));
  } else {
    c = DyadicAmount::Integer(a.mantissa_ << (b.exponent_ - a.exponent_)).compare(b.mantissa_);
  }
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

std::string DyadicAmount::to_string() const {
  if (exponent_ == 0) return mantissa_.str();
  Integer denominator = Integer(1) << exponent_;
  return mantissa_.str() + "/" + denominator.str();
}

bool is_bit_string(std::string_view s) noexcept {
  return std::all_of(s.begin(), s.end(), [](char c) { return c == '0' || c == '1'; });
}

DyadicInterval::DyadicInterval(std::string bits) : bits_(std::move(bits)) {
  if (!is_bit_string(bits_)) throw InputError("malformed bit string '" + bits_ + "'");
}

DyadicInterval DyadicInterval::parse_field(std::string_view field) {
  if (field == "-") return {};
  if (field.empty()) throw InputError("empty bit-string field (use '-' for the unit interval)");
  return DyadicInterval(std::string(field));
}

DyadicAmount DyadicInterval::lower_endpoint() const {
  DyadicAmount::Integer m = 0;
  for (char c : bits_) {
    m <<= 1;
    if (c == '1') m += 1;
  }
  return DyadicAmount(std::move(m), bits_.size());
}

DyadicInterval DyadicInterval::child(char bit) const {
  DyadicInterval r;
  r.bits_.reserve(bits_.size() + 1);
  r.bits_ = bits_;
  r.bits_.push_back(bit == '0' ? '0' : '1');
  return r;
}

DyadicInterval DyadicInterval::prefix(Exponent d) const {
  DyadicInterval r;
  r.bits_ = bits_.substr(0, d);
  return r;
}

bool DyadicInterval::contains(const DyadicInterval& other) const noexcept {
  return other.bits_.size() >= bits_.size() &&
         std::string_view(other.bits_).substr(0, bits_.size()) == bits_;
}

DyadicInterval make_interval(std::string_view bits) { return DyadicInterval(std::string(bits)); }

Relation relation(const DyadicInterval& a, const DyadicInterval& b) noexcept {
  if (a == b) return Relation::equal;
  if (a.contains(b)) return Relation::a_contains_b;
  if (b.contains(a)) return Relation::b_contains_a;
  return Relation::disjoint;
}

const char* relation_name(Relation r) noexcept {
  switch (r) {
    case Relation::equal: return "equal";
    case Relation::a_contains_b: return "a_contains_b";
    case Relation::b_contains_a: return "b_contains_a";
    case Relation::disjoint: return "disjoint";
  }
  return "?";
}

}  // namespace hierkraft
