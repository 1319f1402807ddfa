#include "envlab/dyadic.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>

#include "envlab/error.hpp"

namespace envlab {

namespace {

std::uint64_t magnitude(std::int64_t m) {
  const auto bits = static_cast<std::uint64_t>(m);
  return m < 0 ? 0 - bits : bits;
}

int bit_length(std::int64_t m) { return 64 - std::countl_zero(magnitude(m)); }

}  // namespace

DyadicRational::DyadicRational(std::int64_t mantissa, std::int32_t exponent)
    : mantissa_(mantissa), exponent_(exponent) {
  if (mantissa_ == 0) {
    exponent_ = 0;
    return;
  }
  const int shift = std::countr_zero(static_cast<std::uint64_t>(mantissa_));
  mantissa_ >>= shift;  // arithmetic shift keeps the sign
  exponent_ += shift;
}

DyadicRational DyadicRational::from_double(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::invalid_parameter, "non-finite amount has no dyadic form");
  }
  if (value == 0.0) return {};
  int exp2 = 0;
  const double fraction = std::frexp(value, &exp2);
  const auto mantissa = static_cast<std::int64_t>(std::ldexp(fraction, 53));
  return {mantissa, exp2 - 53};
}

double DyadicRational::to_double() const {
  return std::ldexp(static_cast<double>(mantissa_), exponent_);
}

long double DyadicRational::to_long_double() const {
  return std::ldexp(static_cast<long double>(mantissa_), exponent_);
}

DyadicRational DyadicRational::halved() const {
  if (is_zero()) return *this;
  return {mantissa_, exponent_ - 1};
}

DyadicRational DyadicRational::doubled() const {
  if (is_zero()) return *this;
  return {mantissa_, exponent_ + 1};
}

bool DyadicRational::is_power_of_two(std::int32_t* log2) const noexcept {
  if (mantissa_ != 1) return false;
  if (log2 != nullptr) *log2 = exponent_;
  return true;
}

std::string DyadicRational::to_string() const {
  return std::to_string(mantissa_) + "*2^" + std::to_string(exponent_);
}

std::strong_ordering operator<=>(const DyadicRational& a, const DyadicRational& b) {
  const int sa = (a.mantissa_ > 0) - (a.mantissa_ < 0);
  const int sb = (b.mantissa_ > 0) - (b.mantissa_ < 0);
  if (sa != sb) return sa <=> sb;
  if (sa == 0) return std::strong_ordering::equal;

  // Same sign: compare magnitudes by the position of the leading bit first.
  const long top_a = static_cast<long>(bit_length(a.mantissa_)) + a.exponent_;
  const long top_b = static_cast<long>(bit_length(b.mantissa_)) + b.exponent_;
  std::strong_ordering order = std::strong_ordering::equal;
  if (top_a != top_b) {
    order = top_a <=> top_b;
  } else {
    // Leading bits align: shifting the mantissa with the larger exponent up
    // to the other's scale keeps it within the other's bit length.
    const int common = std::min(a.exponent_, b.exponent_);
    const std::uint64_t ma = magnitude(a.mantissa_) << (a.exponent_ - common);
    const std::uint64_t mb = magnitude(b.mantissa_) << (b.exponent_ - common);
    order = ma <=> mb;
  }
  if (sa > 0) return order;
  return 0 <=> order;
}

}  // namespace envlab
