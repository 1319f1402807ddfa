#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

namespace envlab {

/// Exact amount mantissa * 2^exponent. Halving and doubling touch only the
/// exponent, so membership tests at y/2, y and 2y never round.
///
/// Canonical form: the mantissa is odd, or zero with exponent zero.
class DyadicRational {
 public:
  constexpr DyadicRational() = default;
  DyadicRational(std::int64_t mantissa, std::int32_t exponent);

  /// Every finite double is dyadic; the conversion is exact.
  static DyadicRational from_double(double value);
  static DyadicRational power_of_two(std::int32_t exponent) { return {1, exponent}; }

  std::int64_t mantissa() const noexcept { return mantissa_; }
  std::int32_t exponent() const noexcept { return exponent_; }

  double to_double() const;
  long double to_long_double() const;

  DyadicRational halved() const;
  DyadicRational doubled() const;

  bool is_zero() const noexcept { return mantissa_ == 0; }
  bool is_positive() const noexcept { return mantissa_ > 0; }
  /// True when the value is exactly 2^k; `log2` receives k.
  bool is_power_of_two(std::int32_t* log2 = nullptr) const noexcept;

  std::string to_string() const;

  friend bool operator==(const DyadicRational&, const DyadicRational&) = default;
  friend std::strong_ordering operator<=>(const DyadicRational& a, const DyadicRational& b);

 private:
  std::int64_t mantissa_ = 0;
  std::int32_t exponent_ = 0;
};

}  // namespace envlab

template <>
struct std::hash<envlab::DyadicRational> {
  std::size_t operator()(const envlab::DyadicRational& d) const noexcept {
    return std::hash<std::int64_t>{}(d.mantissa()) ^
           (std::hash<std::int32_t>{}(d.exponent()) * 0x9e3779b97f4a7c15ULL);
  }
};
