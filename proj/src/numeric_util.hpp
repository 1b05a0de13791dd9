#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>

namespace motirr::detail {

/// floor(numerator / denominator) for positive inputs, snapping to the
/// nearest integer when the quotient is within 1e-9 relative of it, so that
/// 0.1 / 1e-8 counts as exactly 1e7.
inline std::uint64_t floor_quotient(double numerator, double denominator) {
  const double q = numerator / denominator;
  const double nearest = std::round(q);
  if (std::abs(q - nearest) <= 1e-9 * std::max(1.0, nearest)) {
    return static_cast<std::uint64_t>(nearest);
  }
  return static_cast<std::uint64_t>(std::floor(q));
}

/// base^exponent by repeated squaring; 0^0 = 1.
template <typename T>
T integer_power(T base, std::uint64_t exponent) {
  T result{1};
  while (exponent != 0) {
    if (exponent & 1U) result *= base;
    exponent >>= 1U;
    if (exponent != 0) base *= base;
  }
  return result;
}

}  // namespace motirr::detail
