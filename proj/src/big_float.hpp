#pragma once

// Minimal RAII wrapper over mpfr_t for the efficiency sums. Only the handful
// of operations those sums need are exposed; everything rounds to nearest.

#include <mpfr.h>

#include <cstdint>

namespace motirr::detail {

class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t precision) { mpfr_init2(value_, precision); mpfr_set_zero(value_, 1); }
  BigFloat(mpfr_prec_t precision, double x) {
    mpfr_init2(value_, precision);
    mpfr_set_d(value_, x, MPFR_RNDN);
  }
  BigFloat(const BigFloat& other) {
    mpfr_init2(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  BigFloat& operator=(const BigFloat& other) {
    if (this != &other) {
      mpfr_set_prec(value_, mpfr_get_prec(other.value_));
      mpfr_set(value_, other.value_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat(BigFloat&&) = delete;
  BigFloat& operator=(BigFloat&&) = delete;
  ~BigFloat() { mpfr_clear(value_); }

  [[nodiscard]] double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  [[nodiscard]] bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  [[nodiscard]] mpfr_prec_t precision() const { return mpfr_get_prec(value_); }

  mpfr_ptr get() { return value_; }
  [[nodiscard]] mpfr_srcptr get() const { return value_; }

 private:
  mpfr_t value_;
};

inline void add(BigFloat& out, const BigFloat& a, const BigFloat& b) { mpfr_add(out.get(), a.get(), b.get(), MPFR_RNDN); }
inline void sub(BigFloat& out, const BigFloat& a, const BigFloat& b) { mpfr_sub(out.get(), a.get(), b.get(), MPFR_RNDN); }
inline void mul(BigFloat& out, const BigFloat& a, const BigFloat& b) { mpfr_mul(out.get(), a.get(), b.get(), MPFR_RNDN); }
inline void div(BigFloat& out, const BigFloat& a, const BigFloat& b) { mpfr_div(out.get(), a.get(), b.get(), MPFR_RNDN); }
inline void add_d(BigFloat& out, const BigFloat& a, double b) { mpfr_add_d(out.get(), a.get(), b, MPFR_RNDN); }
inline void ui_pow(BigFloat& out, const BigFloat& base, std::uint64_t e) {
  mpfr_pow_ui(out.get(), base.get(), static_cast<unsigned long>(e), MPFR_RNDN);
}
inline void sqrt(BigFloat& out, const BigFloat& a) { mpfr_sqrt(out.get(), a.get(), MPFR_RNDN); }
inline void sin_cos(BigFloat& s, BigFloat& c, const BigFloat& x) { mpfr_sin_cos(s.get(), c.get(), x.get(), MPFR_RNDN); }

/// Bits needed so that a sum whose O(1) terms cancel down to about
/// R^{exponent} still carries a full double mantissa plus guard bits.
/// Results below the double subnormal range only need enough bits to
/// round to zero, hence the cap.
mpfr_prec_t cancellation_precision(double reflectivity, std::uint64_t exponent, std::uint64_t terms);

}  // namespace motirr::detail
