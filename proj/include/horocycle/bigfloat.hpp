#pragma once

#include <mpfr.h>
#include <gmpxx.h>

#include <utility>

namespace horocycle {

// Owning handle for an mpfr_t. Arithmetic goes through the mpfr_* calls on
// raw(); this class only manages lifetime and precision.
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t precision = 128) {
    mpfr_init2(value_, precision);
    mpfr_set_zero(value_, 1);
  }

  BigFloat(double x, mpfr_prec_t precision) {
    mpfr_init2(value_, precision);
    mpfr_set_d(value_, x, MPFR_RNDN);
  }

  BigFloat(const mpz_class& z, mpfr_prec_t precision) {
    mpfr_init2(value_, precision);
    mpfr_set_z(value_, z.get_mpz_t(), MPFR_RNDN);
  }

  BigFloat(const BigFloat& other) {
    mpfr_init2(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }

  BigFloat(BigFloat&& other) noexcept {
    mpfr_init2(value_, MPFR_PREC_MIN);
    mpfr_swap(value_, other.value_);
  }

  BigFloat& operator=(const BigFloat& other) {
    if (this != &other) {
      mpfr_set_prec(value_, mpfr_get_prec(other.value_));
      mpfr_set(value_, other.value_, MPFR_RNDN);
    }
    return *this;
  }

  BigFloat& operator=(BigFloat&& other) noexcept {
    mpfr_swap(value_, other.value_);
    return *this;
  }

  ~BigFloat() { mpfr_clear(value_); }

  mpfr_ptr raw() { return value_; }
  mpfr_srcptr raw() const { return value_; }

  mpfr_prec_t precision() const { return mpfr_get_prec(value_); }
  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  int sign() const { return mpfr_sgn(value_); }

  // Rounds to a new precision in place.
  void round_to(mpfr_prec_t precision) { mpfr_prec_round(value_, precision, MPFR_RNDN); }

 private:
  mpfr_t value_;
};

// Upper bound for |x| as a double.
inline double abs_upper(const BigFloat& x) {
  return x.sign() < 0 ? -mpfr_get_d(x.raw(), MPFR_RNDD) : mpfr_get_d(x.raw(), MPFR_RNDU);
}

}  // namespace horocycle
