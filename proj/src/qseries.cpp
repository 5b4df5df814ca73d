#include "horocycle/qseries.hpp"

#include <algorithm>
#include <stdexcept>

namespace horocycle {

namespace {

size_t max_bits(const std::vector<mpz_class>& v, size_t len) {
  size_t bits = 0;
  for (size_t i = 0; i < len; ++i) {
    if (sgn(v[i]) != 0) bits = std::max(bits, mpz_sizeinbase(v[i].get_mpz_t(), 2));
  }
  return bits;
}

size_t bit_length(size_t n) {
  size_t b = 0;
  while (n > 0) {
    ++b;
    n >>= 1;
  }
  return b;
}

// Evaluates the series at 2^(64 * slot_limbs), i.e. lays each coefficient
// into its own limb-aligned slot. Signed coefficients are packed as the
// difference of their positive and negative parts.
mpz_class pack(const std::vector<mpz_class>& a, size_t len, size_t slot_limbs) {
  mpz_class parts[2];
  const size_t total = len * slot_limbs;
  for (int s = 0; s < 2; ++s) {
    const int want = s == 0 ? 1 : -1;
    mpz_ptr z = parts[s].get_mpz_t();
    mp_limb_t* out = mpz_limbs_write(z, static_cast<mp_size_t>(total));
    std::fill(out, out + total, mp_limb_t{0});
    for (size_t i = 0; i < len; ++i) {
      mpz_srcptr c = a[i].get_mpz_t();
      if (mpz_sgn(c) != want) continue;
      const mp_limb_t* src = mpz_limbs_read(c);
      std::copy(src, src + mpz_size(c), out + i * slot_limbs);
    }
    mp_size_t used = static_cast<mp_size_t>(total);
    while (used > 0 && out[used - 1] == 0) --used;
    mpz_limbs_finish(z, used);
  }
  return parts[0] - parts[1];
}

// Inverse of pack for a product whose coefficients satisfy |c| < 2^(slot_bits-1).
std::vector<mpz_class> unpack(const mpz_class& z, size_t count, size_t slot_limbs) {
  std::vector<mpz_class> out(count);
  const int sign = sgn(z);
  const size_t size = mpz_size(z.get_mpz_t());
  const mp_limb_t* limbs = mpz_limbs_read(z.get_mpz_t());
  const mp_bitcnt_t slot_bits = slot_limbs * GMP_NUMB_BITS;
  mpz_class full;
  mpz_setbit(full.get_mpz_t(), slot_bits);
  int carry = 0;
  for (size_t i = 0; i < count; ++i) {
    const size_t lo = i * slot_limbs;
    mpz_class v;
    if (lo < size) {
      mpz_t view;
      mpz_roinit_n(view, limbs + lo, static_cast<mp_size_t>(std::min(slot_limbs, size - lo)));
      v = mpz_class(view);
    }
    v += carry;
    if (mpz_tstbit(v.get_mpz_t(), slot_bits - 1) || v >= full) {
      v -= full;
      carry = 1;
    } else {
      carry = 0;
    }
    out[i] = sign < 0 ? mpz_class(-v) : v;
  }
  return out;
}

std::vector<mpz_class> divisor_power_sums(int N, unsigned power) {
  std::vector<mpz_class> sigma(static_cast<size_t>(N) + 1, 0);
  mpz_class dp;
  for (int d = 1; d <= N; ++d) {
    mpz_ui_pow_ui(dp.get_mpz_t(), static_cast<unsigned long>(d), power);
    for (int m = d; m <= N; m += d) sigma[m] += dp;
  }
  return sigma;
}

}  // namespace

std::vector<mpz_class> mul_trunc(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b,
                                 int N) {
  if (N < 0) throw std::invalid_argument("mul_trunc: negative truncation");
  const size_t count = static_cast<size_t>(N) + 1;
  const size_t la = std::min(a.size(), count);
  const size_t lb = std::min(b.size(), count);
  if (la == 0 || lb == 0) return std::vector<mpz_class>(count, 0);

  const size_t bits = max_bits(a, la) + max_bits(b, lb) + bit_length(std::min(la, lb)) + 2;
  const size_t slot_limbs = (bits + GMP_NUMB_BITS - 1) / GMP_NUMB_BITS;

  const mpz_class x = pack(a, la, slot_limbs);
  mpz_class product;
  if (&a == &b) {
    mpz_mul(product.get_mpz_t(), x.get_mpz_t(), x.get_mpz_t());
  } else {
    const mpz_class y = pack(b, lb, slot_limbs);
    mpz_mul(product.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
  }
  return unpack(product, count, slot_limbs);
}

QExpansion multiply(const QExpansion& a, const QExpansion& b, int N) {
  return {a.weight + b.weight, mul_trunc(a.coeffs, b.coeffs, N)};
}

QExpansion eisenstein_qexp(int weight, int N) {
  if (N < 0) throw std::invalid_argument("eisenstein_qexp: N must be >= 0");
  long scale = 0;
  unsigned power = 0;
  if (weight == 4) {
    scale = 240;
    power = 3;
  } else if (weight == 6) {
    scale = -504;
    power = 5;
  } else {
    throw std::invalid_argument("eisenstein_qexp: only weights 4 and 6 are supported");
  }
  QExpansion e{weight, divisor_power_sums(N, power)};
  e.coeffs[0] = 1;
  for (int n = 1; n <= N; ++n) e.coeffs[n] *= scale;
  return e;
}

QExpansion delta_qexp(int N) {
  if (N < 1) throw std::invalid_argument("delta_qexp: N must be >= 1");
  // Jacobi: prod (1 - q^m)^3 = sum_{m >= 0} (-1)^m (2m + 1) q^(m(m+1)/2).
  std::vector<mpz_class> cube(static_cast<size_t>(N), 0);
  for (long m = 0; m * (m + 1) / 2 <= N - 1; ++m)
    cube[m * (m + 1) / 2] = (m % 2 == 0 ? 1 : -1) * (2 * m + 1);
  auto p6 = mul_trunc(cube, cube, N - 1);
  auto p12 = mul_trunc(p6, p6, N - 1);
  auto p24 = mul_trunc(p12, p12, N - 1);
  QExpansion delta{12, std::vector<mpz_class>(static_cast<size_t>(N) + 1, 0)};
  for (int n = 1; n <= N; ++n) delta.coeffs[n] = p24[n - 1];
  return delta;
}

}  // namespace horocycle
