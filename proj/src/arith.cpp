#include "horocycle/arith.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace horocycle {

int divisor_count(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("divisor_count: n must be positive");
  int count = 1;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    count *= e + 1;
  }
  if (n > 1) count *= 2;
  return count;
}

std::vector<int> divisor_count_table(int limit) {
  std::vector<int> d(static_cast<size_t>(limit) + 1, 0);
  for (int a = 1; a <= limit; ++a)
    for (int m = a; m <= limit; m += a) ++d[m];
  return d;
}

std::vector<int> smallest_prime_factor_table(int limit) {
  std::vector<int> spf(static_cast<size_t>(std::max(limit, 1)) + 1, 0);
  for (int i = 2; i <= limit; ++i) {
    if (spf[i] != 0) continue;
    for (std::int64_t m = i; m <= limit; m += i)
      if (spf[m] == 0) spf[m] = i;
  }
  return spf;
}

std::vector<int> primes_up_to(int limit) {
  std::vector<int> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(static_cast<size_t>(limit) + 1, false);
  for (int i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (std::int64_t m = static_cast<std::int64_t>(i) * i; m <= limit; m += i) composite[m] = true;
  }
  return primes;
}

PrimePower as_prime_power(std::int64_t n) {
  if (n < 2) return {};
  std::int64_t p = 2;
  while (p * p <= n && n % p != 0) ++p;
  if (n % p != 0) p = n;
  int e = 0;
  while (n % p == 0) {
    n /= p;
    ++e;
  }
  if (n != 1) return {};
  return {static_cast<int>(p), e};
}

double DivisorMajorant::divisor_squared_bound(double n) const {
  const double c = constant_for(n) * std::pow(n, kDivisorExponent);
  return c * c;
}

namespace {

DivisorMajorant compute_majorant() {
  DivisorMajorant m{};
  const auto d = divisor_count_table(kDivisorScanLimit);
  double best = 0.0;
  for (int n = 1; n <= kDivisorScanLimit; ++n)
    best = std::max(best, d[n] / std::pow(static_cast<double>(n), kDivisorExponent));
  // Upward nudge against rounding in pow.
  m.scan_constant = best * (1.0 + 1e-12);

  // sup_n d(n)/n^eps is multiplicative: prod_p max_a (a+1) p^(-eps a).
  // Primes with p^eps >= 2 contribute 1.
  const int cutoff = static_cast<int>(std::ceil(std::pow(2.0, 1.0 / kDivisorExponent)));
  double log_sup = 0.0;
  for (int p : primes_up_to(cutoff)) {
    const double u = kDivisorExponent * std::log(static_cast<double>(p));
    double best_local = 0.0;
    for (int a = 0; a < 200; ++a) best_local = std::max(best_local, std::log(a + 1.0) - a * u);
    log_sup += best_local;
  }
  m.global_constant = std::exp(log_sup) * (1.0 + 1e-12);
  return m;
}

}  // namespace

const DivisorMajorant& divisor_majorant() {
  static const DivisorMajorant instance = compute_majorant();
  return instance;
}

}  // namespace horocycle
