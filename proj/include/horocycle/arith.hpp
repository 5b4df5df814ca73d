#pragma once

#include <cstdint>
#include <vector>

namespace horocycle {

// Number of positive divisors of n (n >= 1).
int divisor_count(std::int64_t n);

// d(n) for 0 <= n <= limit; entry 0 is 0.
std::vector<int> divisor_count_table(int limit);

std::vector<int> primes_up_to(int limit);

// Smallest prime factor for 0 <= n <= limit (entries 0 and 1 are 0).
std::vector<int> smallest_prime_factor_table(int limit);

struct PrimePower {
  int prime = 0;
  int exponent = 0;  // 0 when n is not a prime power
};

// Decomposes n >= 2 as p^j, or returns exponent 0.
PrimePower as_prime_power(std::int64_t n);

// Explicit majorant d(n) <= C(n) * n^0.1. C(n) is the largest value of
// d(m)/m^0.1 over m <= kDivisorScanLimit for n in that range, and the global
// supremum prod_p max_a (a+1)/p^(0.1 a) beyond it.
inline constexpr int kDivisorScanLimit = 1'000'000;
inline constexpr double kDivisorExponent = 0.1;

struct DivisorMajorant {
  double scan_constant;    // sup_{n <= kDivisorScanLimit} d(n) / n^0.1
  double global_constant;  // sup over all n

  double constant_for(double n) const {
    return n <= kDivisorScanLimit ? scan_constant : global_constant;
  }
  // Upper bound for d(n)^2.
  double divisor_squared_bound(double n) const;
};

// Computed once per process.
const DivisorMajorant& divisor_majorant();

}  // namespace horocycle
