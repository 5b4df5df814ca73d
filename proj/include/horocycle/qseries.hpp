#pragma once

#include <gmpxx.h>

#include <vector>

namespace horocycle {

// Exact q-expansion sum_{n <= N} coeffs[n] q^n of a level-one modular form.
struct QExpansion {
  int weight = 0;
  std::vector<mpz_class> coeffs;  // N + 1 entries

  int trunc() const { return static_cast<int>(coeffs.size()) - 1; }
  const mpz_class& operator[](int n) const { return coeffs[static_cast<size_t>(n)]; }
};

// Normalized Eisenstein series E_4 = 1 + 240 sum sigma_3(n) q^n and
// E_6 = 1 - 504 sum sigma_5(n) q^n. Other weights throw std::invalid_argument.
QExpansion eisenstein_qexp(int weight, int N);

// Delta = q prod (1 - q^m)^24, truncated at N >= 1.
QExpansion delta_qexp(int N);

// Truncated product of two integer power series (Kronecker substitution).
std::vector<mpz_class> mul_trunc(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b,
                                 int N);

// Product of forms truncated at N; weights add.
QExpansion multiply(const QExpansion& a, const QExpansion& b, int N);

}  // namespace horocycle
