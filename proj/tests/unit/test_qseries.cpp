#include "doctest.h"

#include "horocycle/arith.hpp"
#include "horocycle/modular_basis.hpp"
#include "horocycle/qseries.hpp"

#include <cmath>

using namespace horocycle;

namespace {

// q * prod (1 - q^m)^24 by repeated multiplication with (1 - q^m).
std::vector<mpz_class> naive_delta(int N) {
  std::vector<mpz_class> c(static_cast<size_t>(N), 0);  // coefficient of q^(n+1)
  c[0] = 1;
  for (int m = 1; m < N; ++m)
    for (int r = 0; r < 24; ++r)
      for (int n = N - 1; n >= m; --n) c[n] -= c[n - m];
  std::vector<mpz_class> out(static_cast<size_t>(N) + 1, 0);
  for (int n = 1; n <= N; ++n) out[n] = c[n - 1];
  return out;
}

mpz_class sigma(int n, int r) {
  mpz_class s = 0, t;
  for (int d = 1; d <= n; ++d)
    if (n % d == 0) {
      mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(r));
      s += t;
    }
  return s;
}

std::vector<mpz_class> schoolbook(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b,
                                  int N) {
  std::vector<mpz_class> c(static_cast<size_t>(N) + 1, 0);
  for (int i = 0; i <= N && i < static_cast<int>(a.size()); ++i)
    for (int j = 0; i + j <= N && j < static_cast<int>(b.size()); ++j) c[i + j] += a[i] * b[j];
  return c;
}

}  // namespace

TEST_CASE("delta matches the naive product up to 1000") {
  const auto fast = delta_qexp(1000);
  const auto slow = naive_delta(1000);
  CHECK(fast[0] == 0);
  CHECK(fast[1] == 1);
  CHECK(fast[2] == -24);
  CHECK(fast[5] == 4830);
  CHECK(fast[11] == 534612);
  int mismatches = 0;
  for (int n = 0; n <= 1000; ++n) mismatches += fast[n] != slow[n];
  CHECK(mismatches == 0);
}

TEST_CASE("Eisenstein series against divisor sums") {
  const auto e4 = eisenstein_qexp(4, 60);
  const auto e6 = eisenstein_qexp(6, 60);
  CHECK(e4[0] == 1);
  CHECK(e4[1] == 240);
  CHECK(e6[1] == -504);
  CHECK(e6[3] == -504 * 244);
  for (int n = 1; n <= 60; ++n) {
    CHECK(e4[n] == 240 * sigma(n, 3));
    CHECK(e6[n] == -504 * sigma(n, 5));
  }
  CHECK_THROWS_AS(eisenstein_qexp(8, 10), std::invalid_argument);
  // E_4^3 - E_6^2 = 1728 Delta.
  const auto d = delta_qexp(60);
  const auto e43 = multiply(multiply(e4, e4, 60), e4, 60);
  const auto e62 = multiply(e6, e6, 60);
  for (int n = 0; n <= 60; ++n) CHECK(e43[n] - e62[n] == 1728 * d[n]);
}

TEST_CASE("Kronecker product agrees with schoolbook on signed inputs") {
  std::vector<mpz_class> a(90), b(70);
  for (size_t i = 0; i < a.size(); ++i) a[i] = mpz_class((i % 7) * 1000003) * (i % 3 == 0 ? -1 : 1) << static_cast<unsigned>(i % 97);
  for (size_t i = 0; i < b.size(); ++i) b[i] = mpz_class(i * i + 1) * (i % 2 ? -1 : 1);
  b[0] = 0;
  CHECK(mul_trunc(a, b, 120) == schoolbook(a, b, 120));
  CHECK(mul_trunc(a, b, 40) == schoolbook(a, b, 40));
  CHECK(mul_trunc(a, a, 150) == schoolbook(a, a, 150));
}

TEST_CASE("cusp form dimensions") {
  CHECK(cusp_dim(12) == 1);
  CHECK(cusp_dim(14) == 0);
  CHECK(cusp_dim(10) == 0);
  CHECK(cusp_dim(24) == 2);
  CHECK(cusp_dim(26) == 1);
  CHECK(cusp_dim(36) == 3);
  CHECK(cusp_dim(38) == 2);
  CHECK(cusp_dim(300) == 25);
  CHECK_THROWS_AS(cusp_dim(13), std::invalid_argument);
}

TEST_CASE("echelon basis in weight 16 and 24") {
  const auto b16 = miller_basis(16, 5);
  REQUIRE(b16.size() == 1);
  CHECK(b16[0][1] == 1);
  CHECK(b16[0][2] == 216);
  const auto b24 = miller_basis(24, 6);
  REQUIRE(b24.size() == 2);
  CHECK(b24[0][1] == 1);
  CHECK(b24[0][2] == 0);
  CHECK(b24[1][1] == 0);
  CHECK(b24[1][2] == 1);
  CHECK_THROWS_AS(miller_basis(24, 1), std::invalid_argument);
}

TEST_CASE("weight ladder reproduces standalone monomial bases") {
  for (int residue : {0, 2, 4, 6, 8, 10}) {
    WeightLadder ladder(residue, 80);
    for (int step = 0; step < 4; ++step) {
      const int k = ladder.weight();
      const auto direct = monomial_basis(k, 80);
      REQUIRE(ladder.basis().size() == direct.size());
      for (size_t i = 0; i < direct.size(); ++i) CHECK(ladder.basis()[i].coeffs == direct[i].coeffs);
      ladder.step();
    }
  }
}

TEST_CASE("Hecke matrices in weights 12 and 24") {
  const auto b12 = monomial_basis(12, 10);
  CHECK(hecke_matrix(12, 2, b12).at(0, 0) == -24);
  CHECK(hecke_matrix(12, 3, b12).at(0, 0) == 252);
  const auto b24 = monomial_basis(24, 10);
  CHECK(hecke_matrix(24, 2, b24).trace() == 1080);
  CHECK_THROWS_AS(hecke_matrix(24, 7, b24), std::invalid_argument);
}

TEST_CASE("arithmetic helpers") {
  CHECK(divisor_count(1) == 1);
  CHECK(divisor_count(720720) == 240);
  const auto dt = divisor_count_table(100);
  for (int n = 1; n <= 100; ++n) CHECK(dt[n] == divisor_count(n));
  CHECK(primes_up_to(30) == std::vector<int>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
  CHECK(as_prime_power(1024).prime == 2);
  CHECK(as_prime_power(1024).exponent == 10);
  CHECK(as_prime_power(12).exponent == 0);
  const auto& maj = divisor_majorant();
  for (int n : {1, 720720, 997920, 1000000})
    CHECK(divisor_count(n) <= maj.constant_for(n) * std::pow(n, kDivisorExponent));
  CHECK(maj.global_constant >= maj.scan_constant);
}
