#include "horocycle/modular_basis.hpp"

#include <stdexcept>
#include <string>

namespace horocycle {

namespace {

QExpansion one_series(int N) {
  QExpansion one{0, std::vector<mpz_class>(static_cast<size_t>(N) + 1, 0)};
  one.coeffs[0] = 1;
  return one;
}

QExpansion power(const QExpansion& base, int e, int N) {
  QExpansion result = one_series(N);
  QExpansion square = base;
  while (e > 0) {
    if (e & 1) result = multiply(result, square, N);
    e >>= 1;
    if (e > 0) square = multiply(square, square, N);
  }
  return result;
}

// E_4^a E_6^b of weight w, with b in {0, 1}. Weight 2 has no such monomial.
QExpansion eisenstein_monomial(int w, int N) {
  if (w < 0 || w % 2 != 0 || w == 2) throw std::invalid_argument("no Eisenstein monomial of weight " + std::to_string(w));
  const int b = w % 4 == 2 ? 1 : 0;
  const int a = (w - 6 * b) / 4;
  QExpansion e = power(eisenstein_qexp(4, N), a, N);
  if (b == 1) e = multiply(e, eisenstein_qexp(6, N), N);
  return e;
}

void check_even(int k) {
  if (k % 2 != 0) throw std::invalid_argument("odd weight " + std::to_string(k));
}

}  // namespace

int cusp_dim(int k) {
  check_even(k);
  if (k < 12) return 0;
  return k / 12 - (k % 12 == 2 ? 1 : 0);
}

std::vector<QExpansion> monomial_basis(int k, int N) {
  const int d = cusp_dim(k);
  std::vector<QExpansion> basis;
  if (d == 0) return basis;
  if (N < d) throw std::invalid_argument("monomial_basis: truncation below dimension");

  const QExpansion delta = delta_qexp(N);
  const QExpansion e4_cubed = power(eisenstein_qexp(4, N), 3, N);

  // Eisenstein parts E_{k - 12 i} for i = d, d - 1, ..., 1.
  std::vector<QExpansion> eis(static_cast<size_t>(d) + 1);
  eis[d] = eisenstein_monomial(k - 12 * d, N);
  for (int i = d - 1; i >= 1; --i) eis[i] = multiply(eis[i + 1], e4_cubed, N);

  QExpansion delta_power = delta;
  for (int i = 1; i <= d; ++i) {
    if (i > 1) delta_power = multiply(delta_power, delta, N);
    basis.push_back(multiply(delta_power, eis[i], N));
  }
  return basis;
}

std::vector<QExpansion> miller_basis(int k, int N) {
  const int d = cusp_dim(k);
  if (d > 0 && N < d) throw std::invalid_argument("miller_basis: N too small to echelonize");
  std::vector<QExpansion> basis = monomial_basis(k, N);
  // Clear the entries above the diagonal, bottom row first.
  for (int i = d - 1; i >= 0; --i) {
    for (int j = i + 1; j < d; ++j) {
      const mpz_class c = basis[i][j + 1];
      if (c == 0) continue;
      for (int n = 0; n <= N; ++n) basis[i].coeffs[n] -= c * basis[j].coeffs[n];
    }
  }
  return basis;
}

WeightLadder::WeightLadder(int residue, int N)
    : N_(N),
      weight_(12 + residue),
      delta_(delta_qexp(N)),
      e4_cubed_(power(eisenstein_qexp(4, N), 3, N)) {
  if (residue < 0 || residue >= 12 || residue % 2 != 0)
    throw std::invalid_argument("WeightLadder: residue must be even in [0, 12)");
  if (residue == 2) {
    // S_14 = 0; the next weight starts from E_14 = E_4^2 E_6.
    eisenstein_part_ = eisenstein_monomial(14, N);
  } else {
    const QExpansion base = eisenstein_monomial(residue, N);
    basis_.push_back(multiply(delta_, base, N));
    eisenstein_part_ = multiply(base, e4_cubed_, N);
  }
}

void WeightLadder::step() {
  std::vector<QExpansion> next;
  next.reserve(basis_.size() + 1);
  next.push_back(multiply(delta_, eisenstein_part_, N_));
  for (const QExpansion& g : basis_) next.push_back(multiply(delta_, g, N_));
  basis_ = std::move(next);
  eisenstein_part_ = multiply(eisenstein_part_, e4_cubed_, N_);
  weight_ += 12;
}

mpz_class HeckeMatrix::trace() const {
  mpz_class t = 0;
  for (int i = 0; i < dim; ++i) t += at(i, i);
  return t;
}

std::vector<mpz_class> triangular_coordinates(const std::vector<QExpansion>& basis,
                                              const std::vector<mpz_class>& h) {
  const int d = static_cast<int>(basis.size());
  std::vector<mpz_class> x(static_cast<size_t>(d));
  for (int n = 1; n <= d; ++n) {
    mpz_class v = h[n];
    for (int j = 0; j < n - 1; ++j) v -= x[j] * basis[j][n];
    x[n - 1] = v;
  }
  return x;
}

HeckeMatrix hecke_matrix(int k, int p, const std::vector<QExpansion>& basis) {
  const int d = static_cast<int>(basis.size());
  HeckeMatrix m{p, d, std::vector<mpz_class>(static_cast<size_t>(d) * d)};
  for (int i = 0; i < d; ++i) {
    if (basis[i].trunc() < p * d)
      throw std::invalid_argument("hecke_matrix: truncation " + std::to_string(basis[i].trunc()) +
                                  " below p*d = " + std::to_string(p * d));
    for (int n = 1; n <= d; ++n) {
      const int expected = n == i + 1 ? 1 : 0;
      if (n <= i + 1 && basis[i][n] != expected)
        throw std::invalid_argument("hecke_matrix: basis is not unitriangular");
    }
  }
  mpz_class pk;
  mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(k - 1));
  for (int j = 0; j < d; ++j) {
    std::vector<mpz_class> image(static_cast<size_t>(d) + 1, 0);
    for (int n = 1; n <= d; ++n) {
      image[n] = basis[j][p * n];
      if (n % p == 0) image[n] += pk * basis[j][n / p];
    }
    const auto x = triangular_coordinates(basis, image);
    for (int i = 0; i < d; ++i) m.entries[static_cast<size_t>(i * d + j)] = x[i];
  }
  return m;
}

}  // namespace horocycle
