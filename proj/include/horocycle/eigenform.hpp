#pragma once

#include "horocycle/bigfloat.hpp"
#include "horocycle/modular_basis.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace horocycle {

// Thrown when T_2 has (numerically) repeated eigenvalues, when a T_2
// eigenvector fails the T_3 check, or when the working-precision budget is
// exhausted before the eigenvalues reach the requested accuracy.
class EigenformError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Hecke-normalized eigenvalues lambda_f(n) = a_f(n) / n^((k-1)/2), n <= N,
// with a per-entry absolute error bound. Immutable once built.
class Eigenform {
 public:
  Eigenform(int weight, int index, int precision_bits, std::vector<BigFloat> lambda,
            std::vector<double> lambda_err);

  int weight() const { return weight_; }
  int index() const { return index_; }
  int precision_bits() const { return precision_bits_; }
  int table_size() const { return static_cast<int>(lambda_.size()) - 1; }

  const BigFloat& lambda(int n) const { return lambda_[static_cast<size_t>(n)]; }
  double lambda_value(int n) const { return values_[static_cast<size_t>(n)]; }
  double lambda_error(int n) const { return lambda_err_[static_cast<size_t>(n)]; }

  // Index 0 is unused (0.0).
  std::span<const double> values() const { return values_; }
  std::span<const double> errors() const { return lambda_err_; }

  // Throws std::out_of_range naming the required size when n exceeds the table.
  void require_table(int n) const;

 private:
  int weight_;
  int index_;
  int precision_bits_;
  std::vector<BigFloat> lambda_;
  std::vector<double> lambda_err_;
  std::vector<double> values_;
};

// 128 bits up to weight 100, 256 beyond.
int default_precision_bits(int k);

struct EigenformOptions {
  int precision_bits = 0;           // 0 selects default_precision_bits(k)
  double max_lambda_error = 1e-24;  // budget for the tracked error at primes
  int max_working_bits = 16384;
  // Evaluate a_f(n) from the basis for every n instead of only at primes
  // (slow; used to cross-check the multiplicative fill).
  bool direct_all = false;
};

// All Hecke eigenforms of weight k with tables for n <= N, ordered by
// lambda_f(2) ascending. Returns an empty list when S_k = 0 (odd k, k < 12,
// k = 14 ...).
std::vector<Eigenform> eigenforms(int k, int N, int precision_bits = 0);

// Same, from a precomputed monomial basis truncated at >= max(N, 3d).
std::vector<Eigenform> eigenforms_from_basis(int k, const std::vector<QExpansion>& basis, int N,
                                             const EigenformOptions& options = {});

// Builds eigenforms for every requested weight, walking each residue class
// mod 12 with a WeightLadder, and hands them to sink(k, forms) in ascending
// weight order within each class.
template <class Sink>
void for_each_weight(const std::vector<int>& weights, int N, const EigenformOptions& options,
                     Sink&& sink);

// Exact characteristic polynomial det(x I - T), coefficients low to high.
std::vector<mpz_class> characteristic_polynomial(const HeckeMatrix& t);

struct TableCheck {
  double max_deligne_excess = 0.0;       // max(|lambda(n)| - d(n) - err(n)), <= 0 when it holds
  double max_multiplicative_ratio = 0.0;  // max residual / tracked error over coprime pairs
  double max_recursion_ratio = 0.0;       // same for the Hecke recursion at prime powers
  double max_error = 0.0;                 // largest tracked lambda_err
  bool ok() const {
    return max_deligne_excess <= 0.0 && max_multiplicative_ratio <= 1.0 &&
           max_recursion_ratio <= 1.0;
  }
};

// Checks the Deligne bound, multiplicativity and the Hecke recursion for n <= limit.
TableCheck check_table(const Eigenform& f, int limit);

}  // namespace horocycle

#include "horocycle/eigenform_impl.hpp"
