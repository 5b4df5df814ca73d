#pragma once

#include "horocycle/qseries.hpp"

#include <gmpxx.h>

#include <vector>

namespace horocycle {

// dim S_k(SL_2(Z)) for even k >= 0; odd k throws std::invalid_argument.
int cusp_dim(int k);

// The monomials Delta^i E_4^a E_6^b (i = 1..d, b in {0,1}) spanning S_k.
// Each starts q^i + O(q^(i+1)), so the basis is unitriangular.
std::vector<QExpansion> monomial_basis(int k, int N);

// Echelon basis f_i with a_{f_i}(j) = delta_ij for 1 <= i, j <= d.
// Throws std::invalid_argument when N < d.
std::vector<QExpansion> miller_basis(int k, int N);

// Walks the weights k0, k0 + 12, k0 + 24, ... of one residue class mod 12,
// building each monomial basis from the previous one by multiplying with
// Delta. Costs d + 1 series products per step.
class WeightLadder {
 public:
  WeightLadder(int residue, int N);

  int weight() const { return weight_; }
  const std::vector<QExpansion>& basis() const { return basis_; }
  int trunc() const { return N_; }

  // Advances to weight() + 12.
  void step();

 private:
  int N_;
  int weight_;
  QExpansion delta_;
  QExpansion e4_cubed_;
  QExpansion eisenstein_part_;  // E_4^a E_6^b of weight weight_ - 12
  std::vector<QExpansion> basis_;
};

// Matrix of T_p on a unitriangular basis: column j holds the coordinates of
// T_p g_j, where a_{T_p g}(n) = a_g(pn) + p^(k-1) a_g(n/p).
struct HeckeMatrix {
  int prime = 0;
  int dim = 0;
  std::vector<mpz_class> entries;  // row-major

  const mpz_class& at(int i, int j) const { return entries[static_cast<size_t>(i * dim + j)]; }
  mpz_class trace() const;
};

// Requires a truncation of at least p * d; throws std::invalid_argument otherwise
// or if the basis is not unitriangular.
HeckeMatrix hecke_matrix(int k, int p, const std::vector<QExpansion>& basis);

// Coordinates of the form with leading coefficients h[1..d] in a unitriangular basis.
std::vector<mpz_class> triangular_coordinates(const std::vector<QExpansion>& basis,
                                              const std::vector<mpz_class>& h);

}  // namespace horocycle
