#pragma once

#include "horocycle/eigenform.hpp"

#include <gmpxx.h>

#include <ostream>
#include <vector>

namespace horocycle {

// Exact sum of dyadic rationals m 2^e.
class DyadicSum {
 public:
  void add(const mpz_class& m, long e);
  void add(const BigFloat& x);
  void add(const DyadicSum& other) { add(other.mantissa_, other.exponent_); }
  double to_double() const;
  bool operator==(const DyadicSum& other) const;

 private:
  mpz_class mantissa_ = 0;
  long exponent_ = 0;
};

struct IntervalSum {
  DyadicSum exact;      // exact sum of the stored lambda(n)^2
  double value = 0.0;
  double error = 0.0;   // sum of (2|lambda(n)| + err(n)) err(n)
  int terms = 0;
};

// sum_{x < n <= x + z} lambda(n)^2. Requires x >= 2 and z > 0; throws
// std::out_of_range when x + z passes the table.
IntervalSum lambda_sq_interval_sum(const Eigenform& f, double x, double z);

struct ShiuRhs {
  double value = 0.0;        // (z / log x) exp(sum_{p <= x} lambda(p)^2 / p)
  double prime_sum = 0.0;    // sum_{p <= x} lambda(p)^2 / p
  int prime_powers_checked = 0;
  double max_hypothesis_ratio = 0.0;  // max lambda(p^l)^2 / 4^l over stored prime powers
};

// Throws std::invalid_argument for x < 3 and std::runtime_error if some stored
// prime power violates lambda(p^l)^2 <= 4^l beyond its error.
ShiuRhs shiu_rhs(const Eigenform& f, double x, double z);

struct IntervalReport {
  int k = 0;
  int index = 0;
  double x = 0.0;
  double theta = 0.0;
  double z = 0.0;
  double sum_value = 0.0;
  double sum_error = 0.0;
  double shiu_rhs = 0.0;
  double ratio = 0.0;
};

struct ShiuScan {
  std::vector<IntervalReport> reports;
  int skipped = 0;  // cells beyond the table
  double max_ratio = 0.0;
};

// z = x^theta for every (x, theta); cells with x + z beyond the table are skipped.
ShiuScan shiu_ratio_scan(const Eigenform& f, const std::vector<double>& xs,
                         const std::vector<double>& thetas);

inline const std::vector<double> kDefaultShiuX{1e3, 1e4};
inline const std::vector<double> kDefaultShiuTheta{0.5, 0.7, 1.0};

// Rows "k,index,x,z,sum,rhs,ratio" (no header).
void write_csv_rows(std::ostream& out, const std::vector<IntervalReport>& reports);

// max lambda(n)^2 / n^0.2 over each dyadic block (2^j, 2^(j+1)] inside the table.
struct GrowthProbe {
  std::vector<int> block_end;
  std::vector<double> block_max;
};
GrowthProbe growth_probe(const Eigenform& f);

}  // namespace horocycle
