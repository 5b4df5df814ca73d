#include "horocycle/short_interval.hpp"

#include "horocycle/arith.hpp"
#include "horocycle/restriction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace horocycle {

void DyadicSum::add(const mpz_class& m, long e) {
  if (m == 0) return;
  if (mantissa_ == 0) {
    mantissa_ = m;
    exponent_ = e;
    return;
  }
  if (e >= exponent_) {
    mantissa_ += mpz_class(m << static_cast<mp_bitcnt_t>(e - exponent_));
  } else {
    mantissa_ <<= static_cast<mp_bitcnt_t>(exponent_ - e);
    mantissa_ += m;
    exponent_ = e;
  }
}

void DyadicSum::add(const BigFloat& x) {
  if (mpfr_zero_p(x.raw())) return;
  mpz_class m;
  const long e = mpfr_get_z_2exp(m.get_mpz_t(), x.raw());
  add(m, e);
}

double DyadicSum::to_double() const {
  if (mantissa_ == 0) return 0.0;
  BigFloat v(static_cast<mpfr_prec_t>(std::max<size_t>(64, mpz_sizeinbase(mantissa_.get_mpz_t(), 2))));
  mpfr_set_z_2exp(v.raw(), mantissa_.get_mpz_t(), exponent_, MPFR_RNDN);
  return v.to_double();
}

bool DyadicSum::operator==(const DyadicSum& other) const {
  if (mantissa_ == 0 || other.mantissa_ == 0) return mantissa_ == other.mantissa_;
  // Compare m1 2^e1 and m2 2^e2 exactly.
  if (exponent_ <= other.exponent_)
    return mantissa_ == mpz_class(other.mantissa_ << static_cast<mp_bitcnt_t>(other.exponent_ - exponent_));
  return other == *this;
}

IntervalSum lambda_sq_interval_sum(const Eigenform& f, double x, double z) {
  if (!(x >= 2.0)) throw std::invalid_argument("interval sum: x must be >= 2");
  if (!(z > 0.0)) throw std::invalid_argument("interval sum: z must be positive");
  const auto first = static_cast<long long>(std::floor(x)) + 1;
  const auto last = static_cast<long long>(std::floor(x + z));
  IntervalSum s;
  if (last < first) return s;
  if (last > f.table_size()) f.require_table(static_cast<int>(std::min<long long>(last, 2'000'000'000)));
  BigFloat sq(2 * f.precision_bits());
  for (long long n = first; n <= last; ++n) {
    const int i = static_cast<int>(n);
    mpfr_sqr(sq.raw(), f.lambda(i).raw(), MPFR_RNDN);  // exact at doubled precision
    s.exact.add(sq);
    const double e = f.lambda_error(i);
    s.error += (2.0 * std::fabs(f.lambda_value(i)) + e) * e;
    ++s.terms;
  }
  s.value = s.exact.to_double();
  return s;
}

ShiuRhs shiu_rhs(const Eigenform& f, double x, double z) {
  if (!(x >= 3.0)) throw std::invalid_argument("shiu_rhs: x must be >= 3");
  if (!(z > 0.0)) throw std::invalid_argument("shiu_rhs: z must be positive");
  const int P = static_cast<int>(std::floor(x));
  f.require_table(P);
  ShiuRhs r;
  for (int p : primes_up_to(P)) {
    const double l = f.lambda_value(p);
    r.prime_sum += l * l / p;
  }
  r.value = z / std::log(x) * std::exp(r.prime_sum);

  // Hypothesis (i) with A = 4 on every stored prime power.
  for (int p : primes_up_to(f.table_size())) {
    double four_l = 1.0;
    for (long long q = p; q <= f.table_size(); q *= p) {
      four_l *= 4.0;
      const double l = std::fabs(f.lambda_value(static_cast<int>(q)));
      const double e = f.lambda_error(static_cast<int>(q));
      const double lo = std::max(0.0, l - e);
      r.max_hypothesis_ratio = std::max(r.max_hypothesis_ratio, l * l / four_l);
      ++r.prime_powers_checked;
      if (lo * lo > four_l)
        throw std::runtime_error("lambda(" + std::to_string(q) + ")^2 exceeds 4^l: corrupt table");
    }
  }
  return r;
}

ShiuScan shiu_ratio_scan(const Eigenform& f, const std::vector<double>& xs,
                         const std::vector<double>& thetas) {
  ShiuScan scan;
  for (double x : xs)
    for (double theta : thetas) {
      if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in (0, 1]");
      const double z = std::pow(x, theta);
      if (std::floor(x + z) > f.table_size()) {
        ++scan.skipped;
        continue;
      }
      const IntervalSum s = lambda_sq_interval_sum(f, x, z);
      const ShiuRhs rhs = shiu_rhs(f, x, z);
      IntervalReport r{f.weight(), f.index(), x, theta, z, s.value, s.error, rhs.value, s.value / rhs.value};
      scan.max_ratio = std::max(scan.max_ratio, r.ratio);
      scan.reports.push_back(r);
    }
  return scan;
}

void write_csv_rows(std::ostream& out, const std::vector<IntervalReport>& reports) {
  for (const auto& r : reports)
    out << r.k << ',' << r.index << ',' << format_double(r.x) << ',' << format_double(r.z) << ','
        << format_double(r.sum_value) << ',' << format_double(r.shiu_rhs) << ',' << format_double(r.ratio)
        << '\n';
}

GrowthProbe growth_probe(const Eigenform& f) {
  GrowthProbe g;
  for (int lo = 1; lo < f.table_size(); lo *= 2) {
    const int hi = std::min(2 * lo, f.table_size());
    double best = 0.0;
    for (int n = lo + 1; n <= hi; ++n) {
      const double l = f.lambda_value(n);
      best = std::max(best, l * l / std::pow(static_cast<double>(n), 0.2));
    }
    g.block_end.push_back(hi);
    g.block_max.push_back(best);
  }
  return g;
}

}  // namespace horocycle
