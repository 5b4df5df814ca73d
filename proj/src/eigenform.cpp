#include "horocycle/eigenform.hpp"

#include "horocycle/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

namespace horocycle {

// ---------------------------------------------------------------------------
// Eigenform

Eigenform::Eigenform(int weight, int index, int precision_bits, std::vector<BigFloat> lambda,
                     std::vector<double> lambda_err)
    : weight_(weight),
      index_(index),
      precision_bits_(precision_bits),
      lambda_(std::move(lambda)),
      lambda_err_(std::move(lambda_err)) {
  if (lambda_.size() < 2 || lambda_.size() != lambda_err_.size())
    throw std::invalid_argument("Eigenform: table and error sizes differ or table is empty");
  values_.resize(lambda_.size());
  for (size_t n = 0; n < lambda_.size(); ++n) values_[n] = lambda_[n].to_double();
  values_[0] = 0.0;
}

void Eigenform::require_table(int n) const {
  if (n > table_size())
    throw std::out_of_range("eigenvalue table for k=" + std::to_string(weight_) + " index " +
                            std::to_string(index_) + " has N=" + std::to_string(table_size()) +
                            ", need N >= " + std::to_string(n));
}

int default_precision_bits(int k) { return k <= 100 ? 128 : 256; }

// ---------------------------------------------------------------------------
// Characteristic polynomial and real roots of T_2

std::vector<mpz_class> characteristic_polynomial(const HeckeMatrix& t) {
  const int d = t.dim;
  std::vector<mpz_class> c(static_cast<size_t>(d) + 1, 0);
  c[d] = 1;
  // Faddeev-LeVerrier; every division below is exact over Z.
  std::vector<mpz_class> m(static_cast<size_t>(d) * d, 0), am(m.size());
  for (int i = 0; i < d; ++i) m[i * d + i] = 1;
  for (int step = 1; step <= d; ++step) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        mpz_class s = 0;
        for (int l = 0; l < d; ++l) s += t.at(i, l) * m[l * d + j];
        am[i * d + j] = s;
      }
    mpz_class tr = 0;
    for (int i = 0; i < d; ++i) tr += am[i * d + i];
    mpz_class q;
    mpz_divexact_ui(q.get_mpz_t(), tr.get_mpz_t(), static_cast<unsigned long>(step));
    c[d - step] = -q;
    m = am;
    for (int i = 0; i < d; ++i) m[i * d + i] += c[d - step];
  }
  return c;
}

namespace {

// Sign of p(m * 2^e) computed exactly.
int sign_at(const std::vector<mpz_class>& poly, const mpz_class& m, long e) {
  const int d = static_cast<int>(poly.size()) - 1;
  mpz_class acc = poly[d];
  if (e >= 0) {
    mpz_class x = m;
    x <<= static_cast<mp_bitcnt_t>(e);
    for (int i = d - 1; i >= 0; --i) acc = acc * x + poly[i];
  } else {
    // 2^(-e d) p(m 2^e) = sum c_i m^i 2^(-e (d - i)).
    const auto shift = static_cast<mp_bitcnt_t>(-e);
    for (int i = d - 1; i >= 0; --i) {
      acc *= m;
      acc += mpz_class(poly[i] << static_cast<mp_bitcnt_t>(shift * (d - i)));
    }
  }
  return sgn(acc);
}

int sign_at(const std::vector<mpz_class>& poly, const BigFloat& x) {
  mpz_class m;
  const long e = mpfr_get_z_2exp(m.get_mpz_t(), x.raw());
  return sign_at(poly, m, e);
}

// A dyadic interval [lo, hi] = [m 2^e, (m + 1) 2^e] containing exactly one root.
struct RootBracket {
  mpz_class m;
  long e;
  int sign_lo;
};

// Isolates the d real roots of poly inside (-2^bound_exp, 2^bound_exp) by
// counting sign changes on a dyadic grid, refining the grid until d are seen.
std::vector<RootBracket> isolate_roots(const std::vector<mpz_class>& poly, long bound_exp) {
  const int d = static_cast<int>(poly.size()) - 1;
  for (int g = std::max(6, static_cast<int>(std::ceil(std::log2(32.0 * d)))); g <= 40; g += 2) {
    const long e = bound_exp + 1 - g;  // grid step 2^e over [-2^bound_exp, 2^bound_exp]
    const mpz_class count = mpz_class(1) << static_cast<mp_bitcnt_t>(g);
    const mpz_class start = -(count >> 1);
    std::vector<RootBracket> found;
    bool exact_root = false;
    int prev = sign_at(poly, start, e);
    for (mpz_class j = 0; j < count; ++j) {
      const mpz_class m = start + j;
      const int next = sign_at(poly, mpz_class(m + 1), e);
      if (next == 0) exact_root = true;
      if (prev != 0 && next != 0 && prev != next) found.push_back({m, e, prev});
      if (next != 0) prev = next;
      if (exact_root) break;
    }
    if (exact_root) break;  // rational root: not expected for d > 1, handled by caller error
    if (static_cast<int>(found.size()) == d) return found;
  }
  throw EigenformError("T_2 eigenvalues could not be separated (collision or rational root)");
}

void bisect(const std::vector<mpz_class>& poly, RootBracket& b, int steps) {
  for (int s = 0; s < steps; ++s) {
    b.m *= 2;
    b.e -= 1;
    const int mid = sign_at(poly, mpz_class(b.m + 1), b.e);
    if (mid == 0) return;  // exact dyadic root; Newton will stay there
    if (mid == b.sign_lo) b.m += 1;
  }
}

// Newton iteration at precision prec, started from the bracket midpoint.
BigFloat newton_root(const std::vector<mpz_class>& poly, const RootBracket& b, mpfr_prec_t prec) {
  const int d = static_cast<int>(poly.size()) - 1;
  std::vector<BigFloat> c;
  c.reserve(poly.size());
  for (const auto& v : poly) c.emplace_back(v, prec);

  BigFloat x(prec), lo(prec), hi(prec), p(prec), dp(prec), step(prec);
  mpfr_set_z_2exp(lo.raw(), b.m.get_mpz_t(), b.e, MPFR_RNDN);
  mpfr_set_z_2exp(hi.raw(), mpz_class(b.m + 1).get_mpz_t(), b.e, MPFR_RNDN);
  mpfr_add(x.raw(), lo.raw(), hi.raw(), MPFR_RNDN);
  mpfr_div_2ui(x.raw(), x.raw(), 1, MPFR_RNDN);

  for (int iter = 0; iter < 200; ++iter) {
    mpfr_set(p.raw(), c[d].raw(), MPFR_RNDN);
    mpfr_set_zero(dp.raw(), 1);
    for (int i = d - 1; i >= 0; --i) {
      mpfr_mul(dp.raw(), dp.raw(), x.raw(), MPFR_RNDN);
      mpfr_add(dp.raw(), dp.raw(), p.raw(), MPFR_RNDN);
      mpfr_mul(p.raw(), p.raw(), x.raw(), MPFR_RNDN);
      mpfr_add(p.raw(), p.raw(), c[i].raw(), MPFR_RNDN);
    }
    if (mpfr_zero_p(dp.raw())) break;
    mpfr_div(step.raw(), p.raw(), dp.raw(), MPFR_RNDN);
    mpfr_sub(x.raw(), x.raw(), step.raw(), MPFR_RNDN);
    if (mpfr_cmp(x.raw(), lo.raw()) < 0 || mpfr_cmp(x.raw(), hi.raw()) > 0)
      throw EigenformError("Newton iteration left its isolating interval");
    if (mpfr_zero_p(step.raw()) ||
        mpfr_get_exp(step.raw()) < mpfr_get_exp(x.raw()) - static_cast<long>(prec) + 4)
      break;
  }
  return x;
}

// Confirms a sign change of poly across x(1 -+ 2^-rel_bits).
bool certify_root(const std::vector<mpz_class>& poly, const BigFloat& x, long rel_bits) {
  const mpfr_prec_t prec = x.precision() + 8;
  BigFloat r(prec), lo(prec), hi(prec);
  mpfr_abs(r.raw(), x.raw(), MPFR_RNDN);
  mpfr_div_2si(r.raw(), r.raw(), rel_bits, MPFR_RNDN);
  mpfr_sub(lo.raw(), x.raw(), r.raw(), MPFR_RNDD);
  mpfr_add(hi.raw(), x.raw(), r.raw(), MPFR_RNDU);
  const int a = sign_at(poly, lo);
  const int b = sign_at(poly, hi);
  return a == 0 || b == 0 || a != b;
}

using Matrix = std::vector<BigFloat>;  // row-major d x d

// Null vector of (T - mu I) with its first coordinate scaled to 1, by
// Gaussian elimination with complete pivoting.
std::vector<BigFloat> null_vector(const HeckeMatrix& t, const BigFloat& mu, mpfr_prec_t prec) {
  const int d = t.dim;
  Matrix a;
  a.reserve(static_cast<size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      a.emplace_back(t.at(i, j), prec);
      if (i == j) mpfr_sub(a.back().raw(), a.back().raw(), mu.raw(), MPFR_RNDN);
    }
  auto at = [&](int i, int j) -> BigFloat& { return a[static_cast<size_t>(i * d + j)]; };

  std::vector<int> col(static_cast<size_t>(d));
  std::iota(col.begin(), col.end(), 0);
  BigFloat factor(prec), tmp(prec);
  for (int s = 0; s < d - 1; ++s) {
    int pr = s, pc = s;
    for (int i = s; i < d; ++i)
      for (int j = s; j < d; ++j)
        if (mpfr_cmpabs(at(i, j).raw(), at(pr, pc).raw()) > 0) {
          pr = i;
          pc = j;
        }
    if (pr != s)
      for (int j = 0; j < d; ++j) std::swap(at(s, j), at(pr, j));
    if (pc != s) {
      for (int i = 0; i < d; ++i) std::swap(at(i, s), at(i, pc));
      std::swap(col[s], col[pc]);
    }
    if (mpfr_zero_p(at(s, s).raw())) throw EigenformError("eigenvalue of multiplicity > 1");
    for (int i = s + 1; i < d; ++i) {
      mpfr_div(factor.raw(), at(i, s).raw(), at(s, s).raw(), MPFR_RNDN);
      for (int j = s + 1; j < d; ++j) {
        mpfr_mul(tmp.raw(), factor.raw(), at(s, j).raw(), MPFR_RNDN);
        mpfr_sub(at(i, j).raw(), at(i, j).raw(), tmp.raw(), MPFR_RNDN);
      }
      mpfr_set_zero(at(i, s).raw(), 1);
    }
  }
  // Back substitution with the last permuted unknown fixed to 1.
  std::vector<BigFloat> z(static_cast<size_t>(d), BigFloat(prec));
  mpfr_set_ui(z[d - 1].raw(), 1, MPFR_RNDN);
  for (int i = d - 2; i >= 0; --i) {
    mpfr_neg(tmp.raw(), at(i, d - 1).raw(), MPFR_RNDN);
    for (int j = i + 1; j < d - 1; ++j) {
      mpfr_mul(factor.raw(), at(i, j).raw(), z[j].raw(), MPFR_RNDN);
      mpfr_sub(tmp.raw(), tmp.raw(), factor.raw(), MPFR_RNDN);
    }
    mpfr_div(z[i].raw(), tmp.raw(), at(i, i).raw(), MPFR_RNDN);
  }
  std::vector<BigFloat> c(static_cast<size_t>(d), BigFloat(prec));
  for (int i = 0; i < d; ++i) mpfr_set(c[col[i]].raw(), z[i].raw(), MPFR_RNDN);
  if (mpfr_zero_p(c[0].raw())) throw EigenformError("eigenvector has vanishing q^1 coefficient");
  BigFloat lead = c[0];
  for (auto& v : c) mpfr_div(v.raw(), v.raw(), lead.raw(), MPFR_RNDN);
  return c;
}

struct Eigenvector {
  std::vector<BigFloat> coords;  // f = sum coords[i] g_i, coords[0] = 1
  std::vector<double> log2_err;  // log2 of the error bound per coordinate (-inf if zero)
};

double log2_abs(const BigFloat& x) {
  if (mpfr_zero_p(x.raw())) return -HUGE_VAL;
  long e = 0;
  const double m = mpfr_get_d_2exp(&e, x.raw(), MPFR_RNDN);
  return static_cast<double>(e) + std::log2(std::fabs(m));
}

double log2_abs(const mpz_class& x) {
  if (x == 0) return -HUGE_VAL;
  long e = 0;
  const double m = mpz_get_d_2exp(&e, x.get_mpz_t());
  return static_cast<double>(e) + std::log2(std::fabs(m));
}

double log2_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -HUGE_VAL) return a;
  return a + std::log2(1.0 + std::exp2(b - a));
}

// Eigenvectors of T_2 at precision prec, with a per-coordinate error
// estimate from a second run 64 bits more precise.
std::vector<Eigenvector> t2_eigenvectors(const HeckeMatrix& t2,
                                         const std::vector<mpz_class>& charpoly,
                                         std::vector<RootBracket> brackets, long bound_exp,
                                         mpfr_prec_t prec) {
  std::vector<Eigenvector> out;
  for (auto& b : brackets) {
    // Shrink the bracket to ~64 relative bits so Newton converges from its midpoint.
    const long width_target = bound_exp - 64;
    if (b.e > width_target) bisect(charpoly, b, static_cast<int>(b.e - width_target));

    const BigFloat mu = newton_root(charpoly, b, prec);
    const BigFloat mu_fine = newton_root(charpoly, b, prec + 64);
    if (!certify_root(charpoly, mu_fine, static_cast<long>(prec) / 2))
      throw EigenformError("T_2 eigenvalue could not be certified at " + std::to_string(prec) +
                           " bits");

    auto coarse = null_vector(t2, mu, prec);
    auto fine = null_vector(t2, mu_fine, prec + 64);
    Eigenvector ev;
    ev.log2_err.resize(coarse.size());
    BigFloat diff(prec + 64);
    for (size_t i = 0; i < coarse.size(); ++i) {
      mpfr_sub(diff.raw(), fine[i].raw(), coarse[i].raw(), MPFR_RNDN);
      // Observed discrepancy doubled, plus a floor at the coarse precision.
      const double observed = log2_abs(diff) + 1.0;
      const double floor = log2_abs(fine[i]) - static_cast<double>(prec) + 8.0;
      ev.log2_err[i] = log2_add(observed, floor);
    }
    ev.coords = std::move(fine);
    out.push_back(std::move(ev));
  }
  return out;
}

// Fills lambda(n) for composite n from prime values by multiplicativity and
// the Hecke recursion lambda(p^(j+1)) = lambda(p) lambda(p^j) - lambda(p^(j-1)).
void multiplicative_fill(std::vector<BigFloat>& lam, std::vector<double>& err,
                         const std::vector<int>& spf, mpfr_prec_t prec) {
  const int N = static_cast<int>(lam.size()) - 1;
  const double u = std::ldexp(1.0, -static_cast<int>(prec));
  const double slack = 1.0 + 1e-12;
  for (int n = 2; n <= N; ++n) {
    const int p = spf[n];
    int m = n, pk = 1, j = 0;
    while (m % p == 0) {
      m /= p;
      pk *= p;
      ++j;
    }
    if (m == 1 && j == 1) continue;  // prime: already set
    BigFloat& out = lam[n];
    if (m == 1) {
      const int prev = pk / p, prev2 = prev / p;
      mpfr_fms(out.raw(), lam[p].raw(), lam[prev].raw(), lam[prev2].raw(), MPFR_RNDN);
      const double x = abs_upper(lam[p]), y = abs_upper(lam[prev]);
      err[n] = (x * err[prev] + y * err[p] + err[p] * err[prev] + err[prev2] +
                u * abs_upper(out)) * slack;
    } else {
      mpfr_mul(out.raw(), lam[pk].raw(), lam[m].raw(), MPFR_RNDN);
      const double x = abs_upper(lam[pk]), y = abs_upper(lam[m]);
      err[n] = (x * err[m] + y * err[pk] + err[pk] * err[m] + u * abs_upper(out)) * slack;
    }
  }
}

// lambda(n) = a(n) / n^((k-1)/2) for every n, from exact integer coefficients.
void exact_table(const QExpansion& g, int k, int N, mpfr_prec_t prec, std::vector<BigFloat>& lam,
                 std::vector<double>& err) {
  const mpfr_prec_t work = prec + 64;
  BigFloat a(work), scale(work), root(work);
  for (int n = 1; n <= N; ++n) {
    mpfr_set_z(a.raw(), g[n].get_mpz_t(), MPFR_RNDN);
    mpfr_ui_pow_ui(scale.raw(), static_cast<unsigned long>(n), static_cast<unsigned long>((k - 2) / 2),
                   MPFR_RNDN);
    mpfr_sqrt_ui(root.raw(), static_cast<unsigned long>(n), MPFR_RNDN);
    mpfr_mul(scale.raw(), scale.raw(), root.raw(), MPFR_RNDN);
    mpfr_div(lam[n].raw(), a.raw(), scale.raw(), MPFR_RNDN);
    err[n] = abs_upper(lam[n]) * (std::ldexp(1.0, -static_cast<int>(prec)) +
                                  std::ldexp(1.0, -static_cast<int>(work) + 3));
  }
}

}  // namespace

std::vector<Eigenform> eigenforms(int k, int N, int precision_bits) {
  if (k % 2 != 0 || k < 12 || cusp_dim(k) == 0) return {};
  if (N < 1) throw std::invalid_argument("eigenforms: N must be >= 1");
  const int d = cusp_dim(k);
  EigenformOptions options;
  options.precision_bits = precision_bits;
  return eigenforms_from_basis(k, monomial_basis(k, std::max(N, 3 * d)), N, options);
}

std::vector<Eigenform> eigenforms_from_basis(int k, const std::vector<QExpansion>& basis, int N,
                                             const EigenformOptions& options) {
  const int d = static_cast<int>(basis.size());
  if (d == 0) return {};
  if (N < 1) throw std::invalid_argument("eigenforms: N must be >= 1");
  if (basis.front().trunc() < std::max(N, 3 * d))
    throw std::invalid_argument("eigenforms: basis truncation below max(N, 3d)");
  const mpfr_prec_t prec = options.precision_bits > 0 ? options.precision_bits
                                                       : default_precision_bits(k);
  const auto spf = smallest_prime_factor_table(N);
  const auto primes = primes_up_to(N);

  auto blank_table = [&] {
    std::vector<BigFloat> lam(static_cast<size_t>(N) + 1, BigFloat(prec));
    mpfr_set_ui(lam[1].raw(), 1, MPFR_RNDN);
    return lam;
  };

  if (d == 1) {
    auto lam = blank_table();
    std::vector<double> err(lam.size(), 0.0);
    exact_table(basis[0], k, N, prec, lam, err);
    err[1] = 0.0;
    std::vector<Eigenform> out;
    out.emplace_back(k, 0, static_cast<int>(prec), std::move(lam), std::move(err));
    return out;
  }

  const HeckeMatrix t2 = hecke_matrix(k, 2, basis);
  const HeckeMatrix t3 = hecke_matrix(k, 3, basis);
  const auto charpoly = characteristic_polynomial(t2);
  // |a_f(2)| <= 2 * 2^((k-1)/2) < 2^(k/2 + 1).
  const long bound_exp = k / 2 + 1;
  const auto brackets = isolate_roots(charpoly, bound_exp);

  // Which n get a_f(n) straight from the basis.
  std::vector<int> direct;
  if (options.direct_all) {
    for (int n = 2; n <= N; ++n) direct.push_back(n);
  } else {
    direct = primes;
  }

  for (mpfr_prec_t work = std::max<mpfr_prec_t>(2 * prec, 256) + 64;;
       work *= 2) {
    if (work > options.max_working_bits)
      throw EigenformError("precision budget exceeded for k=" + std::to_string(k));
    const auto vectors = t2_eigenvectors(t2, charpoly, brackets, bound_exp, work);
    const mpfr_prec_t wp = work + 64;

    // Basis coefficients at the sampled n, and n^((k-1)/2).
    std::vector<std::vector<BigFloat>> g(direct.size());
    std::vector<std::vector<double>> g_log2(direct.size());
    std::vector<BigFloat> scale(direct.size(), BigFloat(wp));
#pragma omp parallel for schedule(dynamic, 16)
    for (size_t s = 0; s < direct.size(); ++s) {
      const int n = direct[s];
      g[s].reserve(static_cast<size_t>(d));
      for (int i = 0; i < d; ++i) {
        g[s].emplace_back(basis[i][n], wp);
        g_log2[s].push_back(log2_abs(basis[i][n]));
      }
      BigFloat root(wp);
      mpfr_ui_pow_ui(scale[s].raw(), static_cast<unsigned long>(n),
                     static_cast<unsigned long>((k - 2) / 2), MPFR_RNDN);
      mpfr_sqrt_ui(root.raw(), static_cast<unsigned long>(n), MPFR_RNDN);
      mpfr_mul(scale[s].raw(), scale[s].raw(), root.raw(), MPFR_RNDN);
    }

    std::vector<Eigenform> forms;
    bool within_budget = true;
    for (const Eigenvector& ev : vectors) {
      // Simultaneous T_3 eigenvector check.
      {
        BigFloat a3(wp), acc(wp), tmp(wp), worst(wp), norm(wp);
        for (int i = 0; i < d; ++i) {
          mpfr_mul_z(tmp.raw(), ev.coords[i].raw(), basis[i][3].get_mpz_t(), MPFR_RNDN);
          mpfr_add(a3.raw(), a3.raw(), tmp.raw(), MPFR_RNDN);
        }
        for (int i = 0; i < d; ++i) {
          mpfr_set_zero(acc.raw(), 1);
          for (int j = 0; j < d; ++j) {
            mpfr_mul_z(tmp.raw(), ev.coords[j].raw(), t3.at(i, j).get_mpz_t(), MPFR_RNDN);
            mpfr_add(acc.raw(), acc.raw(), tmp.raw(), MPFR_RNDN);
          }
          if (mpfr_cmpabs(acc.raw(), norm.raw()) > 0) mpfr_abs(norm.raw(), acc.raw(), MPFR_RNDN);
          mpfr_mul(tmp.raw(), a3.raw(), ev.coords[i].raw(), MPFR_RNDN);
          mpfr_sub(acc.raw(), acc.raw(), tmp.raw(), MPFR_RNDN);
          if (mpfr_cmpabs(acc.raw(), worst.raw()) > 0) mpfr_abs(worst.raw(), acc.raw(), MPFR_RNDN);
        }
        if (!mpfr_zero_p(worst.raw()) && log2_abs(worst) - log2_abs(norm) > -static_cast<double>(work) / 4)
          throw EigenformError("T_2 eigenvector is not a T_3 eigenvector for k=" +
                               std::to_string(k));
      }

      auto lam = blank_table();
      std::vector<double> err(lam.size(), 0.0);
      const double u_store = std::ldexp(1.0, -static_cast<int>(prec));
#pragma omp parallel for schedule(dynamic, 16)
      for (size_t s = 0; s < direct.size(); ++s) {
        const int n = direct[s];
        BigFloat a(wp), tmp(wp);
        double log2_prop = -HUGE_VAL, log2_mag = -HUGE_VAL;
        for (int i = 0; i < d; ++i) {
          mpfr_mul(tmp.raw(), ev.coords[i].raw(), g[s][i].raw(), MPFR_RNDN);
          mpfr_add(a.raw(), a.raw(), tmp.raw(), MPFR_RNDN);
          log2_prop = log2_add(log2_prop, g_log2[s][i] + ev.log2_err[i]);
          log2_mag = log2_add(log2_mag, g_log2[s][i] + log2_abs(ev.coords[i]));
        }
        mpfr_div(a.raw(), a.raw(), scale[s].raw(), MPFR_RNDN);
        const double log2_scale = log2_abs(scale[s]);
        // Coordinate errors, accumulated rounding (2d + 4 ulps of the
        // magnitude sum), and the final rounding to the stored precision.
        const double log2_round = log2_mag + std::log2(2.0 * d + 4.0) - static_cast<double>(wp);
        const double bound = std::exp2(log2_add(log2_prop, log2_round) - log2_scale);
        mpfr_set(lam[n].raw(), a.raw(), MPFR_RNDN);
        err[n] = (bound + u_store * abs_upper(lam[n])) * (1.0 + 1e-12);
      }
      double worst = 0.0;
      for (int p : primes) worst = std::max(worst, err[p]);
      if (worst > options.max_lambda_error) {
        within_budget = false;
        break;
      }
      if (!options.direct_all) multiplicative_fill(lam, err, spf, prec);
      forms.emplace_back(k, 0, static_cast<int>(prec), std::move(lam), std::move(err));
    }
    if (!within_budget) continue;

    std::sort(forms.begin(), forms.end(), [](const Eigenform& a, const Eigenform& b) {
      return mpfr_less_p(a.lambda(2).raw(), b.lambda(2).raw()) != 0;
    });
    std::vector<Eigenform> ordered;
    ordered.reserve(forms.size());
    for (size_t i = 0; i < forms.size(); ++i) {
      const Eigenform& f = forms[i];
      std::vector<BigFloat> lam;
      std::vector<double> err;
      lam.reserve(static_cast<size_t>(N) + 1);
      for (int n = 0; n <= N; ++n) {
        lam.push_back(f.lambda(n));
        err.push_back(f.lambda_error(n));
      }
      ordered.emplace_back(k, static_cast<int>(i), f.precision_bits(), std::move(lam), std::move(err));
    }
    return ordered;
  }
}

// ---------------------------------------------------------------------------
// Table checks

TableCheck check_table(const Eigenform& f, int limit) {
  limit = std::min(limit, f.table_size());
  TableCheck check;
  const auto dtab = divisor_count_table(limit);
  const mpfr_prec_t prec = 2 * f.precision_bits() + 64;
  BigFloat prod(prec), resid(prec);
  const double u = std::ldexp(1.0, -static_cast<int>(prec) + 2);

  double deligne = -HUGE_VAL;
  for (int n = 1; n <= limit; ++n) {
    check.max_error = std::max(check.max_error, f.lambda_error(n));
    double excess = std::fabs(f.lambda_value(n)) - dtab[n] - f.lambda_error(n);
    // Near-equality at |lambda| = d(n) is decided in high precision.
    if (excess > -1e-9) {
      BigFloat bound(static_cast<double>(dtab[n]) + f.lambda_error(n), prec);
      mpfr_abs(resid.raw(), f.lambda(n).raw(), MPFR_RNDN);
      mpfr_sub(resid.raw(), resid.raw(), bound.raw(), MPFR_RNDN);
      excess = resid.to_double();
    }
    deligne = std::max(deligne, excess);
  }
  check.max_deligne_excess = deligne;

  auto ratio = [&](double allowed) {
    const double r = std::fabs(resid.to_double());
    if (r == 0.0) return 0.0;
    return allowed > 0.0 ? r / allowed : HUGE_VAL;
  };

  // Multiplicativity over coprime pairs 2 <= m < n, mn <= limit.
  for (int m = 2; static_cast<long>(m) * (m + 1) <= limit; ++m) {
    for (int n = m + 1; static_cast<long>(m) * n <= limit; ++n) {
      if (std::gcd(m, n) != 1) continue;
      mpfr_mul(prod.raw(), f.lambda(m).raw(), f.lambda(n).raw(), MPFR_RNDN);
      mpfr_sub(resid.raw(), f.lambda(m * n).raw(), prod.raw(), MPFR_RNDN);
      const double em = f.lambda_error(m), en = f.lambda_error(n);
      const double allowed = std::fabs(f.lambda_value(m)) * en + std::fabs(f.lambda_value(n)) * em +
                             em * en + f.lambda_error(m * n) + u * (1.0 + std::fabs(prod.to_double()));
      check.max_multiplicative_ratio = std::max(check.max_multiplicative_ratio, ratio(allowed));
    }
  }

  // Hecke recursion at prime powers.
  for (int p : primes_up_to(limit)) {
    for (long pj = p, prev = 1; pj * p <= limit; prev = pj, pj *= p) {
      const int j1 = static_cast<int>(pj * p);
      mpfr_mul(prod.raw(), f.lambda(p).raw(), f.lambda(static_cast<int>(pj)).raw(), MPFR_RNDN);
      mpfr_sub(resid.raw(), prod.raw(), f.lambda(j1).raw(), MPFR_RNDN);
      mpfr_sub(resid.raw(), resid.raw(), f.lambda(static_cast<int>(prev)).raw(), MPFR_RNDN);
      const double ep = f.lambda_error(p), ej = f.lambda_error(static_cast<int>(pj));
      const double allowed = std::fabs(f.lambda_value(p)) * ej +
                             std::fabs(f.lambda_value(static_cast<int>(pj))) * ep + ep * ej +
                             f.lambda_error(j1) + f.lambda_error(static_cast<int>(prev)) +
                             u * (1.0 + std::fabs(prod.to_double()));
      check.max_recursion_ratio = std::max(check.max_recursion_ratio, ratio(allowed));
    }
  }
  return check;
}

}  // namespace horocycle
