#include "horocycle/sym2.hpp"

#include "horocycle/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace horocycle {

size_t SatakeAngles::slot(int p) const {
  const auto it = std::lower_bound(primes.begin(), primes.end(), p);
  if (it == primes.end() || *it != p)
    throw std::out_of_range("no Satake angle for " + std::to_string(p) + " (P=" + std::to_string(P) + ")");
  return static_cast<size_t>(it - primes.begin());
}

SatakeAngles satake_angles(const Eigenform& f, int P) {
  f.require_table(P);
  SatakeAngles a;
  a.weight = f.weight();
  a.index = f.index();
  a.P = P;
  a.primes = primes_up_to(P);
  const mpfr_prec_t prec = f.precision_bits();
  BigFloat half(prec);
  for (int p : a.primes) {
    const BigFloat& lam = f.lambda(p);
    mpfr_div_2ui(half.raw(), lam.raw(), 1, MPFR_RNDN);  // exact
    double clamp = 0.0;
    if (mpfr_cmpabs_ui(half.raw(), 1) > 0) {
      BigFloat excess(prec);
      mpfr_abs(excess.raw(), half.raw(), MPFR_RNDN);
      mpfr_sub_ui(excess.raw(), excess.raw(), 1, MPFR_RNDU);
      clamp = mpfr_get_d(excess.raw(), MPFR_RNDU);
      if (clamp > f.lambda_error(p) / 2)
        throw Sym2Error("lambda(" + std::to_string(p) + ") violates the Deligne bound beyond its error (k=" +
                        std::to_string(f.weight()) + ", index " + std::to_string(f.index()) + ")");
      mpfr_set_si(half.raw(), half.sign(), MPFR_RNDN);
    }
    BigFloat theta(prec);
    mpfr_acos(theta.raw(), half.raw(), MPFR_RNDN);
    a.theta_value.push_back(theta.to_double());
    a.theta.push_back(std::move(theta));
    a.lambda.push_back(lam);
    a.lambda_err.push_back(f.lambda_error(p));
    a.clamp.push_back(clamp);
    a.max_clamp = std::max(a.max_clamp, clamp);
  }
  return a;
}

Sym2Coefficients sym2_coefficients(const SatakeAngles& angles, int N) {
  if (N > angles.P)
    throw std::out_of_range("sym2_coefficients: angles cover p <= " + std::to_string(angles.P) +
                            ", need " + std::to_string(N));
  const mpfr_prec_t prec = angles.lambda.empty() ? 128 : angles.lambda.front().precision();
  const double u = std::ldexp(1.0, -static_cast<int>(prec) + 1);
  const double slack = 1.0 + 1e-12;

  Sym2Coefficients s;
  s.N = N;
  s.c.assign(static_cast<size_t>(N) + 1, BigFloat(prec));
  s.err.assign(s.c.size(), 0.0);
  if (N >= 1) mpfr_set_ui(s.c[1].raw(), 1, MPFR_RNDN);

  // Prime powers from c(p^j) = t c(p^{j-1}) - t c(p^{j-2}) + c(p^{j-3}), t = lambda(p)^2 - 1.
  BigFloat t(prec), tmp(prec);
  for (size_t i = 0; i < angles.primes.size(); ++i) {
    const long p = angles.primes[i];
    if (p > N) break;
    const BigFloat& lam = angles.lambda[i];
    const double el = angles.lambda_err[i];
    mpfr_sqr(t.raw(), lam.raw(), MPFR_RNDN);
    mpfr_sub_ui(t.raw(), t.raw(), 1, MPFR_RNDN);
    const double et = ((2.0 * abs_upper(lam) + el) * el + u * (abs_upper(t) + 1.0)) * slack;
    const double at = abs_upper(t);

    std::vector<long> pw{1};
    for (long q = p; q <= N; q *= p) pw.push_back(q);
    for (size_t j = 1; j < pw.size(); ++j) {
      BigFloat& out = s.c[pw[j]];
      mpfr_mul(out.raw(), t.raw(), s.c[pw[j - 1]].raw(), MPFR_RNDN);
      double e = at * s.err[pw[j - 1]] + et * (abs_upper(s.c[pw[j - 1]]) + s.err[pw[j - 1]]);
      if (j >= 2) {
        mpfr_mul(tmp.raw(), t.raw(), s.c[pw[j - 2]].raw(), MPFR_RNDN);
        mpfr_sub(out.raw(), out.raw(), tmp.raw(), MPFR_RNDN);
        e += at * s.err[pw[j - 2]] + et * (abs_upper(s.c[pw[j - 2]]) + s.err[pw[j - 2]]);
      }
      if (j >= 3) {
        mpfr_add(out.raw(), out.raw(), s.c[pw[j - 3]].raw(), MPFR_RNDN);
        e += s.err[pw[j - 3]];
      }
      s.err[pw[j]] = (e + 3.0 * u * (abs_upper(out) + at * 4.0 * static_cast<double>(j * j))) * slack;
    }
  }

  // Multiplicativity over the smallest prime power.
  const auto spf = smallest_prime_factor_table(N);
  for (int n = 2; n <= N; ++n) {
    const int p = spf[n];
    int m = n, pk = 1;
    while (m % p == 0) {
      m /= p;
      pk *= p;
    }
    if (m == 1) continue;
    mpfr_mul(s.c[n].raw(), s.c[pk].raw(), s.c[m].raw(), MPFR_RNDN);
    const double x = abs_upper(s.c[pk]), y = abs_upper(s.c[m]);
    s.err[n] = (x * s.err[m] + y * s.err[pk] + s.err[pk] * s.err[m] + u * abs_upper(s.c[n])) * slack;
  }

  s.value.resize(s.c.size());
  for (size_t n = 0; n < s.c.size(); ++n) s.value[n] = s.c[n].to_double();
  return s;
}

double vonmangoldt_sym2(const SatakeAngles& angles, long long n) {
  if (n < 2) throw std::invalid_argument("vonmangoldt_sym2: n must be >= 2");
  const PrimePower pp = as_prime_power(n);
  if (pp.exponent == 0) return 0.0;
  const double theta = angles.angle(pp.prime);
  return (2.0 * std::cos(2.0 * pp.exponent * theta) + 1.0) * std::log(static_cast<double>(pp.prime));
}

SmoothedSum smoothed_coeff_sum(const SatakeAngles& angles, double sigma, double x, int N,
                               double max_tail) {
  if (sigma < 1.0 || sigma > 1.25) throw std::invalid_argument("smoothed_coeff_sum: sigma must lie in [1, 5/4]");
  if (!(x >= 1.0)) throw std::invalid_argument("smoothed_coeff_sum: x must be >= 1");
  if (N > angles.P) throw std::out_of_range("smoothed_coeff_sum: angles cover p <= " + std::to_string(angles.P));

  // For n > N: log n <= log N + (n - N)/N and n^-sigma (1 + n/x) <= N^-sigma + N^(1-sigma)/x,
  // so the tail is at most 3 (N^-sigma + N^(1-sigma)/x) e^{-N/x} (log N S0 + S1/N)
  // with S0 = sum_{m>=1} e^{-m/x}, S1 = sum_{m>=1} m e^{-m/x}.
  const double Nd = N;
  const double r = std::exp(-1.0 / x);
  const double s0 = r / (1.0 - r);
  const double s1 = r / ((1.0 - r) * (1.0 - r));
  SmoothedSum out;
  out.tail_bound = 3.0 * (std::pow(Nd, -sigma) + std::pow(Nd, 1.0 - sigma) / x) * std::exp(-Nd / x) *
                   (std::log(Nd) * s0 + s1 / Nd) * (1.0 + 1e-9);
  if (!(out.tail_bound <= max_tail))
    throw Sym2Error("smoothed_coeff_sum: N=" + std::to_string(N) + " leaves tail " +
                    std::to_string(out.tail_bound) + " for x=" + std::to_string(x));

  double sum = 0.0, comp = 0.0;
  for (long long n = 2; n <= N; ++n) {
    const double lam = vonmangoldt_sym2(angles, n);
    if (lam == 0.0) continue;
    const double u = n / x;
    const double term = lam * std::pow(static_cast<double>(n), -sigma) * std::exp(-u) * (1.0 + u);
    // Neumaier summation.
    const double t = sum + term;
    comp += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  out.value = sum + comp;
  return out;
}

std::string to_string(LMethod m) {
  switch (m) {
    case LMethod::dirichlet_smoothed: return "dirichlet_smoothed";
    case LMethod::euler_truncated: return "euler_truncated";
    case LMethod::prime_proxy: return "prime_proxy";
  }
  return "?";
}

LMethod parse_lmethod(const std::string& name) {
  for (LMethod m : {LMethod::dirichlet_smoothed, LMethod::euler_truncated, LMethod::prime_proxy})
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown L-value method '" + name + "'");
}

nlohmann::ordered_json LValueReport::to_json() const {
  return {{"schema_version", kLValueSchemaVersion},
          {"k", weight},
          {"index", index},
          {"value_dirichlet", value_dirichlet},
          {"value_euler", value_euler},
          {"value_proxy", value_proxy},
          {"x_smoothing", x_smoothing},
          {"dirichlet_tail_bound", dirichlet_tail_bound},
          {"prime_cutoff", prime_cutoff},
          {"proxy_cutoff", proxy_cutoff},
          {"spread", spread}};
}

namespace {

double dirichlet_tail(int N, double x) {
  const double r = std::exp(-1.0 / x);
  return 4.0 * std::exp(-(N + 1.0) / x) / (1.0 - r);
}

}  // namespace

double smoothing_parameter(int N, double tail) {
  if (N < 1) throw std::invalid_argument("smoothing_parameter: N must be >= 1");
  double lo = 1e-3, hi = N;
  if (dirichlet_tail(N, lo) > tail) throw Sym2Error("smoothing_parameter: table too short");
  while (hi - lo > 1e-3 * lo) {
    const double mid = 0.5 * (lo + hi);
    (dirichlet_tail(N, mid) <= tail ? lo : hi) = mid;
  }
  return lo;
}

int euler_cutoff(int k, int N) { return std::min(std::max(10000, 100 * k), N); }

double prime_proxy(const Eigenform& f, int cutoff) {
  f.require_table(cutoff);
  double s = 0.0;
  for (int p : primes_up_to(cutoff)) {
    const double l = f.lambda_value(p);
    s += (l * l - 1.0) / p;
  }
  return std::exp(s);
}

LValueReport l_sym2_at_1(const Eigenform& f, LMethod method) {
  LValueReport r;
  r.weight = f.weight();
  r.index = f.index();
  const int N = f.table_size();
  switch (method) {
    case LMethod::dirichlet_smoothed: {
      const double x = smoothing_parameter(N);
      const auto c = sym2_coefficients(satake_angles(f, N), N);
      double sum = 0.0, comp = 0.0, err = 0.0;
      for (int n = 1; n <= N; ++n) {
        const double w = std::exp(-n / x) / n;
        const double term = c.value[n] * w;
        const double t = sum + term;
        comp += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
        err += c.err[n] * w;
      }
      r.value_dirichlet = sum + comp;
      r.x_smoothing = x;
      r.dirichlet_tail_bound = dirichlet_tail(N, x) + err;
      if (!(r.value_dirichlet > 0.0)) throw Sym2Error("smoothed L-value is not positive");
      break;
    }
    case LMethod::euler_truncated: {
      const int P = euler_cutoff(f.weight(), N);
      double log_sum = 0.0;
      for (int p : primes_up_to(P)) {
        const double l = f.lambda_value(p);
        const double t = l * l - 1.0;
        const double inv = 1.0 / p;
        const double local = -t * inv + t * inv * inv - inv * inv * inv;
        if (!(local > -1.0)) throw Sym2Error("Euler factor is not positive");
        log_sum -= std::log1p(local);
      }
      r.value_euler = std::exp(log_sum);
      r.prime_cutoff = P;
      break;
    }
    case LMethod::prime_proxy:
      r.value_proxy = prime_proxy(f, f.weight());
      r.proxy_cutoff = f.weight();
      break;
  }
  return r;
}

LValueReport l_sym2_report(const Eigenform& f) {
  LValueReport r = l_sym2_at_1(f, LMethod::dirichlet_smoothed);
  const LValueReport e = l_sym2_at_1(f, LMethod::euler_truncated);
  const LValueReport p = l_sym2_at_1(f, LMethod::prime_proxy);
  r.value_euler = e.value_euler;
  r.prime_cutoff = e.prime_cutoff;
  r.value_proxy = p.value_proxy;
  r.proxy_cutoff = p.proxy_cutoff;
  const double hi = std::max({r.value_dirichlet, r.value_euler, r.value_proxy});
  const double lo = std::min({r.value_dirichlet, r.value_euler, r.value_proxy});
  r.spread = hi / lo;
  return r;
}

double lemma3_ratio(const Eigenform& f, double l_value) {
  return std::log(l_value) - std::log(prime_proxy(f, f.weight()));
}

double lemma3_ratio(const Eigenform& f) {
  return lemma3_ratio(f, l_sym2_at_1(f, LMethod::dirichlet_smoothed).value_dirichlet);
}

double petersson_log_c2(int k, double l_value) {
  if (!(l_value > 0.0)) throw Sym2Error("petersson_log_c2: L-value must be positive");
  return std::log(2.0 * std::numbers::pi * std::numbers::pi) - std::lgamma(static_cast<double>(k)) -
         std::log(l_value);
}

double petersson_log_c2(const Eigenform& f) {
  return petersson_log_c2(f.weight(), l_sym2_at_1(f, LMethod::dirichlet_smoothed).value_dirichlet);
}

double mertens_sum(int x) {
  double s = 0.0;
  for (int p : primes_up_to(x)) s += 1.0 / p;
  return s;
}

}  // namespace horocycle
