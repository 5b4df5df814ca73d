#pragma once

#include "horocycle/eigenform.hpp"

#include "json.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace horocycle {

// Raised when Satake data cannot be formed consistently (e.g. |lambda(p)| > 2
// beyond its error bound) or an L-value computation loses positivity.
class Sym2Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// theta_p in [0, pi] with lambda_f(p) = 2 cos theta_p for every prime p <= P.
struct SatakeAngles {
  int weight = 0;
  int index = 0;
  int P = 0;
  std::vector<int> primes;
  std::vector<BigFloat> theta;
  std::vector<double> theta_value;
  std::vector<BigFloat> lambda;     // lambda_f(p), as stored in the table
  std::vector<double> lambda_err;   // its error bound
  std::vector<double> clamp;        // |lambda(p)/2 - clamp(lambda(p)/2)|
  double max_clamp = 0.0;

  // Position of p in primes; throws std::out_of_range when p is not a stored prime.
  size_t slot(int p) const;
  double angle(int p) const { return theta_value[slot(p)]; }
};

// Throws Sym2Error when a clamp exceeds lambda_err(p)/2 and std::out_of_range
// when the table is shorter than P.
SatakeAngles satake_angles(const Eigenform& f, int P);

// Dirichlet coefficients of L(s, sym^2 f) = sum c(n) n^-s for n <= N, from the
// local factors 1 / ((1 - a^2 X)(1 - X)(1 - b^2 X)) with a^2 + 1 + b^2 = lambda(p)^2 - 1.
struct Sym2Coefficients {
  int N = 0;
  std::vector<BigFloat> c;     // index 0 unused
  std::vector<double> value;   // double view
  std::vector<double> err;     // absolute error bound
};

Sym2Coefficients sym2_coefficients(const SatakeAngles& angles, int N);

// Lambda_{sym^2 f}(n): (2 cos(2 j theta_p) + 1) log p for n = p^j, else 0.
// n must be >= 2 and p must be covered by the angles.
double vonmangoldt_sym2(const SatakeAngles& angles, long long n);

struct SmoothedSum {
  double value = 0.0;
  double tail_bound = 0.0;  // bound on the dropped n > N terms
};

// sum_{n <= N} Lambda_{sym^2}(n) n^-sigma e^{-n/x} (1 + n/x), with the n > N
// tail bounded through |Lambda_{sym^2}(n)| <= 3 log n. Throws Sym2Error when
// the tail bound exceeds max_tail.
SmoothedSum smoothed_coeff_sum(const SatakeAngles& angles, double sigma, double x, int N,
                               double max_tail = 1e-12);

enum class LMethod { dirichlet_smoothed, euler_truncated, prime_proxy };

std::string to_string(LMethod m);
LMethod parse_lmethod(const std::string& name);

inline constexpr int kLValueSchemaVersion = 1;

// L(1, sym^2 f) by up to three methods. Unpopulated values are 0.
struct LValueReport {
  int weight = 0;
  int index = 0;
  double value_dirichlet = 0.0;
  double value_euler = 0.0;
  double value_proxy = 0.0;
  double x_smoothing = 0.0;
  double dirichlet_tail_bound = 0.0;
  int prime_cutoff = 0;  // Euler product over p <= prime_cutoff
  int proxy_cutoff = 0;  // proxy sum over p <= proxy_cutoff (= k)
  double spread = 1.0;   // max/min over the populated values

  nlohmann::ordered_json to_json() const;
};

// Tail budget of the smoothed Dirichlet series beyond the table.
inline constexpr double kSmoothingTail = 1e-12;

// Largest x (to 1e-3 relative) with 4 x e^{-(N+1)/x} / (1 - e^{-1/x}) / x <= tail,
// a bound on sum_{n > N} |c(n)|/n e^{-n/x} from |c(n)| <= d(n)^2 <= 4n.
double smoothing_parameter(int N, double tail = kSmoothingTail);

// Euler cutoff: min(max(10^4, 100 k), table size).
int euler_cutoff(int k, int N);

LValueReport l_sym2_at_1(const Eigenform& f, LMethod method);

// All three methods, with the spread filled in.
LValueReport l_sym2_report(const Eigenform& f);

// exp(sum_{p <= cutoff} lambda(p^2) / p).
double prime_proxy(const Eigenform& f, int cutoff);

// log L(1, sym^2 f) (smoothed Dirichlet) - sum_{p <= k} lambda(p^2)/p.
double lemma3_ratio(const Eigenform& f);
double lemma3_ratio(const Eigenform& f, double l_value);

// log C_f^2 = log(2 pi^2) - log Gamma(k) - log L(1, sym^2 f).
double petersson_log_c2(int k, double l_value);
double petersson_log_c2(const Eigenform& f);

// sum_{p <= x} 1/p.
double mertens_sum(int x);

}  // namespace horocycle
