#include "horocycle/restriction.hpp"

#include "horocycle/arith.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace horocycle {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr std::int64_t kMaxWindow = 1'000'000'000;

// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    comp += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

void check_args(int k, double y, double eps) {
  if (k < 12 || k % 2 != 0) throw std::invalid_argument("weight must be even and >= 12");
  if (!(y > 0.0) || !std::isfinite(y)) throw std::invalid_argument("y must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
}

// Visits window indices in ascending |4 pi n y - k|.
template <class F>
void peak_first(const TruncationWindow& w, int k, double y, F&& visit) {
  if (w.empty()) return;
  const double step = kFourPi * y;
  std::int64_t n0 = std::llround(k / step);
  n0 = std::clamp(n0, w.n_min, w.n_max);
  visit(n0);
  std::int64_t lo = n0 - 1, hi = n0 + 1;
  while (lo >= w.n_min || hi <= w.n_max) {
    const double dlo = lo >= w.n_min ? std::fabs(step * lo - k) : HUGE_VAL;
    const double dhi = hi <= w.n_max ? std::fabs(step * hi - k) : HUGE_VAL;
    if (dlo <= dhi) visit(lo--);
    else visit(hi++);
  }
}

// Rounding allowance for a sum of exp(log weight) terms with |log weight| <= L.
double rounding_allowance(double sum, std::int64_t terms, int k, double y, std::int64_t n_max) {
  const double L = k * std::fabs(std::log(kFourPi * y * std::max<std::int64_t>(n_max, 1))) +
                   kFourPi * y * n_max + std::lgamma(static_cast<double>(k));
  return std::fabs(sum) * (64.0 + 4.0 * L + 4.0 * static_cast<double>(terms)) * 0x1p-53;
}

}  // namespace

double log_term_weight(int k, double n, double y) {
  const double xi = kFourPi * n * y;
  return k * std::log(xi) - xi - std::lgamma(static_cast<double>(k));
}

double log_weight_envelope(int k, double xi) {
  const double half_log_k = 0.5 * std::log(static_cast<double>(k));
  if (xi <= 2.0 * k) return half_log_k - (k - xi) * (k - xi) / (4.0 * k);
  return half_log_k + (k - xi) * (1.0 - std::numbers::ln2);
}

TruncationWindow truncation_window(int k, double y, double eps) {
  check_args(k, y, eps);
  const DivisorMajorant& maj = divisor_majorant();
  const double step = kFourPi * y;
  const double half = eps / 2;
  auto bound = [&](std::int64_t n) {
    const double nd = static_cast<double>(n);
    return maj.divisor_squared_bound(nd) / nd * std::exp(log_weight_envelope(k, step * nd)) * (1.0 + 1e-9);
  };
  // Sum over n > m when xi_{m+1} >= 2k: terms shrink at least by
  // rho = (e/2)^(-4 pi y) per step (n^-0.8 only helps).
  const double rho = std::exp(-step * (1.0 - std::numbers::ln2));
  auto geometric_tail = [&](std::int64_t m) {
    const double nd = static_cast<double>(m + 1);
    const double c = maj.global_constant * std::pow(nd, kDivisorExponent);
    return c * c / nd * std::exp(log_weight_envelope(k, step * nd)) / (1.0 - rho) * (1.0 + 1e-9);
  };

  TruncationWindow w;
  double left = 0.0;
  std::int64_t n = 1;
  while (step * static_cast<double>(n) < k) {
    const double b = bound(n);
    if (left + b > half) break;
    left += b;
    ++n;
  }
  w.n_min = n;

  std::int64_t m = std::max<std::int64_t>(
      w.n_min - 1, static_cast<std::int64_t>(std::ceil(2.0 * k / step)) - 1);
  while (step * static_cast<double>(m + 1) < 2.0 * k) ++m;
  double right = geometric_tail(m);
  if (right > half) {
    while (right > half) {
      if (++m > kMaxWindow) throw std::range_error("truncation window exceeds n = 10^9");
      right = geometric_tail(m);
    }
  } else {
    while (m >= w.n_min) {
      const double b = bound(m);
      if (right + b > half) break;
      right += b;
      --m;
    }
  }
  w.n_max = m;
  w.tail_bound = left + right;
  return w;
}

double norm_scale(int k, double log_c2) {
  return std::exp(log_c2 + std::lgamma(static_cast<double>(k)) - std::log(kFourPi));
}

NormValue restricted_norm(const Eigenform& f, double log_c2, double y, double eps) {
  const int k = f.weight();
  const TruncationWindow w = truncation_window(k, y, eps);
  if (!w.empty()) f.require_table(static_cast<int>(std::min<std::int64_t>(w.n_max, kMaxWindow)));
  CompensatedSum s;
  double err = 0.0;
  peak_first(w, k, y, [&](std::int64_t n) {
    const double lam = f.lambda_value(static_cast<int>(n));
    const double e = f.lambda_error(static_cast<int>(n));
    const double wt = std::exp(log_term_weight(k, static_cast<double>(n), y)) / static_cast<double>(n);
    s.add(lam * lam * wt);
    err += (2.0 * std::fabs(lam) + e) * e * wt;
  });
  const double scale = norm_scale(k, log_c2);
  NormValue out;
  out.value = scale * s.value();
  const std::int64_t terms = w.empty() ? 0 : w.n_max - w.n_min + 1;
  out.tail_bound = scale * (w.tail_bound + err + rounding_allowance(s.value(), terms, k, y, w.n_max));
  return out;
}

NormValue cross_inner_product(const Eigenform& f, double log_c2_f, const Eigenform& g,
                              double log_c2_g, double y, double eps) {
  if (f.weight() != g.weight()) throw std::invalid_argument("cross_inner_product: weights differ");
  const int k = f.weight();
  const TruncationWindow w = truncation_window(k, y, eps);
  if (!w.empty()) {
    f.require_table(static_cast<int>(w.n_max));
    g.require_table(static_cast<int>(w.n_max));
  }
  CompensatedSum s;
  double abs_sum = 0.0, err = 0.0;
  peak_first(w, k, y, [&](std::int64_t n) {
    const int i = static_cast<int>(n);
    const double a = f.lambda_value(i), b = g.lambda_value(i);
    const double ea = f.lambda_error(i), eb = g.lambda_error(i);
    const double wt = std::exp(log_term_weight(k, static_cast<double>(n), y)) / static_cast<double>(n);
    s.add(a * b * wt);
    abs_sum += std::fabs(a * b) * wt;
    err += (std::fabs(a) * eb + std::fabs(b) * ea + ea * eb) * wt;
  });
  const double scale = norm_scale(k, 0.5 * (log_c2_f + log_c2_g));
  NormValue out;
  out.value = scale * s.value();
  const std::int64_t terms = w.empty() ? 0 : w.n_max - w.n_min + 1;
  out.tail_bound = scale * (w.tail_bound + err + rounding_allowance(abs_sum, terms, k, y, w.n_max));
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::ordered_json NormProfile::to_json() const {
  nlohmann::ordered_json pts = nlohmann::ordered_json::array();
  for (const auto& p : grid) pts.push_back({{"y", p.y}, {"value", p.value}, {"tail_bound", p.tail_bound}});
  return {{"schema_version", kNormProfileSchemaVersion},
          {"k", k},
          {"index", index},
          {"delta", delta},
          {"sup_value", sup_value},
          {"grid", pts}};
}

void NormProfile::write_csv_rows(std::ostream& out) const {
  for (const auto& p : grid)
    out << k << ',' << index << ',' << format_double(p.y) << ',' << format_double(p.value) << ','
        << format_double(p.tail_bound) << '\n';
}

std::vector<double> sweep_grid(int k, double delta, int grid_size) {
  if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("delta must lie in (0, 1/2)");
  if (grid_size < 1) throw std::invalid_argument("grid_size must be >= 1");
  const double lo = std::log(1.0 / k);
  const double hi = (0.5 - delta) * std::log(static_cast<double>(k));
  std::vector<double> ys(static_cast<size_t>(grid_size));
  for (int i = 0; i < grid_size; ++i)
    ys[i] = grid_size == 1 ? std::exp(lo) : std::exp(lo + (hi - lo) * i / (grid_size - 1));
  if (grid_size > 1) {
    ys.front() = 1.0 / k;
    ys.back() = std::pow(static_cast<double>(k), 0.5 - delta);
  }
  return ys;
}

NormProfile sweep(const Eigenform& f, double log_c2, double delta, int grid_size, double eps) {
  const auto ys = sweep_grid(f.weight(), delta, grid_size);
  NormProfile prof;
  prof.k = f.weight();
  prof.index = f.index();
  prof.delta = delta;
  prof.grid.resize(ys.size());
  std::vector<std::string> failures(ys.size());
#pragma omp parallel for schedule(dynamic)
  for (size_t i = 0; i < ys.size(); ++i) {
    try {
      const NormValue v = restricted_norm(f, log_c2, ys[i], eps);
      prof.grid[i] = {ys[i], v.value, v.tail_bound};
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  }
  for (const auto& msg : failures)
    if (!msg.empty()) throw std::out_of_range(msg);
  for (const auto& p : prof.grid) prof.sup_value = std::max(prof.sup_value, p.value);
  return prof;
}

double binned_contribution(const Eigenform& f, double log_c2, double y, int j, double eps) {
  if (j < 0) throw std::invalid_argument("bin index must be >= 0");
  const int k = f.weight();
  const TruncationWindow w = truncation_window(k, y, eps);
  if (!w.empty()) f.require_table(static_cast<int>(w.n_max));
  const double root_k = std::sqrt(static_cast<double>(k));
  const double lo = j * root_k, hi = (j + 1) * root_k;
  CompensatedSum s;
  peak_first(w, k, y, [&](std::int64_t n) {
    const double dist = std::fabs(kFourPi * static_cast<double>(n) * y - k);
    if (dist < lo || dist >= hi) return;
    const double lam = f.lambda_value(static_cast<int>(n));
    s.add(lam * lam * std::exp(log_term_weight(k, static_cast<double>(n), y)) / static_cast<double>(n));
  });
  return norm_scale(k, log_c2) * s.value();
}

std::int64_t sweep_table_requirement(int k, double delta, int grid_size, double eps) {
  std::int64_t need = 0;
  for (double y : sweep_grid(k, delta, grid_size)) need = std::max(need, truncation_window(k, y, eps).n_max);
  return need;
}

}  // namespace horocycle
